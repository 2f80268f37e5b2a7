//! Exact rational helpers shared by every module.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn half() -> Q {
    q(1, 2)
}

/// Parses `p/q`, `p`, or a signed variant of either.
pub fn parse_rational(text: &str) -> Result<Q> {
    let t = text.trim();
    let bad = || Error::syntax(0, format!("not a rational literal: `{text}`"));
    let (num, den) = match t.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (t, "1"),
    };
    let n: BigInt = num.parse().map_err(|_| bad())?;
    let d: BigInt = den.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(Error::syntax(0, "zero denominator"));
    }
    Ok(Q::new(n, d))
}

/// Canonical text form, `p/q` or `p`.
pub fn fmt_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // numerator/denominator overflow f64 individually; scale both down
        let shift = x.numer().bits().max(x.denom().bits()).saturating_sub(1000);
        let n = (x.numer() >> shift as usize).to_f64().unwrap_or(f64::NAN);
        let d = (x.denom() >> shift as usize).to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Nearest dyadic rational `m / 2^bits` to `x`.
pub fn round_dyadic(x: &Q, bits: u64) -> Q {
    let scale = BigInt::one() << bits as usize;
    let scaled = x * Q::from_integer(scale.clone());
    let rounded = scaled.round();
    Q::new(rounded.to_integer(), scale)
}

/// Rational number with the smallest denominator in the closed interval
/// `[lo, hi]` (Stern-Brocot descent via continued fractions).
pub fn simplest_between(lo: &Q, hi: &Q) -> Q {
    assert!(lo <= hi);
    if lo.is_negative() && hi.is_positive() || lo.is_zero() || hi.is_zero() {
        return Q::zero();
    }
    if hi.is_negative() {
        return -simplest_between(&-hi, &-lo);
    }
    simplest_positive(lo, hi)
}

fn simplest_positive(lo: &Q, hi: &Q) -> Q {
    let fl = lo.floor();
    if fl == *lo {
        return fl;
    }
    if fl.clone() + Q::one() <= *hi {
        return fl + Q::one();
    }
    // lo and hi share the integer part; recurse on reciprocals of fractional parts
    let a = lo - &fl;
    let b = hi - &fl;
    let inner = simplest_positive(&b.recip(), &a.recip());
    fl + inner.recip()
}

/// Upper bound for `sqrt(x)` with `x >= 0`, tight to about `2^-bits` relative.
pub fn sqrt_upper(x: &Q, bits: u64) -> Q {
    if x.is_zero() {
        return Q::zero();
    }
    let (lo, hi) = sqrt_bracket(x, bits);
    debug_assert!(lo <= hi);
    hi
}

/// Rational bracket `lo <= sqrt(x) <= hi` for `x > 0`.
pub fn sqrt_bracket(x: &Q, bits: u64) -> (Q, Q) {
    assert!(!x.is_negative());
    if x.is_zero() {
        return (Q::zero(), Q::zero());
    }
    // sqrt(n/d) = sqrt(n*d)/d; integer square root on a scaled product
    let scale = BigInt::one() << (2 * bits as usize);
    let nd = x.numer() * x.denom() * &scale;
    let r = nd.sqrt();
    let root_scale = BigInt::one() << bits as usize;
    let den = x.denom() * &root_scale;
    let lo = Q::new(r.clone(), den.clone());
    let hi = if &r * &r == nd { lo.clone() } else { Q::new(r + 1, den) };
    (lo, hi)
}

pub fn lcm_of_denominators<'a>(it: impl IntoIterator<Item = &'a Q>) -> BigInt {
    it.into_iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
}
