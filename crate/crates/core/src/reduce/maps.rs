use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::{inverse, Matrix};
use crate::poly::Poly;

/// Components of `map ∘ other`.
pub fn compose(map: &[Poly], other: &[Poly]) -> Result<Vec<Poly>> {
    map.iter().map(|p| p.substitute(other)).collect()
}

pub fn compose_truncated(map: &[Poly], other: &[Poly], degree: u32) -> Result<Vec<Poly>> {
    map.iter().map(|p| p.substitute_truncated(other, degree)).collect()
}

pub fn identity_map(n: usize) -> Vec<Poly> {
    (0..n).map(|i| Poly::var(n, i)).collect()
}

pub fn is_identity_mod(map: &[Poly], degree: u32) -> bool {
    let n = map.len();
    map.iter().enumerate().all(|(i, p)| (p - &Poly::var(n, i)).truncate(degree).is_zero())
}

/// Inverse of a polynomial map germ `v -> L v + N(v)` (invertible `L`, `N`
/// of order at least 2) modulo terms of degree above `degree`, checked by
/// composing back.
pub fn invert_map(map: &[Poly], degree: u32) -> Result<Vec<Poly>> {
    let n = map.len();
    if map.iter().any(|p| p.nvars() != n) {
        return Err(Error::Invariant("map is not an endomorphism".into()));
    }
    if map.iter().any(|p| !p.constant_term().is_zero()) {
        return Err(Error::Invariant("map does not fix the origin".into()));
    }
    let lin: Matrix = map.iter().map(Poly::linear_coefficients).collect();
    let lin_inv = inverse(&lin).ok_or_else(|| Error::PatternUnmet("coordinate change has a singular linear part".into()))?;
    let nonlinear: Vec<Poly> = map.iter().map(|p| p.filter_terms(|e, _| e.degree() >= 2)).collect();
    let apply_lin_inv = |vs: &[Poly]| -> Vec<Poly> {
        (0..n)
            .map(|i| {
                (0..n).fold(Poly::zero(n), |acc, j| {
                    if lin_inv[i][j].is_zero() {
                        acc
                    } else {
                        acc + vs[j].scale(&lin_inv[i][j])
                    }
                })
            })
            .collect()
    };
    let ids = identity_map(n);
    let mut v = apply_lin_inv(&ids);
    for _ in 0..degree {
        let nv = compose_truncated(&nonlinear, &v, degree)?;
        let rhs: Vec<Poly> = ids.iter().zip(&nv).map(|(u, x)| u - x).collect();
        let next = apply_lin_inv(&rhs);
        if next == v {
            break;
        }
        v = next;
    }
    let back = compose_truncated(map, &v, degree)?;
    if !is_identity_mod(&back, degree) {
        return Err(Error::Invariant("inverse coordinate change failed verification".into()));
    }
    Ok(v)
}

/// `p / z_i` for the terms divisible by `z_i`, dropping the others.
pub fn divide_by_var(p: &Poly, i: usize) -> Poly {
    Poly::from_terms(
        p.nvars(),
        p.terms().filter(|(e, _)| e.0[i] > 0).map(|(e, c)| {
            let mut d = e.clone();
            d.0[i] -= 1;
            (d, c.clone())
        }),
    )
}

/// `p` with `z_i = 0`.
pub fn at_zero(p: &Poly, i: usize) -> Poly {
    p.filter_terms(|e, _| e.0[i] == 0)
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse;

    #[test]
    fn inverse_of_triangular_change() {
        let v: Vec<String> = ["x", "y", "z"].iter().map(|s| s.to_string()).collect();
        let map = vec![
            parse("x", &v).unwrap(),
            parse("y + x^3*y^3", &v).unwrap(),
            parse("2*z + x*y", &v).unwrap(),
        ];
        let inv = invert_map(&map, 9).unwrap();
        assert!(is_identity_mod(&compose_truncated(&map, &inv, 9).unwrap(), 9));
        assert!(is_identity_mod(&compose_truncated(&inv, &map, 9).unwrap(), 9));
        let singular = vec![parse("x + y", &v).unwrap(), parse("x + y", &v).unwrap(), parse("z", &v).unwrap()];
        assert!(invert_map(&singular, 4).is_err());
    }
}
