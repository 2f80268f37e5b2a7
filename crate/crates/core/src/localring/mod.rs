//! Ideals in the local ring at the origin: standard bases, membership with
//! cofactors, Milnor numbers and deleted-gradient power tests.

mod mora;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::{weighted_degree, Exponent, Poly, WeightVector};
use crate::rational::Q;

pub use mora::MoraBudget;
use mora::{Counter, Elem, Track};

/// Degree cap used when the caller has no better estimate.
pub const DEFAULT_DEGREE_BOUND: u32 = 64;
/// Hard cap for the doubling retries of [`milnor_number`].
pub const HARD_DEGREE_CAP: u32 = 1024;

/// Descriptor of the monomial order used by every local computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LocalOrder {
    /// Lower total degree is larger; ties broken lexicographically.
    AntiGradedLex,
}

#[derive(Clone, Debug)]
pub struct LocalBasis {
    nvars: usize,
    elems: Vec<Elem>,
    source: Vec<Poly>,
    order: LocalOrder,
    reduced: bool,
    tracked: bool,
    degree_bound: u32,
    /// The basis describes the ideal plus `m^(t+1)`.
    truncation: Option<u32>,
}

impl LocalBasis {
    pub fn generators(&self) -> Vec<Poly> {
        self.elems.iter().map(Elem::to_poly).collect()
    }

    pub fn leading_monomials(&self) -> Vec<Exponent> {
        self.elems.iter().map(|e| e.lm().clone()).collect()
    }

    pub fn source_ideal(&self) -> &[Poly] {
        &self.source
    }

    pub fn order(&self) -> LocalOrder {
        self.order
    }

    pub fn is_reduced(&self) -> bool {
        self.reduced
    }

    pub fn is_tracked(&self) -> bool {
        self.tracked
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Degree above which everything was discarded, for bases computed
    /// modulo a power of the maximal ideal.
    pub fn truncation(&self) -> Option<u32> {
        self.truncation
    }

    fn budget_for(&self, p: &Poly) -> MoraBudget {
        match self.truncation {
            Some(t) => MoraBudget::truncated(t),
            None => MoraBudget::with_degree(self.degree_bound.max(p.total_degree().unwrap_or(0))),
        }
    }

    /// Expression of each basis element in terms of the source generators,
    /// when the basis was computed with tracking.
    pub fn representations(&self) -> Option<Vec<Vec<Poly>>> {
        self.elems.iter().map(|e| e.track.as_ref().map(|t| t.repr.clone())).collect()
    }

    /// Mora normal form; zero iff `p` lies in the ideal of the local ring.
    pub fn normal_form(&self, p: &Poly) -> Result<Poly> {
        let budget = self.budget_for(p);
        let h = mora::normal_form(Elem::from_poly(p, None), &self.elems, &budget, &mut Counter { steps: 0 })?;
        Ok(h.to_poly())
    }

    pub fn contains(&self, p: &Poly) -> Result<bool> {
        Ok(self.normal_form(p)?.is_zero())
    }

    /// Staircase size of the leading ideal; `None` when it is not cofinite
    /// (or, for a truncated basis, when the truncation is not yet known to
    /// be harmless).
    pub fn quotient_dimension(&self) -> Option<u64> {
        match self.truncation {
            None => staircase_size(self.nvars, &self.leading_monomials()),
            Some(t) => staircase_below(self.nvars, &self.leading_monomials(), t)
                .and_then(|(count, top)| (top + 2 <= t).then_some(count)),
        }
    }
}

/// Standard basis of `gens` in the local ring at 0. With `track` set the
/// basis remembers how each element is built from `gens`, which
/// [`membership`] needs for cofactors.
pub fn standard_basis(gens: &[Poly], degree_bound: u32, track: bool) -> Result<LocalBasis> {
    let nvars = match gens.first() {
        Some(g) => g.nvars(),
        None => return Err(Error::Invariant("standard basis of an empty generator list".into())),
    };
    if gens.iter().any(|g| g.nvars() != nvars) {
        return Err(Error::Invariant("generators live in different rings".into()));
    }
    let max_deg = gens.iter().filter_map(Poly::total_degree).max().unwrap_or(0);
    let bound = degree_bound.max(max_deg);
    let budget = MoraBudget::with_degree(bound);
    let elems = mora::minimalize(mora::standard_basis(gens, track, &budget)?);
    Ok(LocalBasis {
        nvars,
        elems,
        source: gens.to_vec(),
        order: LocalOrder::AntiGradedLex,
        reduced: true,
        tracked: track,
        degree_bound: bound,
        truncation: None,
    })
}

/// Standard basis of the ideal plus `m^(t+1)`, discarding every term of
/// degree above `t`.
pub fn standard_basis_truncated(gens: &[Poly], t: u32, track: bool) -> Result<LocalBasis> {
    let nvars = match gens.first() {
        Some(g) => g.nvars(),
        None => return Err(Error::Invariant("standard basis of an empty generator list".into())),
    };
    if gens.iter().any(|g| g.nvars() != nvars) {
        return Err(Error::Invariant("generators live in different rings".into()));
    }
    let elems = mora::minimalize(mora::standard_basis(gens, track, &MoraBudget::truncated(t))?);
    Ok(LocalBasis {
        nvars,
        elems,
        source: gens.to_vec(),
        order: LocalOrder::AntiGradedLex,
        reduced: true,
        tracked: track,
        degree_bound: t,
        truncation: Some(t),
    })
}

/// Truncated standard basis for an ideal containing a power of the maximal
/// ideal, doubling the truncation degree from `start` up to `cap`. The
/// result is accepted once all monomials of degree `t - 1` are leading
/// monomials: then `m^(t-1)` lies in the ideal plus `m^t` and so, by
/// Nakayama's lemma, in the ideal itself, and the truncation changed
/// nothing. `None` means no such degree up to `cap`.
pub fn cofinite_standard_basis(gens: &[Poly], start: u32, cap: u32, track: bool) -> Result<Option<LocalBasis>> {
    let mut t = start.max(2);
    loop {
        let basis = standard_basis_truncated(gens, t, track)?;
        if basis.quotient_dimension().is_some() {
            return Ok(Some(basis));
        }
        if t >= cap {
            return Ok(None);
        }
        t = (t * 2).min(cap);
    }
}

/// Count and largest degree of the monomials of degree `< t` outside the
/// monomial ideal of `lms`; `None` when some such monomial has degree `t`.
pub fn staircase_below(nvars: usize, lms: &[Exponent], t: u32) -> Option<(u64, u32)> {
    fn walk(i: usize, cur: &mut Vec<u32>, deg: u32, t: u32, lms: &[Exponent], acc: &mut (u64, u32)) -> bool {
        if i == cur.len() {
            acc.0 += 1;
            acc.1 = acc.1.max(deg);
            return deg < t;
        }
        let mut a = 0;
        loop {
            cur[i] = a;
            let e = Exponent(cur.clone());
            if lms.iter().any(|m| m.divides(&e)) {
                break;
            }
            if deg + a > t {
                break;
            }
            if !walk(i + 1, cur, deg + a, t, lms, acc) {
                cur[i] = 0;
                return false;
            }
            a += 1;
        }
        cur[i] = 0;
        true
    }
    let mut acc = (0u64, 0u32);
    let mut cur = vec![0u32; nvars];
    walk(0, &mut cur, 0, t, lms, &mut acc).then_some(acc)
}

/// `unit * target = sum_i unit_cofactors[i] * gen_i` exactly, with
/// `unit(0) = 1`; `cofactors` are `unit_cofactors / unit` expanded up to
/// `certified_degree`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MembershipCertificate {
    pub target: Poly,
    pub generators: Vec<Poly>,
    pub cofactors: Vec<Poly>,
    pub certified_degree: u32,
    pub exact: bool,
    pub unit: Poly,
    pub unit_cofactors: Vec<Poly>,
    /// The relation `unit * target = sum unit_cofactors * generators` holds
    /// modulo terms above this degree instead of exactly.
    pub modulus: Option<u32>,
}

impl MembershipCertificate {
    /// Re-checks both identities by expansion.
    pub fn verify(&self) -> bool {
        if self.cofactors.len() != self.generators.len() || self.unit_cofactors.len() != self.generators.len() {
            return false;
        }
        let combo = |cs: &[Poly]| {
            cs.iter()
                .zip(&self.generators)
                .fold(Poly::zero(self.target.nvars()), |acc, (c, g)| acc + c * g)
        };
        let lhs = &self.unit * &self.target;
        let rhs = combo(&self.unit_cofactors);
        let exact_ok = match self.modulus {
            None => lhs == rhs,
            Some(t) => (&lhs - &rhs).truncate(t).is_zero(),
        };
        let residual = &self.target - &combo(&self.cofactors);
        let truncated_ok = residual.order().is_none_or(|o| o > self.certified_degree);
        let unit_ok = self.unit.constant_term().is_one();
        let exact_flag_ok = !self.exact || residual.is_zero();
        exact_ok && truncated_ok && unit_ok && exact_flag_ok
    }
}

/// Certificate of `p` in the ideal of `basis`, or `None` when the local
/// normal form of `p` is non-zero.
pub fn membership(p: &Poly, basis: &LocalBasis) -> Result<Option<MembershipCertificate>> {
    membership_with_degree(p, basis, p.total_degree().unwrap_or(0).max(1))
}

pub fn membership_with_degree(p: &Poly, basis: &LocalBasis, certified_degree: u32) -> Result<Option<MembershipCertificate>> {
    if !basis.tracked {
        return Err(Error::Invariant("membership certificates need a tracked standard basis".into()));
    }
    let n = basis.nvars;
    let ngens = basis.source.len();
    if p.nvars() != n {
        return Err(Error::Arity { expected: n, got: p.nvars() });
    }
    if p.is_zero() {
        let zeros = vec![Poly::zero(n); ngens];
        return Ok(Some(MembershipCertificate {
            target: p.clone(),
            generators: basis.source.clone(),
            cofactors: zeros.clone(),
            certified_degree,
            exact: true,
            unit: Poly::one(n),
            unit_cofactors: zeros,
            modulus: None,
        }));
    }
    let track = Track { target_coeff: Poly::one(n), repr: vec![Poly::zero(n); ngens] };
    let certified_degree = match basis.truncation {
        Some(t) => certified_degree.min(t),
        None => certified_degree,
    };
    let budget = match basis.truncation {
        Some(t) => MoraBudget::truncated(t),
        None => MoraBudget::with_degree(basis.degree_bound.max(p.total_degree().unwrap_or(0)) * 2),
    };
    let h = mora::normal_form(Elem::from_poly(p, Some(track)), &basis.elems, &budget, &mut Counter { steps: 0 })?;
    if !h.is_zero() {
        return Ok(None);
    }
    let t = h.track.expect("tracked normal form");
    // 0 = u * p + sum repr_i gen_i
    let unit = t.target_coeff;
    if !unit.constant_term().is_one() {
        return Err(Error::Invariant("normal form produced a non-unit multiplier".into()));
    }
    let unit_cofactors: Vec<Poly> = t.repr.iter().map(|r| -r).collect();
    let inverse = unit_inverse(&unit, certified_degree);
    let cofactors: Vec<Poly> = unit_cofactors.iter().map(|c| (c * &inverse).truncate(certified_degree)).collect();
    let exact = basis.truncation.is_none() && unit.is_one() || {
        let combo = cofactors
            .iter()
            .zip(&basis.source)
            .fold(Poly::zero(n), |acc, (c, g)| acc + c * g);
        combo == *p
    };
    let cert = MembershipCertificate {
        target: p.clone(),
        generators: basis.source.clone(),
        cofactors,
        certified_degree,
        exact,
        unit,
        unit_cofactors,
        modulus: basis.truncation,
    };
    if !cert.verify() {
        return Err(Error::Invariant("membership certificate failed re-verification".into()));
    }
    Ok(Some(cert))
}

/// Power-series inverse of a unit `u` (`u(0) != 0`) up to `degree`.
pub fn unit_inverse(u: &Poly, degree: u32) -> Poly {
    let n = u.nvars();
    let c0 = u.constant_term();
    assert!(!c0.is_zero(), "not a unit");
    let inv0 = c0.recip();
    // u = c0 (1 - v)  =>  1/u = inv0 * sum v^k
    let v = &Poly::one(n) - &u.scale(&inv0);
    let mut sum = Poly::one(n);
    let mut power = Poly::one(n);
    for _ in 0..degree {
        power = (&power * &v).truncate(degree);
        if power.is_zero() {
            break;
        }
        sum = sum + power.clone();
    }
    sum.scale(&inv0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "value")]
pub enum MilnorNumber {
    Finite(u64),
    Infinite,
}

impl MilnorNumber {
    pub fn finite(self) -> Option<u64> {
        match self {
            MilnorNumber::Finite(m) => Some(m),
            MilnorNumber::Infinite => None,
        }
    }
}

/// Dimension of the local quotient by the gradient ideal.
///
/// A short exact computation settles easy and non-isolated cases; otherwise
/// the truncated computation runs with doubling truncation degrees up to
/// `degree_bound`, and the exact one with doubling degree budgets after it.
pub fn milnor_number(f: &Poly, degree_bound: u32) -> Result<MilnorNumber> {
    if f.nvars() == 0 {
        return Ok(MilnorNumber::Finite(if f.is_zero() { 1 } else { 0 }));
    }
    let grad: Vec<Poly> = f.gradient();
    if grad.iter().all(Poly::is_zero) {
        return Ok(MilnorNumber::Infinite);
    }
    let max_deg = grad.iter().filter_map(Poly::total_degree).max().unwrap_or(1);
    let quick = MoraBudget { max_steps: 500, max_terms: 2_000, ..MoraBudget::with_degree(4 * max_deg + 4) };
    match mora::standard_basis(&grad, false, &quick) {
        Ok(elems) => {
            let lms: Vec<Exponent> = mora::minimalize(elems).iter().map(|e| e.lm().clone()).collect();
            return Ok(match staircase_size(f.nvars(), &lms) {
                Some(m) => MilnorNumber::Finite(m),
                None => MilnorNumber::Infinite,
            });
        }
        Err(Error::Budget(_)) => {}
        Err(e) => return Err(e),
    }
    let cap = degree_bound.clamp(8, HARD_DEGREE_CAP);
    match cofinite_standard_basis(&grad, (max_deg + 2).min(cap), cap, false) {
        Ok(Some(basis)) => {
            let m = basis.quotient_dimension().expect("accepted truncated basis is cofinite");
            return Ok(MilnorNumber::Finite(m));
        }
        Ok(None) | Err(Error::Budget(_)) => {}
        Err(e) => return Err(e),
    }
    let mut bound = degree_bound.max(2);
    loop {
        match standard_basis(&grad, bound, false) {
            Ok(basis) => {
                return Ok(match basis.quotient_dimension() {
                    Some(m) => MilnorNumber::Finite(m),
                    None => MilnorNumber::Infinite,
                })
            }
            Err(Error::Budget(msg)) => {
                if bound >= HARD_DEGREE_CAP {
                    return Err(Error::Budget(msg));
                }
                bound = (bound * 2).min(HARD_DEGREE_CAP);
            }
            Err(e) => return Err(e),
        }
    }
}

/// Number of monomials outside the monomial ideal generated by `lms`, or
/// `None` when that set is infinite.
pub fn staircase_size(nvars: usize, lms: &[Exponent]) -> Option<u64> {
    if lms.iter().any(|m| m.degree() == 0) {
        return Some(0);
    }
    let mut bounds = Vec::with_capacity(nvars);
    for i in 0..nvars {
        let pure = lms
            .iter()
            .filter(|m| m.0.iter().enumerate().all(|(j, &a)| j == i || a == 0))
            .map(|m| m.0[i])
            .min()?;
        bounds.push(pure);
    }
    let mut count = 0u64;
    let mut cur = vec![0u32; nvars];
    loop {
        let e = Exponent(cur.clone());
        if !lms.iter().any(|m| m.divides(&e)) {
            count += 1;
        }
        let mut i = 0;
        loop {
            if i == nvars {
                return Some(count);
            }
            cur[i] += 1;
            if cur[i] < bounds[i] {
                break;
            }
            cur[i] = 0;
            i += 1;
        }
    }
}

/// Smallest `k <= k_max` with `z_i^k` in the ideal of the deleted gradient
/// (all partials but the `i`-th), together with its certificate.
pub fn power_membership(f: &Poly, i: usize, k_max: u32) -> Result<Option<(u32, MembershipCertificate)>> {
    let n = f.nvars();
    if i >= n {
        return Err(Error::Arity { expected: n, got: i + 1 });
    }
    let gens = f.deleted_gradient(i);
    if gens.iter().all(Poly::is_zero) {
        return Ok(None);
    }
    let basis = standard_basis(&gens, DEFAULT_DEGREE_BOUND.max(4 * k_max), true)?;
    for k in 1..=k_max {
        let target = Poly::var(n, i).pow(k);
        if let Some(cert) = membership(&target, &basis)? {
            return Ok(Some((k, cert)));
        }
    }
    Ok(None)
}

/// The Euler relation `sum l_i z_i df/dz_i = f` for `f` weighted homogeneous
/// of type `(1; l)`.
pub fn euler_certificate(f: &Poly, w: &WeightVector) -> Result<MembershipCertificate> {
    let n = f.nvars();
    if w.len() != n {
        return Err(Error::Arity { expected: n, got: w.len() });
    }
    let w = w.normalize();
    if let Some(e) = f.support().find(|e| weighted_degree(e, &w) != Q::one()) {
        return Err(Error::NotApplicable(format!(
            "monomial {:?} has weighted degree {} instead of 1",
            e.0,
            crate::rational::fmt_q(&weighted_degree(e, &w))
        )));
    }
    let cofactors: Vec<Poly> = (0..n).map(|i| Poly::var(n, i).scale(&w.weights()[i])).collect();
    let cert = MembershipCertificate {
        target: f.clone(),
        generators: f.gradient(),
        cofactors: cofactors.clone(),
        certified_degree: f.total_degree().unwrap_or(1).max(1),
        exact: true,
        unit: Poly::one(n),
        unit_cofactors: cofactors,
        modulus: None,
    };
    if !cert.verify() {
        return Err(Error::Invariant("Euler relation failed to verify".into()));
    }
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse;
    use crate::rational::{q, qi};

    fn vars(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    fn p(text: &str, names: &[&str]) -> Poly {
        parse(text, &vars(names)).unwrap()
    }

    #[test]
    fn maximal_ideal_basis() {
        let b = standard_basis(&[p("x", &["x", "y"]), p("y", &["x", "y"])], 8, false).unwrap();
        assert_eq!(b.generators().len(), 2);
        assert_eq!(b.quotient_dimension(), Some(1));
    }

    #[test]
    fn a2_gradient_basis() {
        let f = p("x^2 + y^3", &["x", "y"]);
        let b = standard_basis(&f.gradient(), 8, false).unwrap();
        let lms = b.leading_monomials();
        assert!(lms.contains(&Exponent(vec![1, 0])));
        assert!(lms.contains(&Exponent(vec![0, 2])));
        assert_eq!(b.quotient_dimension(), Some(2));
        let f = p("x^3 + y^3", &["x", "y"]);
        let b = standard_basis(&f.gradient(), 8, false).unwrap();
        assert_eq!(b.quotient_dimension(), Some(4));
    }

    #[test]
    fn milnor_examples() {
        assert_eq!(milnor_number(&p("x^2 + y^2", &["x", "y"]), 8).unwrap(), MilnorNumber::Finite(1));
        assert_eq!(milnor_number(&p("x*z + y^5", &["x", "y", "z"]), 8).unwrap(), MilnorNumber::Finite(4));
        assert_eq!(milnor_number(&p("x^2*y", &["x", "y"]), 8).unwrap(), MilnorNumber::Infinite);
    }

    #[test]
    fn units_are_handled_locally() {
        // (x + x^2) generates the same local ideal as (x)
        let b = standard_basis(&[p("x + x^2", &["x"])], 8, true).unwrap();
        let cert = membership(&p("x", &["x"]), &b).unwrap().unwrap();
        assert!(cert.verify());
        assert!(!cert.unit.is_one());
        // xy + x^4 y^3 + z^3 from the weak-weight example: mu = 2
        let f = p("x*y + x^4*y^3 + z^3", &["x", "y", "z"]);
        assert_eq!(milnor_number(&f, 16).unwrap(), MilnorNumber::Finite(2));
    }

    #[test]
    fn trivial_memberships() {
        let v = ["x", "y"];
        let b = standard_basis(&[p("x", &v)], 8, true).unwrap();
        let cert = membership(&p("x", &v), &b).unwrap().unwrap();
        assert_eq!(cert.cofactors, vec![p("1", &v)]);
        assert!(cert.exact);
        let zero = membership(&Poly::zero(2), &b).unwrap().unwrap();
        assert!(zero.cofactors.iter().all(Poly::is_zero));
        assert!(membership(&p("y", &v), &b).unwrap().is_none());
    }

    #[test]
    fn power_membership_examples() {
        assert!(power_membership(&p("x^2 + y^2", &["x", "y"]), 0, 6).unwrap().is_none());
        let (k, cert) = power_membership(&p("x^2 + x*y", &["x", "y"]), 0, 6).unwrap().unwrap();
        assert_eq!(k, 1);
        assert!(cert.verify());
    }

    #[test]
    fn euler_certificates() {
        let v = ["x", "y"];
        let cert = euler_certificate(&p("x^2 + y^3", &v), &WeightVector::normalized(vec![q(1, 2), q(1, 3)])).unwrap();
        assert_eq!(cert.cofactors, vec![p("1/2*x", &v), p("1/3*y", &v)]);
        let cert = euler_certificate(&p("x*y", &v), &WeightVector::normalized(vec![q(1, 4), q(3, 4)])).unwrap();
        assert_eq!(cert.cofactors, vec![p("1/4*x", &v), p("3/4*y", &v)]);
        let bad = p("x^2 + y^3 + x*y^2", &v);
        assert!(euler_certificate(&bad, &WeightVector::normalized(vec![q(1, 2), q(1, 3)])).is_err());
        let _ = qi(0);
    }
}
