//! Weight types of a germ: classification into the (weakly)
//! (semi)quasihomogeneous classes, discovery of candidate types from the
//! support, and the symmetry constraints on weak weights.

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{for_each_combination, solve};
use crate::localring::{milnor_number, MilnorNumber, DEFAULT_DEGREE_BOUND};
use crate::poly::{weighted_degree, Exponent, Poly, WeightVector};
use crate::rational::{half, Q};

/// Largest support handled by [`discover_types`] by default.
pub const DEFAULT_SUPPORT_CAP: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Verdict {
    #[serde(rename = "QH")]
    Qh,
    #[serde(rename = "WQH")]
    Wqh,
    #[serde(rename = "SQH")]
    Sqh,
    #[serde(rename = "WSQH")]
    Wsqh,
    #[serde(rename = "NONE")]
    None,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Qh => "QH",
            Verdict::Wqh => "WQH",
            Verdict::Sqh => "SQH",
            Verdict::Wsqh => "WSQH",
            Verdict::None => "NONE",
        }
    }

    pub fn is_some(self) -> bool {
        self != Verdict::None
    }

    /// QH or SQH: positive rational weights in `(0, 1/2]`.
    pub fn is_strict(self) -> bool {
        matches!(self, Verdict::Qh | Verdict::Sqh)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    pub verdict: Verdict,
    pub wtype: WeightVector,
    pub principal: Poly,
    pub tail: Poly,
    pub singular_principal: bool,
    pub principal_milnor: Option<MilnorNumber>,
    /// Why the verdict is NONE, when it is.
    pub reason: Option<String>,
}

impl Classification {
    fn none(wtype: WeightVector, principal: Poly, tail: Poly, reason: impl Into<String>) -> Self {
        Classification {
            verdict: Verdict::None,
            wtype,
            principal,
            tail,
            singular_principal: false,
            principal_milnor: None,
            reason: Some(reason.into()),
        }
    }
}

/// Initial degree budget for a Milnor number computation on a principal part.
pub fn milnor_degree_hint(f0: &Poly, w: &WeightVector) -> u32 {
    let deg = f0.total_degree().unwrap_or(2);
    let product = if w.weights().iter().all(|l| l.is_positive() && *l <= half()) {
        w.weights()
            .iter()
            .map(|l| l.recip() - Q::one())
            .fold(Q::one(), |a, b| a * b)
            .ceil()
            .to_integer()
            .try_into()
            .ok()
    } else {
        None
    };
    let cand: u32 = product.unwrap_or(deg);
    (2 * cand.min(1 << 20) + 2).max(deg + 2).max(DEFAULT_DEGREE_BOUND.min(deg * 4))
}

/// Classifies `p` for the type `w` (normalized internally).
pub fn classify(p: &Poly, w: &WeightVector) -> Result<Classification> {
    if w.len() != p.nvars() {
        return Err(Error::Arity { expected: p.nvars(), got: w.len() });
    }
    if p.is_zero() {
        return Err(Error::NotApplicable("the zero polynomial has no weight type".into()));
    }
    let w = w.normalize();
    let one = Q::one();
    let (principal, tail) = p.split_at_level(&w, &one);
    if let Some(e) = tail.support().find(|e| weighted_degree(e, &w) < one) {
        return Ok(Classification::none(
            w.clone(),
            principal,
            tail.clone(),
            format!("monomial with exponent {:?} lies below level 1", e.0),
        ));
    }
    if principal.is_zero() {
        return Ok(Classification::none(w, principal, tail, "no monomial at level 1"));
    }
    if tail.order().is_some_and(|o| o <= 1) {
        return Ok(Classification::none(w, principal, tail, "tail has ordinary order at most 1"));
    }
    if principal.order().is_some_and(|o| o < 2) {
        return Ok(Classification::none(w, principal, tail, "principal part is not critical at 0"));
    }
    let mu = match milnor_number(&principal, milnor_degree_hint(&principal, &w)) {
        Ok(m) => m,
        Err(Error::Budget(msg)) => {
            return Err(Error::Inconclusive(format!("singularity test of the principal part: {msg}")))
        }
        Err(e) => return Err(e),
    };
    if mu == MilnorNumber::Infinite {
        let mut c = Classification::none(w, principal, tail, "principal part has a non-isolated critical point");
        c.principal_milnor = Some(mu);
        return Ok(c);
    }
    let strict = w.is_quasihomogeneous_range();
    let verdict = match (tail.is_zero(), strict) {
        (true, true) => Verdict::Qh,
        (true, false) => Verdict::Wqh,
        (false, true) => Verdict::Sqh,
        (false, false) => Verdict::Wsqh,
    };
    Ok(Classification {
        verdict,
        wtype: w,
        principal,
        tail,
        singular_principal: true,
        principal_milnor: Some(mu),
        reason: None,
    })
}

/// Candidate types of `p` with a non-NONE classification, sorted
/// lexicographically by weight tuple.
pub fn discover_types(p: &Poly) -> Result<Vec<WeightVector>> {
    Ok(discover_classified(p, DEFAULT_SUPPORT_CAP)?.into_iter().map(|c| c.wtype).collect())
}

/// Like [`discover_types`] but returns the classifications, with a
/// configurable support cap.
pub fn discover_classified(p: &Poly, support_cap: usize) -> Result<Vec<Classification>> {
    let n = p.nvars();
    if p.is_zero() {
        return Err(Error::NotApplicable("the zero polynomial has no weight type".into()));
    }
    if p.order().is_some_and(|o| o < 2) {
        return Err(Error::NotApplicable("weight discovery needs a germ of order at least 2".into()));
    }
    let support: Vec<Exponent> = p.support().cloned().collect();
    if support.len() > support_cap {
        return Err(Error::Budget(format!(
            "support has {} monomials, above the discovery cap {}",
            support.len(),
            support_cap
        )));
    }
    // pure squares pin the weight of a variable to 1/2 when the support
    // leaves it undetermined (e.g. the partner of a hyperbolic pair)
    let mut points: Vec<(Exponent, bool)> = support.iter().map(|e| (e.clone(), true)).collect();
    for i in 0..n {
        let mut sq = Exponent::zero(n);
        sq.0[i] = 2;
        if !support.contains(&sq) {
            points.push((sq, false));
        }
    }
    let mut candidates: BTreeSet<Vec<Q>> = BTreeSet::new();
    let ones = vec![Q::one(); n];
    for_each_combination(points.len(), n, |idx| {
        if !idx.iter().any(|&k| points[k].1) {
            return;
        }
        let a: Vec<Vec<Q>> = idx
            .iter()
            .map(|&k| points[k].0 .0.iter().map(|&x| Q::from_integer(x.into())).collect())
            .collect();
        if let Some(l) = solve(&a, &ones) {
            candidates.insert(l);
        }
    });
    let mut out = Vec::new();
    for l in candidates {
        let w = WeightVector::normalized(l);
        if !passes_cheap_filters(p, &w) {
            continue;
        }
        let c = classify(p, &w)?;
        if c.verdict.is_some() {
            out.push(c);
        }
    }
    Ok(out)
}

/// Necessary conditions checked before any Milnor computation: no monomial
/// below level 1 and, for each variable `z_i`, a level-1 monomial `z_i^a` or
/// `z_i^a z_j` (otherwise the `z_i`-axis is critical for the principal part).
fn passes_cheap_filters(p: &Poly, w: &WeightVector) -> bool {
    let one = Q::one();
    let mut covered = vec![false; p.nvars()];
    for e in p.support() {
        let d = weighted_degree(e, w);
        if d < one {
            return false;
        }
        if d != one {
            continue;
        }
        let nonzero: Vec<usize> = (0..e.len()).filter(|&k| e.0[k] > 0).collect();
        match nonzero.as_slice() {
            [i] => covered[*i] = true,
            [i, j] => {
                if e.0[*j] == 1 {
                    covered[*i] = true;
                }
                if e.0[*i] == 1 {
                    covered[*j] = true;
                }
            }
            _ => {}
        }
    }
    covered.into_iter().all(|c| c)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum SaitoSymmetry {
    /// Index pairs `(low, high)` with `l_low <= 0`, `l_high >= 1` and
    /// `l_low + l_high = 1`.
    Consistent { pairs: Vec<(usize, usize)> },
    Violated { reason: String },
}

impl SaitoSymmetry {
    pub fn is_consistent(&self) -> bool {
        matches!(self, SaitoSymmetry::Consistent { .. })
    }
}

/// Weights `<= 0` and `>= 1` must come in pairs summing to 1.
pub fn saito_symmetry_check(w: &WeightVector) -> SaitoSymmetry {
    let w = w.normalize();
    let l = w.weights();
    let mut low: Vec<usize> = (0..l.len()).filter(|&i| !l[i].is_positive()).collect();
    let mut high: Vec<usize> = (0..l.len()).filter(|&i| l[i] >= Q::one()).collect();
    if low.len() != high.len() {
        return SaitoSymmetry::Violated {
            reason: format!("{} weights <= 0 but {} weights >= 1", low.len(), high.len()),
        };
    }
    low.sort_by(|&a, &b| l[a].cmp(&l[b]).then(a.cmp(&b)));
    high.sort_by(|&a, &b| l[b].cmp(&l[a]).then(a.cmp(&b)));
    let mut pairs = Vec::with_capacity(low.len());
    for (&a, &b) in low.iter().zip(&high) {
        if &l[a] + &l[b] != Q::one() {
            return SaitoSymmetry::Violated {
                reason: format!("weights at positions {a} and {b} do not sum to 1"),
            };
        }
        pairs.push((a, b));
    }
    SaitoSymmetry::Consistent { pairs }
}

/// Smallest `j != i` such that `z_i z_j` appears in `p` while `z_j^2` does
/// not, provided `p` has order 2.
pub fn check_prop1_structure(p: &Poly, i: usize) -> Option<usize> {
    let n = p.nvars();
    if i >= n || p.order() != Some(2) {
        return None;
    }
    (0..n).filter(|&j| j != i).find(|&j| {
        let mut mixed = Exponent::zero(n);
        mixed.0[i] += 1;
        mixed.0[j] += 1;
        let mut square = Exponent::zero(n);
        square.0[j] = 2;
        !p.coeff(&mixed).is_zero() && p.coeff(&square).is_zero()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse;
    use crate::rational::{q, qi};

    fn vars(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    fn p3(text: &str) -> Poly {
        parse(text, &vars(&["x", "y", "z"])).unwrap()
    }

    #[test]
    fn weak_type_of_the_three_variable_example() {
        let f = p3("x*y + x^4*y^3 + (z+y)^3");
        let c = classify(&f, &WeightVector::normalized(vec![qi(-2), qi(3), q(1, 3)])).unwrap();
        assert_eq!(c.verdict, Verdict::Wsqh);
        assert_eq!(c.principal, p3("x*y + x^4*y^3 + z^3"));
        assert_eq!(&c.principal + &c.tail, f);
        let c = classify(&f, &WeightVector::normalized(vec![q(2, 3), q(1, 3), q(1, 3)])).unwrap();
        assert_eq!(c.verdict, Verdict::Wsqh);
        assert_eq!(c.principal, p3("x*y + (z+y)^3"));
    }

    #[test]
    fn strict_types() {
        let f = p3("x*z + x*y*z^2 + x*y^3 + y^3*z^2 + y^5 + y^2*z^4 + z^8");
        let c = classify(&f, &WeightVector::normalized(vec![half(), q(1, 5), half()])).unwrap();
        assert_eq!(c.verdict, Verdict::Sqh);
        assert_eq!(c.principal, p3("x*z + y^5"));
        assert_eq!(c.principal_milnor, Some(MilnorNumber::Finite(4)));
        let g = parse("x^2 + y^2", &vars(&["x", "y"])).unwrap();
        let c = classify(&g, &WeightVector::normalized(vec![half(), half()])).unwrap();
        assert_eq!(c.verdict, Verdict::Qh);
        assert!(c.tail.is_zero());
    }

    #[test]
    fn rejections() {
        let g = parse("x^2*y", &vars(&["x", "y"])).unwrap();
        let c = classify(&g, &WeightVector::normalized(vec![q(1, 4), half()])).unwrap();
        assert_eq!(c.verdict, Verdict::None);
        let f = p3("x^2 + y^3 + z^7");
        let c = classify(&f, &WeightVector::normalized(vec![half(), half(), q(1, 7)])).unwrap();
        assert_eq!(c.verdict, Verdict::None);
        // level scaling does not change the verdict
        let a = classify(&f, &WeightVector::new(qi(2), vec![qi(1), q(2, 3), q(2, 7)]).unwrap()).unwrap();
        let b = classify(&f, &WeightVector::normalized(vec![half(), q(1, 3), q(1, 7)])).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn discovery() {
        let types = discover_types(&p3("x*y + x^4*y^3 + (z+y)^3")).unwrap();
        assert!(types.contains(&WeightVector::normalized(vec![qi(-2), qi(3), q(1, 3)])));
        assert!(types.contains(&WeightVector::normalized(vec![q(2, 3), q(1, 3), q(1, 3)])));
        let types = discover_types(&p3("x^2 + y^3 + z^7")).unwrap();
        assert!(types.contains(&WeightVector::normalized(vec![half(), q(1, 3), q(1, 7)])));
        let types = discover_types(&parse("x^2", &vars(&["x"])).unwrap()).unwrap();
        assert_eq!(types, vec![WeightVector::normalized(vec![half()])]);
        let types = discover_types(&p3("x*z + y^5")).unwrap();
        assert!(types.contains(&WeightVector::normalized(vec![half(), q(1, 5), half()])));
    }

    #[test]
    fn symmetry() {
        let ok = saito_symmetry_check(&WeightVector::normalized(vec![qi(-2), qi(3), q(1, 3)]));
        assert_eq!(ok, SaitoSymmetry::Consistent { pairs: vec![(0, 1)] });
        let ok = saito_symmetry_check(&WeightVector::normalized(vec![half(), q(1, 5), half()]));
        assert_eq!(ok, SaitoSymmetry::Consistent { pairs: vec![] });
        assert!(!saito_symmetry_check(&WeightVector::normalized(vec![qi(-1), q(1, 3), q(1, 3)])).is_consistent());
    }

    #[test]
    fn linear_partner_structure() {
        let v = vars(&["z1", "z2", "z3", "z4"]);
        let f = parse("z1*z2 + (1+z2)*(z3^4 + z3^2*z4^3 + z4^5)", &v).unwrap();
        assert_eq!(check_prop1_structure(&f, 0), Some(1));
        assert_eq!(check_prop1_structure(&parse("z1^2 + z2^2", &v).unwrap(), 0), None);
        assert_eq!(check_prop1_structure(&parse("z1*z2 + z2^2 + z3^3", &v).unwrap(), 0), None);
    }
}
