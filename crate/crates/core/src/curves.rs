//! Test curves: every analytic curve `phi` through 0 gives the lower bound
//! `ord(grad f ∘ phi) / ord(phi)` for the gradient exponent.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::{Poly, UniPoly};
use crate::rational::{fmt_q, q, Q};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TestCurve {
    components: Vec<UniPoly>,
}

impl TestCurve {
    pub fn new(components: Vec<UniPoly>) -> Result<Self> {
        if components.iter().all(UniPoly::is_zero) {
            return Err(Error::NotApplicable("test curve is identically zero".into()));
        }
        if components.iter().any(|c| !c.coeff(0).is_zero()) {
            return Err(Error::NotApplicable("test curve must pass through the origin".into()));
        }
        Ok(TestCurve { components })
    }

    /// The `i`-th coordinate axis `t e_i`.
    pub fn axis(n: usize, i: usize) -> Self {
        let components = (0..n)
            .map(|k| if k == i { UniPoly::monomial(1, Q::one()) } else { UniPoly::zero() })
            .collect();
        TestCurve { components }
    }

    /// `(c_1 t^{e_1}, ..., c_n t^{e_n})`.
    pub fn monomial(coeffs: &[Q], exps: &[u32]) -> Result<Self> {
        let components = coeffs
            .iter()
            .zip(exps)
            .map(|(c, &e)| if c.is_zero() { UniPoly::zero() } else { UniPoly::monomial(e as usize, c.clone()) })
            .collect();
        TestCurve::new(components)
    }

    pub fn components(&self) -> &[UniPoly] {
        &self.components
    }

    pub fn ord(&self) -> u32 {
        self.components.iter().filter_map(UniPoly::order).min().expect("non-zero curve") as u32
    }

    /// Components printed as polynomials in `t`.
    pub fn to_strings(&self) -> Vec<String> {
        self.components.iter().map(uni_to_text).collect()
    }
}

fn uni_to_text(p: &UniPoly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let vars = vec!["t".to_string()];
    let multi = Poly::from_terms(
        1,
        p.coeffs()
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| (crate::poly::Exponent(vec![k as u32]), c.clone())),
    );
    multi.to_text(&vars)
}

/// `ord(grad f ∘ phi) / ord(phi)`.
pub fn curve_ratio(f: &Poly, phi: &TestCurve) -> Result<Q> {
    let grad = f.gradient();
    curve_ratio_with_gradient(&grad, phi)
}

fn curve_ratio_with_gradient(grad: &[Poly], phi: &TestCurve) -> Result<Q> {
    let mut best: Option<usize> = None;
    for g in grad {
        if let Some(o) = g.compose_curve(&phi.components)?.order() {
            best = Some(best.map_or(o, |b| b.min(o)));
        }
    }
    let o = best.ok_or_else(|| Error::NotApplicable("the curve lies in the critical locus".into()))?;
    Ok(Q::new((o as i64).into(), (phi.ord() as i64).into()))
}

/// Order of `g(c_1 t^{e_1}, ...)` without building the composition.
fn monomial_curve_order(g: &Poly, coeffs: &[i8], exps: &[u32]) -> Option<u64> {
    let mut sums: BTreeMap<u64, Q> = BTreeMap::new();
    'terms: for (e, c) in g.terms() {
        let mut deg = 0u64;
        let mut sign = 1i8;
        for (i, &a) in e.0.iter().enumerate() {
            if a == 0 {
                continue;
            }
            if coeffs[i] == 0 {
                continue 'terms;
            }
            deg += a as u64 * exps[i] as u64;
            if coeffs[i] < 0 && a % 2 == 1 {
                sign = -sign;
            }
        }
        let v = if sign > 0 { c.clone() } else { -c };
        *sums.entry(deg).or_insert_with(Q::zero) += v;
    }
    sums.into_iter().find(|(_, v)| !v.is_zero()).map(|(d, _)| d)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveFamily {
    Axis,
    Monomial,
    Random,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LowerBound {
    pub value: Q,
    pub witness: TestCurve,
    pub family: CurveFamily,
    pub curves_tried: u64,
}

impl Serialize for LowerBound {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            value: String,
            witness: Vec<String>,
            family: CurveFamily,
            curves_tried: u64,
        }
        Repr {
            value: fmt_q(&self.value),
            witness: self.witness.to_strings(),
            family: self.family,
            curves_tried: self.curves_tried,
        }
        .serialize(s)
    }
}

/// Best curve ratio over the coordinate axes, all monomial curves with
/// coefficients in `{0, ±1}` and exponents up to `max_exponent`, and
/// `trials` seeded random polynomial curves. Ties keep the first curve found
/// in that enumeration order.
pub fn lower_bound_search(f: &Poly, max_exponent: u32, trials: u32, seed: u64) -> Result<LowerBound> {
    let n = f.nvars();
    if max_exponent == 0 {
        return Err(Error::NotApplicable("max exponent must be at least 1".into()));
    }
    let grad = f.gradient();
    let mut best: Option<(Q, TestCurve, CurveFamily)> = None;
    let mut tried = 0u64;
    let offer = |r: Q, c: TestCurve, fam: CurveFamily, best: &mut Option<(Q, TestCurve, CurveFamily)>| {
        if best.as_ref().is_none_or(|(b, _, _)| r > *b) {
            *best = Some((r, c, fam));
        }
    };
    for i in 0..n {
        tried += 1;
        let c = TestCurve::axis(n, i);
        if let Ok(r) = curve_ratio_with_gradient(&grad, &c) {
            offer(r, c, CurveFamily::Axis, &mut best);
        }
    }
    // monomial curves; exponent vectors with a common factor repeat a
    // reparametrized curve and are skipped
    let choices: Vec<(i8, u32)> = std::iter::once((0, 0))
        .chain((1..=max_exponent).flat_map(|e| [(1i8, e), (-1i8, e)]))
        .collect();
    let mut idx = vec![0usize; n];
    let mut coeffs = vec![0i8; n];
    let mut exps = vec![0u32; n];
    loop {
        let mut k = 0;
        while k < n {
            idx[k] += 1;
            if idx[k] < choices.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == n {
            break;
        }
        for j in 0..n {
            (coeffs[j], exps[j]) = choices[idx[j]];
        }
        let active: Vec<u32> = (0..n).filter(|&j| coeffs[j] != 0).map(|j| exps[j]).collect();
        if active.iter().fold(0, |g, &e| num_integer::gcd(g, e)) != 1 {
            continue;
        }
        tried += 1;
        let ord_phi = *active.iter().min().unwrap() as u64;
        let Some(o) = grad.iter().filter_map(|g| monomial_curve_order(g, &coeffs, &exps)).min() else {
            continue;
        };
        let r = Q::new((o as i64).into(), (ord_phi as i64).into());
        if best.as_ref().is_none_or(|(b, _, _)| r > *b) {
            let qc: Vec<Q> = coeffs.iter().map(|&c| Q::from_integer((c as i64).into())).collect();
            let curve = TestCurve::monomial(&qc, &exps)?;
            offer(r, curve, CurveFamily::Monomial, &mut best);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let curve = random_curve(&mut rng, n, max_exponent);
        tried += 1;
        if let Ok(r) = curve_ratio_with_gradient(&grad, &curve) {
            offer(r, curve, CurveFamily::Random, &mut best);
        }
    }
    let (value, witness, family) = best.ok_or_else(|| {
        Error::NotApplicable("every test curve lies in the critical locus; the germ is not isolated".into())
    })?;
    Ok(LowerBound { value, witness, family, curves_tried: tried })
}

fn random_coefficient(rng: &mut ChaCha8Rng) -> Q {
    loop {
        let p: i64 = rng.gen_range(-10..=10);
        let d: i64 = rng.gen_range(1..=10);
        if p != 0 {
            return q(p, d);
        }
    }
}

fn random_curve(rng: &mut ChaCha8Rng, n: usize, max_exponent: u32) -> TestCurve {
    loop {
        let components: Vec<UniPoly> = (0..n)
            .map(|_| {
                let nterms = rng.gen_range(0..=2usize);
                let mut coeffs = vec![Q::zero(); max_exponent as usize + 1];
                for _ in 0..nterms {
                    let e = rng.gen_range(1..=max_exponent) as usize;
                    coeffs[e] = random_coefficient(rng);
                }
                UniPoly::from_coeffs(coeffs)
            })
            .collect();
        if let Ok(c) = TestCurve::new(components) {
            return c;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse;
    use crate::rational::qi;

    fn vars(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn axis_ratios() {
        let v = vars(&["x", "y", "z"]);
        let f = parse("x^2 + y^3 + z^7", &v).unwrap();
        assert_eq!(curve_ratio(&f, &TestCurve::axis(3, 2)).unwrap(), qi(6));
        let g = parse("x^2 + y^2", &vars(&["x", "y"])).unwrap();
        assert_eq!(curve_ratio(&g, &TestCurve::axis(2, 0)).unwrap(), qi(1));
        let h = parse("x*z + x*y*z^2 + x*y^3 + y^3*z^2 + y^5 + y^2*z^4 + z^8", &v).unwrap();
        // along the y-axis the x-partial is y^3; bending z = -y^3 cancels it
        assert_eq!(curve_ratio(&h, &TestCurve::axis(3, 1)).unwrap(), qi(3));
        let bent = TestCurve::monomial(&[qi(0), qi(1), qi(-1)], &[1, 1, 3]).unwrap();
        assert_eq!(curve_ratio(&h, &bent).unwrap(), qi(4));
        let nonisolated = parse("x^2*y", &vars(&["x", "y"])).unwrap();
        assert!(curve_ratio(&nonisolated, &TestCurve::axis(2, 1)).is_err());
    }

    #[test]
    fn monomial_fast_path_matches_composition() {
        let v = vars(&["x", "y", "z"]);
        let f = parse("x*y + x^4*y^3 + (z+y)^3 - 2*x*z^2", &v).unwrap();
        let coeffs = [1i8, -1, 1];
        let exps = [2u32, 1, 1];
        let curve = TestCurve::monomial(&[qi(1), qi(-1), qi(1)], &exps).unwrap();
        for g in f.gradient() {
            let slow = g.compose_curve(curve.components()).unwrap().order().map(|o| o as u64);
            assert_eq!(monomial_curve_order(&g, &coeffs, &exps), slow);
        }
    }

    #[test]
    fn searches() {
        let v = vars(&["x", "y", "z"]);
        let lb = lower_bound_search(&parse("x^2 + y^3 + z^7", &v).unwrap(), 4, 10, 1).unwrap();
        assert_eq!(lb.value, qi(6));
        assert_eq!(lb.family, CurveFamily::Axis);
        assert_eq!(lb.witness, TestCurve::axis(3, 2));
        let lb = lower_bound_search(&parse("x*y + x^4*y^3 + (z+y)^3", &v).unwrap(), 4, 20, 1).unwrap();
        assert!(lb.value >= qi(2));
        let lb = lower_bound_search(&parse("x^2 + y^2 + z^2", &v).unwrap(), 3, 20, 7).unwrap();
        assert_eq!(lb.value, qi(1));
        let a = lower_bound_search(&parse("x^3 + x*y^2 + z^4", &v).unwrap(), 3, 30, 9).unwrap();
        let b = lower_bound_search(&parse("x^3 + x*y^2 + z^4", &v).unwrap(), 3, 30, 9).unwrap();
        assert_eq!(a, b);
    }
}
