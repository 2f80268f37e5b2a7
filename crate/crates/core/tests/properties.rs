mod common;

use common::*;
use loj_core::curves::{curve_ratio, lower_bound_search, TestCurve};
use loj_core::exponent::{loj_sqh, loj_wqh_n3, loj_wsqh};
use loj_core::interval::Interval;
use loj_core::localring::{euler_certificate, membership, milnor_number, standard_basis, MilnorNumber};
use loj_core::poly::{parse, weighted_degree, Exponent, Poly, WeightVector};
use loj_core::rational::{half, q, qi, Q};
use loj_core::reduce::{add_square, add_square_type, splitting_reduce_with, SplitOptions};
use loj_core::saito5::{charpoly_faddeev, charpoly_minors, eigen_real_parts};
use loj_core::weights::{classify, saito_symmetry_check};
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rational() -> impl Strategy<Value = Q> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| q(n, d))
}

fn poly(n: usize, max_terms: usize, max_exp: u32) -> impl Strategy<Value = Poly> {
    prop::collection::vec((prop::collection::vec(0..=max_exp, n), rational()), 0..=max_terms).prop_map(move |terms| {
        terms.into_iter().fold(Poly::zero(n), |acc, (e, c)| acc + Poly::monomial(n, Exponent(e), c))
    })
}

fn positive_weight() -> impl Strategy<Value = Q> {
    (2i64..=9, 1i64..=3).prop_filter_map("at most 1/2", |(d, n)| {
        let l = q(n, d);
        (l <= half()).then_some(l)
    })
}

/// Weight vectors satisfying the symmetry condition: positive weights up to
/// 1/2 and pairs `(a, 1 - a)` with `a` non-positive or below 1/2.
fn symmetric_weights() -> impl Strategy<Value = Vec<Q>> {
    (
        prop::collection::vec(positive_weight(), 1..=3),
        prop::collection::vec((-8i64..=3, 1i64..=4).prop_filter_map("pair below 1/2", |(n, d)| {
            let a = q(n, d);
            (a < half()).then_some(a)
        }), 0..=2),
    )
        .prop_map(|(pos, pairs)| {
            let mut w = pos;
            for a in pairs {
                w.push(Q::one() - &a);
                w.push(a);
            }
            w
        })
}

fn permuted<T: Clone>(v: &[T], seed: u64) -> Vec<T> {
    use rand::seq::SliceRandom;
    let mut out = v.to_vec();
    out.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    out
}

/// Setting the variables from `n` on to zero.
fn restrict(p: &Poly, n: usize) -> Poly {
    let kept = p.filter_terms(|e, _| e.0[n..].iter().all(|&k| k == 0));
    kept.project(&(0..n).collect::<Vec<_>>()).unwrap()
}

fn finite_mu(f: &Poly) -> u64 {
    match milnor_number(f, 64).unwrap() {
        MilnorNumber::Finite(m) => m,
        MilnorNumber::Infinite => panic!("non-isolated"),
    }
}

/// Diagonal germ with random non-zero coefficients.
fn scaled_diagonal() -> impl Strategy<Value = (Vec<u32>, Poly)> {
    prop::collection::vec((2u32..=5, rational().prop_filter("non-zero", |c| !c.is_zero())), 1..=3).prop_map(|parts| {
        let n = parts.len();
        let exps: Vec<u32> = parts.iter().map(|p| p.0).collect();
        let f = parts.iter().enumerate().fold(Poly::zero(n), |acc, (i, (a, c))| {
            let mut e = Exponent::zero(n);
            e.0[i] = *a;
            acc + Poly::monomial(n, e, c.clone())
        });
        (exps, f)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms(a in poly(3, 5, 3), b in poly(3, 5, 3), c in poly(3, 5, 3)) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&a * &Poly::one(3), a.clone());
    }

    #[test]
    fn leibniz_rule(a in poly(3, 5, 3), b in poly(3, 5, 3), i in 0usize..3) {
        prop_assert_eq!((&a * &b).partial(i), &(&a.partial(i) * &b) + &(&a * &b.partial(i)));
    }

    #[test]
    fn print_parse_roundtrip(a in poly(3, 6, 4)) {
        let v = vars(&["x", "y", "z"]);
        let text = a.to_text(&v);
        prop_assert_eq!(parse(&text, &v).unwrap(), a);
    }

    #[test]
    fn weighted_order_is_additive(a in poly(3, 4, 3), b in poly(3, 4, 3), w in symmetric_weights()) {
        prop_assume!(w.len() >= 3);
        let w = WeightVector::normalized(w[..3].to_vec());
        prop_assume!(!a.is_zero() && !b.is_zero());
        let (oa, ob) = (a.weighted_order(&w).unwrap(), b.weighted_order(&w).unwrap());
        prop_assert_eq!((&a * &b).weighted_order(&w).unwrap(), &oa + &ob);
        if let Some(s) = (&a + &b).weighted_order(&w) {
            prop_assert!(s >= oa.clone().min(ob));
        }
    }

    #[test]
    fn classification_ignores_scaling(seed in any::<u64>(), d in 1i64..=12) {
        let (w, f) = witnessed_type(&mut ChaCha8Rng::seed_from_u64(seed));
        let scaled = WeightVector::new(qi(d), w.weights().iter().map(|l| l * qi(d)).collect()).unwrap();
        let a = classify(&f, &w).unwrap();
        let b = classify(&f, &scaled).unwrap();
        prop_assert_eq!(a.verdict, b.verdict);
        prop_assert_eq!(&a.principal, &b.principal);
        let again = classify(&f, &w).unwrap();
        prop_assert_eq!(a.verdict, again.verdict);
        prop_assert_eq!(a.tail, again.tail);
    }

    #[test]
    fn euler_relation_on_principal_parts(seed in any::<u64>()) {
        let (w, f) = witnessed_type(&mut ChaCha8Rng::seed_from_u64(seed));
        let c = classify(&f, &w).unwrap();
        prop_assume!(c.verdict.is_some());
        let f0 = &c.principal;
        let w = w.normalize();
        let euler = (0..3).fold(Poly::zero(3), |acc, i| acc + (&Poly::var(3, i) * &f0.partial(i)).scale(&w.weights()[i]));
        prop_assert_eq!(&euler, f0);
        let cert = euler_certificate(f0, &w).unwrap();
        prop_assert!(cert.verify());
    }

    #[test]
    fn exponent_ignores_order_and_extra_halves(w in symmetric_weights(), seed in any::<u64>(), extra in 0usize..3) {
        let base = loj_wsqh(&WeightVector::normalized(w.clone())).unwrap().value;
        let p = WeightVector::normalized(permuted(&w, seed));
        prop_assert_eq!(&loj_wsqh(&p).unwrap().value, &base);
        let mut more = w.clone();
        more.extend(std::iter::repeat_n(half(), extra));
        prop_assert_eq!(&loj_wsqh(&WeightVector::normalized(more)).unwrap().value, &base);
        let sq = add_square_type(&WeightVector::normalized(w));
        prop_assert_eq!(&loj_wsqh(&sq).unwrap().value, &base);
    }

    #[test]
    fn positive_weights_give_the_reciprocal_formula(w in prop::collection::vec(positive_weight(), 1..=5)) {
        let ty = WeightVector::normalized(w.clone());
        let expected = w.iter().map(|l| l.recip()).max().unwrap() - Q::one();
        prop_assert_eq!(&loj_wsqh(&ty).unwrap().value, &expected);
        prop_assert_eq!(&loj_sqh(&ty).unwrap(), &expected);
        if w.len() <= 3 {
            prop_assert_eq!(&loj_wqh_n3(&ty).unwrap(), &expected);
        }
    }

    #[test]
    fn exponent_is_at_least_one(w in symmetric_weights()) {
        let d = loj_wsqh(&WeightVector::normalized(w)).unwrap();
        prop_assert!(d.value >= Q::one());
        prop_assert_eq!(d.value == Q::one(), d.l_min == half());
        prop_assert!(d.l_min.is_positive() && d.l_min <= half());
    }

    #[test]
    fn symmetric_types_pass_the_symmetry_check(w in symmetric_weights()) {
        prop_assert!(saito_symmetry_check(&WeightVector::normalized(w)).is_consistent());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn milnor_product_formula((exps, f) in scaled_diagonal()) {
        let product: u64 = exps.iter().map(|&a| (a - 1) as u64).product();
        prop_assert_eq!(finite_mu(&f), product);
    }

    #[test]
    fn milnor_invariance((_, f) in scaled_diagonal(), seed in any::<u64>(), tail in poly(3, 2, 4)) {
        let n = f.nvars();
        // terms of high degree do not change an isolated singularity of this kind
        let tail = restrict(&tail, n).filter_terms(|e, _| e.degree() >= 6);
        let f = f + tail;
        let m = finite_mu(&f);
        let order: Vec<usize> = permuted(&(0..n).collect::<Vec<_>>(), seed);
        let map: Vec<Poly> = (0..n).map(|i| Poly::var(n, order[i])).collect();
        prop_assert_eq!(finite_mu(&f.substitute(&map).unwrap()), m);
        prop_assert_eq!(finite_mu(&add_square(&f)), m);
    }

    #[test]
    fn membership_certificates_verify((_, f) in scaled_diagonal(), cs in prop::collection::vec(poly(3, 3, 2), 3), h in poly(3, 3, 2)) {
        let n = f.nvars();
        let grad = f.gradient();
        let basis = standard_basis(&grad, 32, true).unwrap();
        let target = grad.iter().zip(&cs).fold(Poly::zero(n), |acc, (g, c)| {
            acc + g * &restrict(c, n)
        });
        let cert = membership(&target, &basis).unwrap();
        prop_assert!(cert.as_ref().is_some_and(|c| c.verify()));
        let h = restrict(&h, n);
        let multiple = &target * &h;
        let cert = membership(&multiple, &basis).unwrap();
        prop_assert!(cert.as_ref().is_some_and(|c| c.verify()));
    }

    #[test]
    fn non_members_have_no_certificate((exps, f) in scaled_diagonal()) {
        let n = f.nvars();
        let basis = standard_basis(&f.gradient(), 32, true).unwrap();
        // the product of the (a_i - 2)-th powers spans the socle of the Milnor algebra
        let mut e = Exponent::zero(n);
        for (i, a) in exps.iter().enumerate() {
            e.0[i] = a - 2;
        }
        let socle = Poly::monomial(n, e, Q::one());
        prop_assert!(membership(&socle, &basis).unwrap().is_none());
    }

    #[test]
    fn splitting_invariants(seed in any::<u64>()) {
        let c = split_case(&mut ChaCha8Rng::seed_from_u64(seed));
        let opts = SplitOptions { milnor: Some(c.block_milnor), keep_states: true, ..Default::default() };
        let r = splitting_reduce_with(&c.poly, &c.weights, &c.pairing, &opts).unwrap();
        prop_assert!(r.iterations <= 4 * c.block_milnor as usize);
        for s in &r.states {
            prop_assert!(s.reconstruction_holds());
            prop_assert!(s.bounds_hold());
        }
        let before = loj_wsqh(&c.weights).unwrap().value;
        let after = if r.core_weights.is_empty() { Q::one() } else { loj_wsqh(&r.core_weights).unwrap().value };
        prop_assert_eq!(before, after);
    }

    #[test]
    fn charpoly_routes_agree(m in prop::collection::vec(prop::collection::vec(rational(), 3), 3)) {
        prop_assert_eq!(charpoly_faddeev(&m), charpoly_minors(&m));
    }

    #[test]
    fn real_parts_contain_the_trace(m in prop::collection::vec(prop::collection::vec(rational(), 3), 3)) {
        let parts = eigen_real_parts(&m, &q(1, 1 << 30)).unwrap();
        prop_assert_eq!(parts.len(), 3);
        let sum = parts.iter().fold(Interval::zero(), |acc, i| acc.add(i));
        let trace = (0..3).fold(Q::zero(), |acc, i| acc + &m[i][i]);
        prop_assert!(sum.contains(&trace));
    }

    #[test]
    fn curve_ratios_stay_below_the_exponent(seed in any::<u64>(), exps in prop::collection::vec(1u32..=6, 3), cs in prop::collection::vec(rational(), 3)) {
        let (w, f) = witnessed_type(&mut ChaCha8Rng::seed_from_u64(seed));
        prop_assume!(saito_symmetry_check(&w).is_consistent() && classify(&f, &w).unwrap().verdict.is_some());
        let value = loj_wsqh(&w).unwrap().value;
        if let Ok(phi) = TestCurve::monomial(&cs, &exps) {
            if let Ok(r) = curve_ratio(&f, &phi) {
                prop_assert!(r <= value);
            }
        }
    }

    #[test]
    fn lower_bounds_are_reproducible(seed in any::<u64>(), search_seed in any::<u64>()) {
        let (w, f) = witnessed_type(&mut ChaCha8Rng::seed_from_u64(seed));
        prop_assume!(saito_symmetry_check(&w).is_consistent() && classify(&f, &w).unwrap().verdict.is_some());
        let a = lower_bound_search(&f, 4, 3, search_seed).unwrap();
        let b = lower_bound_search(&f, 4, 3, search_seed).unwrap();
        prop_assert_eq!(&a.value, &b.value);
        prop_assert_eq!(a.witness.to_strings(), b.witness.to_strings());
        prop_assert!(a.value <= loj_wsqh(&w).unwrap().value);
    }
}

#[test]
fn axis_ratio_matches_the_weight() {
    let v = numbered(3);
    let f = parse("z1^3 + z2^5 + z3^2", &v).unwrap();
    for (i, expected) in [(0, 2), (1, 4), (2, 1)] {
        assert_eq!(curve_ratio(&f, &TestCurve::axis(3, i)).unwrap(), qi(expected));
    }
    assert!(weighted_degree(&Exponent(vec![1, 1, 1]), &w("1/3,1/5,1/2")) > Q::one());
}
