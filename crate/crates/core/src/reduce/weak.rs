use num_traits::{One, Signed, Zero};

use super::maps::{at_zero, compose, divide_by_var, identity_map, invert_map};
use super::trace::{StableEquivalenceTrace, TraceStep};
use super::{split_in_ring, SplitOptions};
use crate::error::{Error, Result};
use crate::linalg::{inverse, Matrix};
use crate::localring::{milnor_number, MilnorNumber};
use crate::poly::{Poly, WeightVector};
use crate::rational::{half, Q};
use crate::weights::{classify, milnor_degree_hint, saito_symmetry_check, SaitoSymmetry, Verdict};

/// Outcome of a reduction to positive weights.
#[derive(Clone, Debug)]
pub struct WeakReduction {
    /// The reduced germ in the variables `core_indices`; a polynomial in no
    /// variables when the input is a sum of squares up to stable equivalence.
    pub core: Poly,
    pub core_indices: Vec<usize>,
    pub core_weights: WeightVector,
    pub a1: bool,
    pub trace: StableEquivalenceTrace,
    /// Some splitting run used the product bound in place of the Milnor
    /// number.
    pub milnor_fallback: bool,
    pub iterations: usize,
}

impl WeakReduction {
    fn identity(f: &Poly, w: &WeightVector) -> Self {
        WeakReduction {
            core: f.clone(),
            core_indices: (0..f.nvars()).collect(),
            core_weights: w.normalize(),
            a1: false,
            trace: StableEquivalenceTrace::default(),
            milnor_fallback: false,
            iterations: 0,
        }
    }

    fn a1(trace: StableEquivalenceTrace, fallback: bool, iterations: usize) -> Self {
        WeakReduction {
            core: Poly::zero(0),
            core_indices: vec![],
            core_weights: WeightVector::normalized(vec![]),
            a1: true,
            trace,
            milnor_fallback: fallback,
            iterations,
        }
    }
}

fn require_semiquasihomogeneous(f: &Poly, w: &WeightVector) -> Result<crate::weights::Classification> {
    let c = classify(f, w)?;
    if c.verdict == Verdict::None {
        return Err(Error::PatternUnmet(format!(
            "germ is not weakly semiquasihomogeneous for the type {}: {}",
            w,
            c.reason.clone().unwrap_or_default()
        )));
    }
    Ok(c)
}

fn exact_change(ring: &[usize], substitution: Vec<Poly>, inverse: Vec<Poly>) -> Result<TraceStep> {
    let n = substitution.len();
    if compose(&substitution, &inverse)? != identity_map(n) || compose(&inverse, &substitution)? != identity_map(n) {
        return Err(Error::Invariant("coordinate change and its inverse do not compose to the identity".into()));
    }
    Ok(TraceStep::PolynomialChange { ring: ring.to_vec(), map: inverse, inverse: substitution, verified_degree: None })
}

/// Removes hyperbolic pairs carrying weights above 1/2 until every weight
/// lies in `(0, 1/2]` or nothing is left.
pub fn theorem4_reduce(f: &Poly, w: &WeightVector) -> Result<WeakReduction> {
    let ring: Vec<usize> = (0..f.nvars()).collect();
    reduce_high_weights(f, w, &ring)
}

fn reduce_high_weights(f: &Poly, w: &WeightVector, ring0: &[usize]) -> Result<WeakReduction> {
    let w = w.normalize();
    if w.weights().iter().any(|l| !l.is_positive() || *l >= Q::one()) {
        return Err(Error::PatternUnmet("all weights must lie strictly between 0 and 1".into()));
    }
    require_semiquasihomogeneous(f, &w)?;
    let mut out = WeakReduction::identity(f, &w);
    out.core_indices = ring0.to_vec();
    let mut g = f.clone();
    let mut wcur = w;
    let mut ring = ring0.to_vec();
    loop {
        let l = wcur.weights().to_vec();
        let Some(nn) = (0..l.len()).filter(|&k| l[k] > half()).max_by(|&a, &b| l[a].cmp(&l[b]).then(b.cmp(&a))) else {
            break;
        };
        let n = g.nvars();
        let c0 = require_semiquasihomogeneous(&g, &wcur)?;
        let a = c0.principal.partial(nn);
        let lin = a.linear_coefficients();
        let Some(i) = (0..n).find(|&k| k != nn && !lin[k].is_zero()) else {
            return Err(Error::PatternUnmet(
                "principal part has no product of the heaviest variable with a linear partner".into(),
            ));
        };
        let c = lin[i].clone();
        let a_rest = &a - &Poly::var(n, i).scale(&c);
        // z_i -> (z_i - A') / c turns z_n A into z_n z_i
        let mut sub1 = identity_map(n);
        sub1[i] = (Poly::var(n, i) - a_rest.clone()).scale(&c.recip());
        let mut inv1 = identity_map(n);
        inv1[i] = Poly::var(n, i).scale(&c) + a_rest;
        let step1 = exact_change(&ring, sub1.clone(), inv1)?;
        let g1 = g.substitute(&sub1)?;
        let (p1, _) = g1.split_at_level(&wcur, &Q::one());
        let b1 = at_zero(&p1, nn);
        let cc = divide_by_var(&b1, i);
        // z_n -> z_n - C absorbs every other multiple of z_i
        let mut sub2 = identity_map(n);
        sub2[nn] = Poly::var(n, nn) - cc.clone();
        let mut inv2 = identity_map(n);
        inv2[nn] = Poly::var(n, nn) + cc;
        let step2 = exact_change(&ring, sub2.clone(), inv2)?;
        let g2 = g1.substitute(&sub2)?;
        let (p2, _) = g2.split_at_level(&wcur, &Q::one());
        let rest = &p2 - &(Poly::var(n, i) * Poly::var(n, nn));
        if rest.involves(i) || rest.involves(nn) {
            return Err(Error::Invariant("bilinear completion left the pair entangled".into()));
        }
        for step in [step1, step2] {
            if !is_trivial(&step) {
                out.trace.push(step);
            }
        }
        let split = split_in_ring(&g2, &wcur, &[(i, nn)], &ring, &SplitOptions::default())?;
        out.trace.extend(split.trace);
        out.iterations += split.iterations;
        out.milnor_fallback |= split.milnor_fallback;
        if split.a1 {
            return Ok(WeakReduction::a1(out.trace, out.milnor_fallback, out.iterations));
        }
        ring = split.core_indices.iter().map(|&k| ring[k]).collect();
        g = split.core;
        wcur = split.core_weights;
    }
    out.core = g;
    out.core_indices = ring;
    out.core_weights = wcur;
    Ok(out)
}

fn is_trivial(step: &TraceStep) -> bool {
    match step {
        TraceStep::PolynomialChange { map, .. } => *map == identity_map(map.len()),
        _ => false,
    }
}

/// Removes the variables of weight `<= 0` together with their partners of
/// weight `>= 1`, for germs whose principal part has the shape
/// `f0(y) + sum_a x_a P_a(x, y, z)` with the linear parts of the `P_a` in the
/// partner variables forming an invertible matrix.
pub fn corollary25_reduce(f: &Poly, w: &WeightVector) -> Result<WeakReduction> {
    let w = w.normalize();
    let n = f.nvars();
    let c = require_semiquasihomogeneous(f, &w)?;
    let pairs = match saito_symmetry_check(&w) {
        SaitoSymmetry::Consistent { pairs } => pairs,
        SaitoSymmetry::Violated { reason } => return Err(Error::PatternUnmet(format!("weights are not symmetric: {reason}"))),
    };
    if pairs.is_empty() {
        return Ok(WeakReduction::identity(f, &w));
    }
    let lows: Vec<usize> = pairs.iter().map(|p| p.0).collect();
    let highs: Vec<usize> = pairs.iter().map(|p| p.1).collect();
    let mut parts = vec![Poly::zero(n); pairs.len()];
    let mut rest = Poly::zero(n);
    for (e, coef) in c.principal.terms() {
        match lows.iter().position(|&x| e.0[x] > 0) {
            Some(a) => {
                let mut d = e.clone();
                d.0[lows[a]] -= 1;
                parts[a].add_term(d, coef.clone());
            }
            None => rest.add_term(e.clone(), coef.clone()),
        }
    }
    if lows.iter().chain(&highs).any(|&k| rest.involves(k)) {
        return Err(Error::PatternUnmet(
            "restricted pattern unmet: principal part has terms in the paired variables outside the products".into(),
        ));
    }
    let lin: Matrix = parts
        .iter()
        .map(|p| {
            let coeffs = p.linear_coefficients();
            highs.iter().map(|&b| coeffs[b].clone()).collect()
        })
        .collect();
    if inverse(&lin).is_none() {
        return Err(Error::PatternUnmet(
            "restricted pattern unmet: linear parts in the partner variables are not invertible".into(),
        ));
    }
    let ring: Vec<usize> = (0..n).collect();
    let y: Vec<usize> = (0..n).filter(|k| !lows.contains(k) && !highs.contains(k)).collect();
    let mut g_map = identity_map(n);
    for (a, &b) in highs.iter().enumerate() {
        g_map[b] = parts[a].clone();
    }
    let mut trace = StableEquivalenceTrace::default();
    let (f_new, ms) = if y.is_empty() {
        let d = 2;
        let ginv = invert_map(&g_map, d)?;
        trace.push(TraceStep::PolynomialChange {
            ring: ring.clone(),
            map: g_map,
            inverse: ginv.clone(),
            verified_degree: Some(d),
        });
        (f.substitute_truncated(&ginv, d)?, None)
    } else {
        let f0y = rest.project(&y)?;
        let wy = w.select(&y);
        let m = match milnor_number(&f0y, milnor_degree_hint(&f0y, &wy)) {
            Ok(MilnorNumber::Finite(m)) => m,
            Ok(MilnorNumber::Infinite) => {
                return Err(Error::PatternUnmet("the unpaired block is not an isolated singularity".into()))
            }
            Err(Error::Budget(msg)) => return Err(Error::Inconclusive(msg)),
            Err(e) => return Err(e),
        };
        let exact = exact_inverse(&g_map, &highs, &lin);
        let (f_new, step) = match exact {
            Some(ginv) => {
                let f_new = f.substitute(&ginv)?;
                (f_new, TraceStep::PolynomialChange { ring: ring.clone(), map: g_map, inverse: ginv, verified_degree: None })
            }
            None => {
                // a germ with Milnor number M is (M+1)-determined
                let d = (m as u32 + 1).max(rest.total_degree().unwrap_or(2));
                let ginv = invert_map(&g_map, d)?;
                let f_new = f.substitute_truncated(&ginv, d)?;
                (f_new, TraceStep::PolynomialChange { ring: ring.clone(), map: g_map, inverse: ginv, verified_degree: Some(d) })
            }
        };
        trace.push(step);
        (f_new, Some(m))
    };
    let split = split_in_ring(&f_new, &w, &pairs, &ring, &SplitOptions { milnor: ms, ..Default::default() })?;
    trace.extend(split.trace);
    if split.a1 {
        return Ok(WeakReduction::a1(trace, split.milnor_fallback, split.iterations));
    }
    Ok(WeakReduction {
        core: split.core,
        core_indices: split.core_indices,
        core_weights: split.core_weights,
        a1: false,
        trace,
        milnor_fallback: split.milnor_fallback,
        iterations: split.iterations,
    })
}

/// Exact inverse when the partner variables enter the map only through its
/// linear part.
fn exact_inverse(g_map: &[Poly], highs: &[usize], lin: &Matrix) -> Option<Vec<Poly>> {
    let n = g_map.len();
    let mut nonlinear = Vec::with_capacity(highs.len());
    for &b in highs {
        let lin_part = Poly::from_terms(
            n,
            highs.iter().map(|&c| {
                let e = crate::poly::Exponent::unit(n, c);
                let coef = g_map[b].coeff(&e);
                (e, coef)
            }),
        );
        let other = &g_map[b] - &lin_part;
        if highs.iter().any(|&c| other.involves(c)) {
            return None;
        }
        nonlinear.push(other);
    }
    let inv = inverse(lin)?;
    let mut out = identity_map(n);
    for (a, &b) in highs.iter().enumerate() {
        let mut comp = Poly::zero(n);
        for (c, &bc) in highs.iter().enumerate() {
            if !inv[a][c].is_zero() {
                comp = comp + (Poly::var(n, bc) - nonlinear[c].clone()).scale(&inv[a][c]);
            }
        }
        out[b] = comp;
    }
    let back = compose(g_map, &out).ok()?;
    (back == identity_map(n)).then_some(out)
}

/// Weak-weight elimination followed by the removal of weights above 1/2.
pub fn reduce_to_sqh(f: &Poly, w: &WeightVector) -> Result<WeakReduction> {
    let w = w.normalize();
    let first = if w.weights().iter().any(|l| !l.is_positive()) {
        corollary25_reduce(f, &w)?
    } else {
        WeakReduction::identity(f, &w)
    };
    if first.a1 {
        return Ok(first);
    }
    let second = reduce_high_weights(&first.core, &first.core_weights, &first.core_indices)?;
    let mut trace = first.trace;
    trace.extend(second.trace);
    Ok(WeakReduction {
        trace,
        milnor_fallback: first.milnor_fallback || second.milnor_fallback,
        iterations: first.iterations + second.iterations,
        ..second
    })
}
