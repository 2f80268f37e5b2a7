//! Constructive reductions of weakly semiquasihomogeneous germs to a
//! positive-weight core: the iterative splitting of hyperbolic pairs, the
//! elimination of weights above 1/2, and the weak-weight coordinate change
//! of restricted shape.

mod maps;
mod trace;
mod weak;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::localring::{milnor_number, MilnorNumber};
use crate::poly::{weighted_degree, Poly, WeightVector};
use crate::rational::{fmt_q, half, Q};
use crate::weights::milnor_degree_hint;

pub use maps::{compose, compose_truncated, invert_map, is_identity_mod};
pub use trace::{StableEquivalenceTrace, StateSummary, TraceStep};
pub use weak::{corollary25_reduce, reduce_to_sqh, theorem4_reduce, WeakReduction};

/// Largest degree up to which coordinate-change inverses are expanded.
pub const INVERSE_DEGREE_CAP: u32 = 10;

/// Germ decomposed as `f0(y) + H + sum_j (x_j + Gamma_j)(z_j + Delta_j) + R + E`,
/// where `E` collects the remainder terms of degree beyond the determinacy
/// degree `M + 1` produced by the iteration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionState {
    pub m: usize,
    /// The germ being decomposed.
    pub input: Poly,
    /// `f0(y)`, as a polynomial in the full ring.
    pub f0: Poly,
    pub h: Poly,
    pub gamma: Vec<Poly>,
    pub delta: Vec<Poly>,
    pub r: Poly,
    /// Terms of ordinary degree at least `M + 2` moved out of `R`.
    pub discarded: Poly,
    /// Weighted order of the tail; `None` when the tail vanishes.
    pub d1: Option<Q>,
    /// `(x_j, z_j)` variable indices.
    pub pairing: Vec<(usize, usize)>,
    pub weights: WeightVector,
    pub milnor_bound: u64,
}

impl ReductionState {
    /// Initial state `R = f'`, `H = Gamma = Delta = 0` for a germ whose
    /// principal part is `f0(y) + sum_j x_j z_j`.
    pub fn new(f: &Poly, w: &WeightVector, pairing: &[(usize, usize)], milnor_bound: u64) -> Result<Self> {
        let n = f.nvars();
        if w.len() != n {
            return Err(Error::Arity { expected: n, got: w.len() });
        }
        let w = w.normalize();
        let l = w.weights();
        let mut used = vec![false; n];
        for &(x, z) in pairing {
            if x >= n || z >= n || x == z || used[x] || used[z] {
                return Err(Error::PatternUnmet("pairing must use distinct variables".into()));
            }
            used[x] = true;
            used[z] = true;
            if &l[x] + &l[z] != Q::one() {
                return Err(Error::PatternUnmet(format!(
                    "paired weights {} and {} do not sum to 1",
                    fmt_q(&l[x]),
                    fmt_q(&l[z])
                )));
            }
        }
        if (0..n).any(|k| !used[k] && !l[k].is_positive()) {
            return Err(Error::PatternUnmet("unpaired variables must have positive weight".into()));
        }
        let one = Q::one();
        let (principal, tail) = f.split_at_level(&w, &one);
        if tail.support().any(|e| weighted_degree(e, &w) < one) {
            return Err(Error::PatternUnmet("germ has monomials below level 1".into()));
        }
        let mut f0 = principal.clone();
        for &(x, z) in pairing {
            let xz = Poly::var(n, x) * Poly::var(n, z);
            f0 = f0 - xz;
        }
        if pairing.iter().any(|&(x, z)| f0.involves(x) || f0.involves(z)) {
            return Err(Error::PatternUnmet(
                "principal part is not f0(y) plus the products of the paired variables".into(),
            ));
        }
        let d1 = tail.weighted_order(&w);
        Ok(ReductionState {
            m: 1,
            input: f.clone(),
            f0,
            h: Poly::zero(n),
            gamma: vec![Poly::zero(n); pairing.len()],
            delta: vec![Poly::zero(n); pairing.len()],
            r: tail,
            discarded: Poly::zero(n),
            d1,
            pairing: pairing.to_vec(),
            weights: w,
            milnor_bound,
        })
    }

    pub fn nvars(&self) -> usize {
        self.input.nvars()
    }

    /// Indices of the unpaired variables.
    pub fn y_indices(&self) -> Vec<usize> {
        (0..self.nvars())
            .filter(|k| !self.pairing.iter().any(|&(x, z)| x == *k || z == *k))
            .collect()
    }

    /// `f0 + H + sum_j (x_j + Gamma_j)(z_j + Delta_j) + R + E`.
    pub fn reconstruction(&self) -> Poly {
        let n = self.nvars();
        let mut out = &self.f0 + &self.h;
        for (j, &(x, z)) in self.pairing.iter().enumerate() {
            let a = Poly::var(n, x) + self.gamma[j].clone();
            let b = Poly::var(n, z) + self.delta[j].clone();
            out = out + a * b;
        }
        out + self.r.clone() + self.discarded.clone()
    }

    /// Degree from which terms are irrelevant: `M + 2`.
    pub fn cutoff(&self) -> u32 {
        (self.milnor_bound as u32).saturating_add(2)
    }

    pub fn reconstruction_holds(&self) -> bool {
        self.reconstruction() == self.input
    }

    /// `ord H > 1`, `ord Gamma_j >= d1 - r_j`, `ord Delta_j >= d1 - p_j` and
    /// `ord R >= m (d1 - 1) + 1`, all weighted; `E` has ordinary order at
    /// least `M + 2`.
    pub fn bounds_hold(&self) -> bool {
        if self.discarded.order().is_some_and(|o| o < self.cutoff()) {
            return false;
        }
        let w = &self.weights;
        let l = w.weights();
        let one = Q::one();
        if self.h.weighted_order(w).is_some_and(|o| o <= one) {
            return false;
        }
        let Some(d1) = &self.d1 else {
            return self.r.is_zero() && self.gamma.iter().chain(&self.delta).all(Poly::is_zero);
        };
        for (j, &(x, z)) in self.pairing.iter().enumerate() {
            if self.gamma[j].weighted_order(w).is_some_and(|o| o < d1 - &l[z]) {
                return false;
            }
            if self.delta[j].weighted_order(w).is_some_and(|o| o < d1 - &l[x]) {
                return false;
            }
        }
        let m = Q::from_integer((self.m as i64).into());
        let bound = m * (d1 - &one) + &one;
        !self.r.weighted_order(w).is_some_and(|o| o < bound)
    }

    pub fn summary(&self) -> StateSummary {
        StateSummary {
            m: self.m,
            remainder_order: self.r.order(),
            remainder_weighted_order: self.r.weighted_order(&self.weights).map(|o| fmt_q(&o)),
            reconstruction_ok: self.reconstruction_holds(),
            bounds_ok: self.bounds_hold(),
        }
    }

    /// The splitting stops once the remainder vanishes, or lies beyond the
    /// determinacy degree `M + 1` after at least one step.
    pub fn is_done(&self) -> bool {
        self.r.order().is_none_or(|o| self.m > 1 && o as u64 >= self.milnor_bound + 2)
    }
}

/// One decomposition step: `R = eta(y) + sum_j (x_j delta_j + z_j gamma_j)`
/// with `y`-only monomials in `eta`, monomials divisible by some `x_j` in the
/// smallest such slot, and the rest in the smallest `z_j` slot.
pub fn decompose_step(state: &ReductionState) -> Result<ReductionState> {
    let n = state.nvars();
    let k = state.pairing.len();
    let mut eta = Poly::zero(n);
    let mut gamma = vec![Poly::zero(n); k];
    let mut delta = vec![Poly::zero(n); k];
    for (e, c) in state.r.terms() {
        if e.degree() == 0 {
            return Err(Error::Invariant("remainder has a constant term".into()));
        }
        if let Some(j) = state.pairing.iter().position(|&(x, _)| e.0[x] > 0) {
            let mut d = e.clone();
            d.0[state.pairing[j].0] -= 1;
            delta[j].add_term(d, c.clone());
        } else if let Some(j) = state.pairing.iter().position(|&(_, z)| e.0[z] > 0) {
            let mut d = e.clone();
            d.0[state.pairing[j].1] -= 1;
            gamma[j].add_term(d, c.clone());
        } else {
            eta.add_term(e.clone(), c.clone());
        }
    }
    let mut next = state.clone();
    next.m += 1;
    next.h = &state.h + &eta;
    let mut r = Poly::zero(n);
    for j in 0..k {
        next.gamma[j] = &state.gamma[j] + &gamma[j];
        next.delta[j] = &state.delta[j] + &delta[j];
        r = r - &state.gamma[j] * &delta[j] - &gamma[j] * &next.delta[j];
    }
    // terms beyond the determinacy degree do not change the germ up to
    // right equivalence; set them aside to keep the iteration finite
    let cut = next.cutoff();
    let kept = r.truncate(cut - 1);
    next.discarded = &state.discarded + &(&r - &kept);
    next.r = kept;
    if !next.reconstruction_holds() {
        return Err(Error::Invariant(format!("reconstruction identity fails after step {}", next.m)));
    }
    if !next.bounds_hold() {
        return Err(Error::Invariant(format!("order bounds fail after step {}", next.m)));
    }
    Ok(next)
}

#[derive(Clone, Debug, Default)]
pub struct SplitOptions {
    /// Iteration budget; defaults to `4 M`.
    pub budget: Option<usize>,
    /// Milnor number of the unpaired block, when already known.
    pub milnor: Option<u64>,
    /// Keep every intermediate state in the result.
    pub keep_states: bool,
}

#[derive(Clone, Debug)]
pub struct SplittingResult {
    /// `f0(y) + H` in the unpaired variables; the zero polynomial in no
    /// variables for the type A1 outcome.
    pub core: Poly,
    /// Positions of the core variables in the input ring.
    pub core_indices: Vec<usize>,
    pub core_weights: WeightVector,
    pub iterations: usize,
    pub milnor_bound: u64,
    /// The Milnor number was replaced by the product bound after a budget
    /// failure.
    pub milnor_fallback: bool,
    pub remainder_order: Option<u32>,
    pub a1: bool,
    pub trace: StableEquivalenceTrace,
    pub summaries: Vec<StateSummary>,
    pub states: Vec<ReductionState>,
}

/// Milnor number of the unpaired block, or the product bound when the
/// computation runs out of budget and the weights allow it.
fn block_milnor(f0y: &Poly, wy: &WeightVector) -> Result<(u64, bool)> {
    match milnor_number(f0y, milnor_degree_hint(f0y, wy)) {
        Ok(MilnorNumber::Finite(m)) => Ok((m, false)),
        Ok(MilnorNumber::Infinite) => Err(Error::PatternUnmet("principal part of the unpaired block is not isolated".into())),
        Err(Error::Budget(msg)) => {
            if wy.weights().iter().all(|q| q.is_positive() && *q <= half()) {
                let prod = wy.weights().iter().fold(Q::one(), |a, q| a * (q.recip() - Q::one()));
                let m: u64 = prod.ceil().to_integer().try_into().map_err(|_| Error::Budget(msg.clone()))?;
                Ok((m, true))
            } else {
                Err(Error::Budget(msg))
            }
        }
        Err(e) => Err(e),
    }
}

/// Iterates [`decompose_step`] until the remainder lies beyond the
/// determinacy degree and returns the unpaired core `f0(y) + H`.
pub fn splitting_reduce(f: &Poly, w: &WeightVector, pairing: &[(usize, usize)]) -> Result<SplittingResult> {
    splitting_reduce_with(f, w, pairing, &SplitOptions::default())
}

pub fn splitting_reduce_with(
    f: &Poly,
    w: &WeightVector,
    pairing: &[(usize, usize)],
    opts: &SplitOptions,
) -> Result<SplittingResult> {
    let ring: Vec<usize> = (0..f.nvars()).collect();
    split_in_ring(f, w, pairing, &ring, opts)
}

/// Splitting with trace indices expressed through `ring`.
pub(crate) fn split_in_ring(
    f: &Poly,
    w: &WeightVector,
    pairing: &[(usize, usize)],
    ring: &[usize],
    opts: &SplitOptions,
) -> Result<SplittingResult> {
    let n = f.nvars();
    let w = w.normalize();
    let mut trace = StableEquivalenceTrace::default();
    // scale x_j so that every pair enters with coefficient 1
    let mut g = f.clone();
    let mut scale_map: Vec<Poly> = (0..n).map(|i| Poly::var(n, i)).collect();
    let mut scaled = false;
    for &(x, z) in pairing {
        let mut e = crate::poly::Exponent::zero(n);
        e.0[x] += 1;
        e.0[z] += 1;
        let c = f.coeff(&e);
        if c.is_zero() {
            return Err(Error::PatternUnmet("a paired product is missing from the principal part".into()));
        }
        if !c.is_one() {
            scale_map[x] = Poly::var(n, x).scale(&c.recip());
            scaled = true;
        }
    }
    if scaled {
        g = g.substitute(&scale_map)?;
        trace.push(TraceStep::LinearChange {
            ring: ring.to_vec(),
            map: scale_map,
            note: "rescale paired variables to unit coefficients".into(),
        });
    }
    let y: Vec<usize> = (0..n).filter(|k| !pairing.iter().any(|&(x, z)| x == *k || z == *k)).collect();
    let wy = w.select(&y);
    if y.is_empty() {
        let state = ReductionState::new(&g, &w, pairing, 1)?;
        trace.push(TraceStep::HyperbolicToDiagonal { pairs: map_pairs(pairing, ring) });
        for &(x, z) in pairing {
            trace.push(TraceStep::RemoveSquarePair { x: ring[x], z: ring[z] });
        }
        return Ok(SplittingResult {
            core: Poly::zero(0),
            core_indices: vec![],
            core_weights: wy,
            iterations: 0,
            milnor_bound: 1,
            milnor_fallback: false,
            remainder_order: state.r.order(),
            a1: true,
            trace,
            summaries: vec![state.summary()],
            states: if opts.keep_states { vec![state] } else { vec![] },
        });
    }
    let probe = ReductionState::new(&g, &w, pairing, 1)?;
    let f0y = probe.f0.project(&y)?;
    let (m_bound, fallback) = match opts.milnor {
        Some(m) => (m, false),
        None => block_milnor(&f0y, &wy)?,
    };
    let budget = opts.budget.unwrap_or(4 * m_bound as usize);
    let mut state = ReductionState { milnor_bound: m_bound, ..probe };
    if !state.reconstruction_holds() || !state.bounds_hold() {
        return Err(Error::Invariant("initial splitting state violates its invariants".into()));
    }
    let mut summaries = vec![state.summary()];
    let mut states = Vec::new();
    let mut iterations = 0;
    while !state.is_done() {
        if iterations >= budget {
            return Err(Error::Budget(format!(
                "splitting did not push the remainder beyond degree {} within {} iterations",
                m_bound + 1,
                budget
            )));
        }
        let next = decompose_step(&state)?;
        if opts.keep_states {
            states.push(std::mem::replace(&mut state, next));
        } else {
            state = next;
        }
        iterations += 1;
        summaries.push(state.summary());
    }
    let core = (&state.f0 + &state.h).project(&y)?;
    // Psi = (x + Gamma, y, z + Delta) brings f - R to f0 + H + sum X_j Z_j
    let mut psi: Vec<Poly> = (0..n).map(|i| Poly::var(n, i)).collect();
    for (j, &(x, z)) in pairing.iter().enumerate() {
        psi[x] = Poly::var(n, x) + state.gamma[j].clone();
        psi[z] = Poly::var(n, z) + state.delta[j].clone();
    }
    if psi.iter().enumerate().any(|(i, p)| *p != Poly::var(n, i)) {
        let degree = (m_bound as u32 + 1).min(INVERSE_DEGREE_CAP);
        let inverse = invert_map(&psi, degree)?;
        trace.push(TraceStep::PolynomialChange {
            ring: ring.to_vec(),
            map: psi,
            inverse,
            verified_degree: Some(degree),
        });
    }
    trace.push(TraceStep::Splitting {
        ring: ring.to_vec(),
        pairing: map_pairs(pairing, ring),
        iterations,
        remainder_order: state.r.order(),
        discarded_order: state.discarded.order(),
    });
    trace.push(TraceStep::HyperbolicToDiagonal { pairs: map_pairs(pairing, ring) });
    for &(x, z) in pairing {
        trace.push(TraceStep::RemoveSquarePair { x: ring[x], z: ring[z] });
    }
    if opts.keep_states {
        states.push(state.clone());
    }
    Ok(SplittingResult {
        core,
        core_indices: y,
        core_weights: wy,
        iterations,
        milnor_bound: m_bound,
        milnor_fallback: fallback,
        remainder_order: state.r.order(),
        a1: false,
        trace,
        summaries,
        states,
    })
}

fn map_pairs(pairing: &[(usize, usize)], ring: &[usize]) -> Vec<(usize, usize)> {
    pairing.iter().map(|&(x, z)| (ring[x], ring[z])).collect()
}

/// `f + z_{n+1}^2`.
pub fn add_square(f: &Poly) -> Poly {
    let n = f.nvars();
    let g = f.extend_vars(1);
    let u = Poly::var(n + 1, n);
    g + &u * &u
}

/// The type of [`add_square`]: weight 1/2 appended.
pub fn add_square_type(w: &WeightVector) -> WeightVector {
    w.normalize().push(half())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse;
    use crate::rational::{q, qi};

    fn vars(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn single_hand_checked_step() {
        let v = vars(&["x", "y", "z"]);
        let f = parse("y^3 + x*z + x*y^2", &v).unwrap();
        let w = WeightVector::normalized(vec![half(), q(1, 3), half()]);
        let s = ReductionState::new(&f, &w, &[(0, 2)], 2).unwrap();
        assert_eq!(s.r, parse("x*y^2", &v).unwrap());
        let t = decompose_step(&s).unwrap();
        assert_eq!(t.delta[0], parse("y^2", &v).unwrap());
        assert!(t.gamma[0].is_zero());
        assert!(t.h.is_zero());
        assert!(t.r.is_zero());
        let res = splitting_reduce(&f, &w, &[(0, 2)]).unwrap();
        assert_eq!(res.core, parse("y^3", &vars(&["y"])).unwrap());
        assert_eq!(res.trace.removed_pairs(), vec![(0, 2)]);
    }

    #[test]
    fn zero_remainder_is_a_fixed_point() {
        let v = vars(&["x", "y", "z"]);
        let f = parse("y^3 + x*z", &v).unwrap();
        let w = WeightVector::normalized(vec![half(), q(1, 3), half()]);
        let s = ReductionState::new(&f, &w, &[(0, 2)], 2).unwrap();
        let t = decompose_step(&s).unwrap();
        assert!(t.r.is_zero() && t.h.is_zero());
        assert_eq!(t.m, 2);
    }

    #[test]
    fn hyperbolic_only_is_a1() {
        let v = vars(&["x", "z"]);
        let f = parse("x*z", &v).unwrap();
        let res = splitting_reduce(&f, &WeightVector::normalized(vec![half(), half()]), &[(0, 1)]).unwrap();
        assert!(res.a1);
        assert_eq!(res.core.nvars(), 0);
    }

    #[test]
    fn tail_in_the_unpaired_block() {
        let v = vars(&["x", "y", "z"]);
        let f = parse("y^5 + x*z + y^6", &v).unwrap();
        let w = WeightVector::normalized(vec![half(), q(1, 5), half()]);
        let res = splitting_reduce(&f, &w, &[(0, 2)]).unwrap();
        assert_eq!(res.core, parse("y^5 + y^6", &vars(&["y"])).unwrap());
        assert_eq!(res.milnor_bound, 4);
    }

    #[test]
    fn mixed_tail_terminates_with_checked_states() {
        let v = vars(&["x", "y", "z"]);
        let f = parse("y^5 + x*z + x*y^3 + y^3*z + x^2*y^2 + y*z^3", &v).unwrap();
        let w = WeightVector::normalized(vec![half(), q(1, 5), half()]);
        let res = splitting_reduce_with(&f, &w, &[(0, 2)], &SplitOptions { keep_states: true, ..Default::default() }).unwrap();
        assert!(res.iterations <= 16);
        assert!(res.summaries.iter().all(|s| s.reconstruction_ok && s.bounds_ok));
        assert!(res.core.order() == Some(5));
    }

    #[test]
    fn squares() {
        let v = vars(&["x", "y"]);
        let f = parse("x^3 + y^3", &v).unwrap();
        assert_eq!(add_square(&f), parse("x^3 + y^3 + z^2", &vars(&["x", "y", "z"])).unwrap());
        assert_eq!(add_square(&Poly::zero(1)), parse("z^2", &vars(&["x", "z"])).unwrap());
        let w = WeightVector::normalized(vec![q(1, 3), q(1, 3)]);
        assert_eq!(add_square_type(&w), WeightVector::normalized(vec![q(1, 3), q(1, 3), half()]));
        let _ = qi(0);
    }
}
