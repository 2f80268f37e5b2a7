//! Mora's tangent-cone normal form and standard-basis completion for the
//! anti-graded lexicographic local order.
//!
//! Every polynomial handled here can carry a record of how it was built from
//! the ideal generators (and, during membership tests, from the target), so
//! cofactors come out as exact polynomial identities.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::poly::{Exponent, Poly};
use crate::rational::Q;

/// Key ordering the leading (local) term first: lower total degree wins,
/// ties go to the lexicographically larger exponent.
#[derive(Clone, PartialEq, Eq, Debug)]
pub(crate) struct LocalKey(pub Exponent);

impl Ord for LocalKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .degree()
            .cmp(&other.0.degree())
            .then_with(|| other.0 .0.cmp(&self.0 .0))
    }
}

impl PartialOrd for LocalKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// `poly = target_coeff * target + sum_i repr[i] * gen_i`.
#[derive(Clone, Debug)]
pub(crate) struct Track {
    pub target_coeff: Poly,
    pub repr: Vec<Poly>,
}

fn cut(p: Poly, trunc: Option<u32>) -> Poly {
    match trunc {
        Some(t) => p.truncate(t),
        None => p,
    }
}

impl Track {
    fn sub_scaled(&mut self, other: &Track, e: &Exponent, c: &Q, trunc: Option<u32>) {
        self.target_coeff = cut(&self.target_coeff - &other.target_coeff.mul_term(e, c), trunc);
        for (r, o) in self.repr.iter_mut().zip(&other.repr) {
            if !o.is_zero() {
                *r = cut(&*r - &o.mul_term(e, c), trunc);
            }
        }
    }

    fn scale(&mut self, c: &Q) {
        self.target_coeff = self.target_coeff.scale(c);
        for r in &mut self.repr {
            *r = r.scale(c);
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn combine(a: &Track, ea: &Exponent, ca: &Q, b: &Track, eb: &Exponent, cb: &Q, trunc: Option<u32>) -> Track {
        Track {
            target_coeff: cut(&a.target_coeff.mul_term(ea, ca) - &b.target_coeff.mul_term(eb, cb), trunc),
            repr: a
                .repr
                .iter()
                .zip(&b.repr)
                .map(|(x, y)| cut(&x.mul_term(ea, ca) - &y.mul_term(eb, cb), trunc))
                .collect(),
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Elem {
    pub nvars: usize,
    pub terms: BTreeMap<LocalKey, Q>,
    pub track: Option<Track>,
}

impl Elem {
    pub fn from_poly(p: &Poly, track: Option<Track>) -> Self {
        Elem {
            nvars: p.nvars(),
            terms: p.terms().map(|(e, c)| (LocalKey(e.clone()), c.clone())).collect(),
            track,
        }
    }

    /// Drops every term (and tracking term) above degree `t`.
    pub fn truncated(mut self, trunc: Option<u32>) -> Self {
        if let Some(t) = trunc {
            self.terms.retain(|k, _| k.0.degree() <= t);
            if let Some(tr) = self.track.as_mut() {
                tr.target_coeff = tr.target_coeff.truncate(t);
                for r in &mut tr.repr {
                    *r = r.truncate(t);
                }
            }
        }
        self
    }

    pub fn to_poly(&self) -> Poly {
        Poly::from_terms(self.nvars, self.terms.iter().map(|(k, c)| (k.0.clone(), c.clone())))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn lead(&self) -> (&Exponent, &Q) {
        let (k, c) = self.terms.iter().next().expect("leading term of zero");
        (&k.0, c)
    }

    pub fn lm(&self) -> &Exponent {
        self.lead().0
    }

    pub fn max_degree(&self) -> u32 {
        self.terms.keys().next_back().map(|k| k.0.degree()).unwrap_or(0)
    }

    pub fn ecart(&self) -> u32 {
        self.max_degree() - self.lm().degree()
    }

    /// `self -= c * z^e * other`.
    fn sub_scaled(&mut self, other: &Elem, e: &Exponent, c: &Q, trunc: Option<u32>) {
        let cap = trunc.unwrap_or(u32::MAX);
        for (k, x) in &other.terms {
            if k.0.degree() + e.degree() > cap {
                continue;
            }
            let key = LocalKey(k.0.mul(e));
            let v = x * c;
            match self.terms.entry(key) {
                std::collections::btree_map::Entry::Vacant(slot) => {
                    slot.insert(-v);
                }
                std::collections::btree_map::Entry::Occupied(mut slot) => {
                    *slot.get_mut() -= v;
                    if slot.get().is_zero() {
                        slot.remove();
                    }
                }
            }
        }
        if let (Some(t), Some(o)) = (self.track.as_mut(), other.track.as_ref()) {
            t.sub_scaled(o, e, c, trunc);
        }
    }

    /// One reduction step of the leading term of `self` by `other`.
    fn reduce_lead_by(&mut self, other: &Elem, trunc: Option<u32>) {
        let (lm, lc) = {
            let (e, c) = self.lead();
            (e.clone(), c.clone())
        };
        let (om, oc) = other.lead();
        let factor = lc / oc;
        let shift = lm.div(om);
        self.sub_scaled(other, &shift, &factor, trunc);
    }

    pub fn make_monic(&mut self) {
        let lc = self.lead().1.clone();
        if lc.is_one() {
            return;
        }
        let inv = lc.recip();
        for c in self.terms.values_mut() {
            *c *= &inv;
        }
        if let Some(t) = self.track.as_mut() {
            t.scale(&inv);
        }
    }

    fn spoly(a: &Elem, b: &Elem, trunc: Option<u32>) -> Elem {
        let (ma, ca) = a.lead();
        let (mb, cb) = b.lead();
        let l = ma.lcm(mb);
        let ea = l.div(ma);
        let eb = l.div(mb);
        let fa = ca.recip();
        let fb = cb.recip();
        let mut terms: BTreeMap<LocalKey, Q> = BTreeMap::new();
        for (k, x) in &a.terms {
            *terms.entry(LocalKey(k.0.mul(&ea))).or_insert_with(Q::zero) += x * &fa;
        }
        for (k, x) in &b.terms {
            *terms.entry(LocalKey(k.0.mul(&eb))).or_insert_with(Q::zero) -= x * &fb;
        }
        let cap = trunc.unwrap_or(u32::MAX);
        terms.retain(|k, c| !c.is_zero() && k.0.degree() <= cap);
        let track = match (&a.track, &b.track) {
            (Some(ta), Some(tb)) => Some(Track::combine(ta, &ea, &fa, tb, &eb, &fb, trunc)),
            _ => None,
        };
        Elem { nvars: a.nvars, terms, track }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct MoraBudget {
    /// Largest total degree an intermediate polynomial may reach.
    pub degree_bound: u32,
    /// Largest number of terms an intermediate polynomial may hold.
    pub max_terms: usize,
    /// Largest number of reduction steps over the whole computation.
    pub max_steps: usize,
    /// Work modulo the monomials of degree above this value.
    pub truncate: Option<u32>,
}

impl MoraBudget {
    pub fn with_degree(degree_bound: u32) -> Self {
        MoraBudget { degree_bound, max_terms: 400_000, max_steps: 5_000_000, truncate: None }
    }

    /// Computation modulo `m^(t+1)`; every chain of reductions is finite
    /// there, so no intermediate results are kept as reducers.
    pub fn truncated(t: u32) -> Self {
        MoraBudget { degree_bound: t, max_terms: 400_000, max_steps: 5_000_000, truncate: Some(t) }
    }
}

pub(crate) struct Counter {
    pub steps: usize,
}

/// Mora's normal form of `h` with respect to `basis`; the returned element
/// equals `u * h_in - sum(...)` for a unit `u` with `u(0) = 1`.
pub(crate) fn normal_form(h: Elem, basis: &[Elem], budget: &MoraBudget, counter: &mut Counter) -> Result<Elem> {
    let trunc = budget.truncate;
    let mut h = h.truncated(trunc);
    let mut extra: Vec<Elem> = Vec::new();
    loop {
        if h.is_zero() {
            return Ok(h);
        }
        if h.max_degree() > budget.degree_bound {
            return Err(Error::Budget(format!(
                "normal form reached degree {} above the bound {}",
                h.max_degree(),
                budget.degree_bound
            )));
        }
        if h.terms.len() > budget.max_terms {
            return Err(Error::Budget(format!("normal form exceeded {} terms", budget.max_terms)));
        }
        counter.steps += 1;
        if counter.steps > budget.max_steps {
            return Err(Error::Budget(format!("more than {} reduction steps", budget.max_steps)));
        }
        let lm = h.lm().clone();
        let mut best: Option<(u32, bool, usize)> = None;
        for (i, g) in basis.iter().enumerate() {
            if g.lm().divides(&lm) {
                let ec = g.ecart();
                if best.is_none_or(|(b, _, _)| ec < b) {
                    best = Some((ec, false, i));
                }
            }
        }
        for (i, g) in extra.iter().enumerate() {
            if g.lm().divides(&lm) {
                let ec = g.ecart();
                if best.is_none_or(|(b, _, _)| ec < b) {
                    best = Some((ec, true, i));
                }
            }
        }
        let Some((ec, from_extra, idx)) = best else {
            return Ok(h);
        };
        if trunc.is_none() && ec > h.ecart() {
            extra.push(h.clone());
        }
        let reducer = if from_extra { &extra[idx] } else { &basis[idx] };
        h.reduce_lead_by(reducer, trunc);
    }
}

/// Standard basis of the ideal generated by `gens` in the local ring at the
/// origin. When `track` is set every basis element carries its expression
/// in terms of `gens`.
pub(crate) fn standard_basis(gens: &[Poly], track: bool, budget: &MoraBudget) -> Result<Vec<Elem>> {
    let nvars = gens.first().map(Poly::nvars).unwrap_or(0);
    let ngens = gens.len();
    let mut counter = Counter { steps: 0 };
    let mut basis: Vec<Elem> = Vec::new();
    for (i, g) in gens.iter().enumerate() {
        if g.is_zero() {
            continue;
        }
        let t = track.then(|| Track {
            target_coeff: Poly::zero(nvars),
            repr: (0..ngens)
                .map(|j| if i == j { Poly::one(nvars) } else { Poly::zero(nvars) })
                .collect(),
        });
        let mut e = Elem::from_poly(g, t).truncated(budget.truncate);
        if e.is_zero() {
            continue;
        }
        e.make_monic();
        basis.push(e);
    }
    // pairs ordered by (degree of lcm of leading monomials, insertion)
    let mut pairs: Vec<(u32, usize, usize)> = Vec::new();
    for j in 0..basis.len() {
        for i in 0..j {
            push_pair(&mut pairs, &basis, i, j);
        }
    }
    while !pairs.is_empty() {
        let pos = pairs
            .iter()
            .enumerate()
            .min_by_key(|(_, p)| (p.0, p.2, p.1))
            .map(|(k, _)| k)
            .unwrap();
        let (_, i, j) = pairs.swap_remove(pos);
        let s = Elem::spoly(&basis[i], &basis[j], budget.truncate);
        if s.is_zero() {
            continue;
        }
        if s.max_degree() > budget.degree_bound {
            return Err(Error::Budget(format!(
                "s-polynomial of degree {} exceeds the bound {} after {} basis elements",
                s.max_degree(),
                budget.degree_bound,
                basis.len()
            )));
        }
        let mut h = normal_form(s, &basis, budget, &mut counter)?;
        if h.is_zero() {
            continue;
        }
        h.make_monic();
        basis.push(h);
        let k = basis.len() - 1;
        for i in 0..k {
            push_pair(&mut pairs, &basis, i, k);
        }
    }
    Ok(basis)
}

fn push_pair(pairs: &mut Vec<(u32, usize, usize)>, basis: &[Elem], i: usize, j: usize) {
    let a = basis[i].lm();
    let b = basis[j].lm();
    // product criterion: coprime leading monomials give a standard representation
    if a.is_coprime(b) {
        return;
    }
    pairs.push((a.lcm(b).degree(), i, j));
}

/// Removes elements whose leading monomial is divisible by another's.
pub(crate) fn minimalize(basis: Vec<Elem>) -> Vec<Elem> {
    let mut keep: Vec<Elem> = Vec::new();
    for (i, e) in basis.iter().enumerate() {
        let redundant = basis.iter().enumerate().any(|(j, o)| {
            j != i && o.lm().divides(e.lm()) && (o.lm() != e.lm() || j < i)
        });
        if !redundant {
            keep.push(e.clone());
        }
    }
    keep.sort_by_key(|a| LocalKey(a.lm().clone()));
    keep
}
