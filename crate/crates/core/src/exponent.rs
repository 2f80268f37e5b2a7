//! Closed-form Łojasiewicz exponents from weight data.

use std::cmp::Ordering;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::poly::WeightVector;
use crate::rational::{fmt_q, half, qi, Q};

/// Which closed formula produced an exponent value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Formula {
    /// `min(max(w_i - 1), prod(w_i - 1))` for positive weights, `n <= 3`.
    Thm1,
    /// `max(1/l_i - 1)` for weights in `(0, 1/2]`.
    Thm3,
    /// `1/l_min - 1` over the reduced weight multiset.
    Thm4,
    /// The multiset formula on eigenvalue real parts of a cofactor Jacobian.
    Thm5,
    /// The three-variable formula with weights 0 and 1 counted as 1/2.
    Cor3,
}

impl Formula {
    pub fn as_str(self) -> &'static str {
        match self {
            Formula::Thm1 => "thm1",
            Formula::Thm3 => "thm3",
            Formula::Thm4 => "thm4",
            Formula::Thm5 => "thm5",
            Formula::Cor3 => "cor3",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExponentData {
    pub weights: WeightVector,
    /// `1/l_i`, absent for `l_i` in `{0, 1}`.
    pub reciprocals: Vec<Option<Q>>,
    /// The weights in ascending order.
    pub l: Vec<Q>,
    /// `[1 - a : a > 1/2]` in ascending order.
    pub l_minus: Vec<Q>,
    /// `(L \ L_minus) ∪ {1/2}`, ascending, without repeats.
    pub l_zero: Vec<Q>,
    pub l_min: Q,
    pub value: Q,
}

impl Serialize for ExponentData {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            weights: Vec<String>,
            reciprocals: Vec<Option<String>>,
            l: Vec<String>,
            l_minus: Vec<String>,
            l_zero: Vec<String>,
            l_min: String,
            value: String,
        }
        let strs = |v: &[Q]| v.iter().map(fmt_q).collect::<Vec<_>>();
        Repr {
            weights: self.weights.to_strings(),
            reciprocals: self.reciprocals.iter().map(|r| r.as_ref().map(fmt_q)).collect(),
            l: strs(&self.l),
            l_minus: strs(&self.l_minus),
            l_zero: strs(&self.l_zero),
            l_min: fmt_q(&self.l_min),
            value: fmt_q(&self.value),
        }
        .serialize(s)
    }
}

/// Multiset formula `1/l_min - 1` for a weakly semiquasihomogeneous type.
pub fn loj_wsqh(w: &WeightVector) -> Result<ExponentData> {
    let w = w.normalize();
    let h = half();
    let mut l: Vec<Q> = w.weights().to_vec();
    l.sort();
    let mut l_minus: Vec<Q> = l.iter().filter(|a| **a > h).map(|a| Q::one() - a).collect();
    l_minus.sort();
    let mut rest = l.clone();
    for b in &l_minus {
        match rest.iter().position(|a| a == b) {
            Some(k) => {
                rest.remove(k);
            }
            None => {
                return Err(Error::InvalidWeights(format!(
                    "weight {} has no partner {} in the type",
                    fmt_q(&(Q::one() - b)),
                    fmt_q(b)
                )))
            }
        }
    }
    rest.push(h.clone());
    rest.sort();
    rest.dedup();
    let l_min = rest[0].clone();
    if !l_min.is_positive() {
        return Err(Error::InvalidWeights(format!(
            "unpaired non-positive weight {} in the type",
            fmt_q(&l_min)
        )));
    }
    let value = l_min.recip() - Q::one();
    let reciprocals = w
        .weights()
        .iter()
        .map(|x| (!x.is_zero() && !x.is_one()).then(|| x.recip()))
        .collect();
    Ok(ExponentData { weights: w, reciprocals, l, l_minus, l_zero: rest, l_min, value })
}

/// `max(1/l_i - 1)` for weights in `(0, 1/2]`.
pub fn loj_sqh(w: &WeightVector) -> Result<Q> {
    let w = w.normalize();
    if !w.is_quasihomogeneous_range() {
        return Err(Error::InvalidWeights(format!("weights of {w} are not all in (0, 1/2]")));
    }
    Ok(w.weights().iter().map(|l| l.recip() - Q::one()).max().expect("non-empty type"))
}

/// `min(max(w_i - 1), prod(w_i - 1))` with `w_i = 1/l_i`, or 2 when
/// `l_i ∈ {0, 1}`; fewer than three weights are padded with 1/2.
pub fn loj_wqh_n3(w: &WeightVector) -> Result<Q> {
    let w = w.normalize();
    if w.len() > 3 {
        return Err(Error::NotApplicable(format!(
            "the three-variable formula does not hold for {} variables",
            w.len()
        )));
    }
    let mut ws: Vec<Q> = w
        .weights()
        .iter()
        .map(|l| if l.is_zero() || l.is_one() { qi(2) } else { l.recip() })
        .collect();
    while ws.len() < 3 {
        ws.push(qi(2));
    }
    let shifted: Vec<Q> = ws.iter().map(|x| x - Q::one()).collect();
    let max = shifted.iter().max().cloned().expect("three entries");
    let prod = shifted.iter().fold(Q::one(), |a, b| a * b);
    Ok(max.min(prod))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Consistency {
    Agree { value: String },
    Disagree { three_variable: String, multiset: String },
}

/// Compares the three-variable formula with the multiset formula.
pub fn consistency_n3(w: &WeightVector) -> Result<Consistency> {
    if w.len() != 3 {
        return Err(Error::Arity { expected: 3, got: w.len() });
    }
    let a = loj_wqh_n3(w)?;
    let b = loj_wsqh(w)?.value;
    Ok(if a == b {
        Consistency::Agree { value: fmt_q(&a) }
    } else {
        Consistency::Disagree { three_variable: fmt_q(&a), multiset: fmt_q(&b) }
    })
}

/// The multiset formula evaluated on certified weight intervals.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntervalExponentData {
    pub l: Vec<Interval>,
    pub l_minus: Vec<Interval>,
    pub l_zero: Vec<Interval>,
    pub l_min: Interval,
    pub value: Interval,
}

/// Interval version of [`loj_wsqh`]; every comparison must be decided by
/// the enclosures, otherwise the result is inconclusive.
pub fn loj_wsqh_interval(weights: &[Interval]) -> Result<IntervalExponentData> {
    let h = half();
    let mut l = weights.to_vec();
    l.sort_by(|a, b| a.lo.cmp(&b.lo).then(a.hi.cmp(&b.hi)));
    let mut l_minus = Vec::new();
    for a in &l {
        match a.compare(&h) {
            Some(Ordering::Greater) => l_minus.push(a.one_minus()),
            Some(_) => {}
            None => {
                return Err(Error::Inconclusive(format!("weight enclosure {a} straddles 1/2")));
            }
        }
    }
    let mut rest = l.clone();
    for b in &l_minus {
        let hits: Vec<usize> = (0..rest.len()).filter(|&k| rest[k].overlaps(b)).collect();
        let Some(&first) = hits.first() else {
            return Err(Error::InvalidWeights(format!("enclosure {b} has no partner among the weights")));
        };
        // several overlapping candidates are interchangeable only if they
        // overlap each other as well
        if hits.iter().any(|&k| !rest[k].overlaps(&rest[first])) {
            return Err(Error::Inconclusive(format!("partner of {b} is ambiguous at this precision")));
        }
        rest.remove(first);
    }
    rest.push(Interval::point(h));
    let mut l_zero: Vec<Interval> = Vec::new();
    for x in rest {
        if !l_zero.contains(&x) {
            l_zero.push(x);
        }
    }
    l_zero.sort_by(|a, b| a.lo.cmp(&b.lo).then(a.hi.cmp(&b.hi)));
    let l_min = Interval::min_of(&l_zero).expect("1/2 is always present");
    let value = l_min.recip_minus_one().ok_or_else(|| {
        Error::Inconclusive(format!("minimal weight enclosure {l_min} is not certainly positive"))
    })?;
    Ok(IntervalExponentData { l, l_minus, l_zero, l_min, value })
}
