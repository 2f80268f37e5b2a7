use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::rational::{fmt_q, half, simplest_between, Q};

/// Closed rational interval `[lo, hi]`.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct Interval {
    pub lo: Q,
    pub hi: Q,
}

impl Interval {
    pub fn new(lo: Q, hi: Q) -> Self {
        assert!(lo <= hi, "empty interval");
        Interval { lo, hi }
    }

    pub fn point(x: Q) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn width(&self) -> Q {
        &self.hi - &self.lo
    }

    pub fn mid(&self) -> Q {
        (&self.lo + &self.hi) * half()
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn as_point(&self) -> Option<&Q> {
        self.is_point().then_some(&self.lo)
    }

    pub fn contains(&self, x: &Q) -> bool {
        self.lo <= *x && *x <= self.hi
    }

    pub fn overlaps(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    /// `1 - self`.
    pub fn one_minus(&self) -> Interval {
        Interval { lo: Q::one() - &self.hi, hi: Q::one() - &self.lo }
    }

    pub fn add(&self, other: &Interval) -> Interval {
        Interval { lo: &self.lo + &other.lo, hi: &self.hi + &other.hi }
    }

    /// `1/self - 1`, defined for intervals of positive numbers.
    pub fn recip_minus_one(&self) -> Option<Interval> {
        if !self.lo.is_positive() {
            return None;
        }
        Some(Interval { lo: self.hi.recip() - Q::one(), hi: self.lo.recip() - Q::one() })
    }

    /// Sign relative to `x`: `Some(Less)` if entirely below, `Some(Greater)`
    /// if entirely above, `Some(Equal)` only for the point `x` itself,
    /// `None` when the interval straddles `x`.
    pub fn compare(&self, x: &Q) -> Option<std::cmp::Ordering> {
        use std::cmp::Ordering::*;
        if self.hi < *x {
            Some(Less)
        } else if self.lo > *x {
            Some(Greater)
        } else if self.lo == *x && self.hi == *x {
            Some(Equal)
        } else {
            None
        }
    }

    /// The unique rational with denominator at most `cap` inside the
    /// interval, if there is exactly one.
    pub fn unique_rational(&self, cap: u64) -> Option<Q> {
        if let Some(p) = self.as_point() {
            return Some(p.clone());
        }
        let cap_q = Q::from_integer(cap.into());
        // two rationals with denominators <= cap differ by at least 1/cap^2
        if self.width() * &cap_q * &cap_q >= Q::one() {
            return None;
        }
        let s = simplest_between(&self.lo, &self.hi);
        (s.denom() <= cap_q.numer()).then_some(s)
    }

    pub fn min_of<'a>(items: impl IntoIterator<Item = &'a Interval>) -> Option<Interval> {
        items.into_iter().fold(None, |acc: Option<Interval>, x| match acc {
            None => Some(x.clone()),
            Some(a) => Some(Interval {
                lo: if x.lo < a.lo { x.lo.clone() } else { a.lo },
                hi: if x.hi < a.hi { x.hi.clone() } else { a.hi },
            }),
        })
    }

    pub fn zero() -> Interval {
        Interval::point(Q::zero())
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_point() {
            write!(f, "{}", fmt_q(&self.lo))
        } else {
            write!(f, "[{}, {}]", fmt_q(&self.lo), fmt_q(&self.hi))
        }
    }
}

impl Serialize for Interval {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            lo: String,
            hi: String,
        }
        Repr { lo: fmt_q(&self.lo), hi: fmt_q(&self.hi) }.serialize(s)
    }
}
