use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{Exponent, Poly};
use crate::error::{Error, Result};
use crate::rational::{fmt_q, parse_rational, Q};

/// A weight type `(d; l_1, ..., l_n)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct WeightVector {
    level: Q,
    weights: Vec<Q>,
}

impl WeightVector {
    pub fn new(level: Q, weights: Vec<Q>) -> Result<Self> {
        if !level.is_positive() {
            return Err(Error::InvalidWeights(format!("level must be positive, got {}", fmt_q(&level))));
        }
        Ok(WeightVector { level, weights })
    }

    /// Type `(1; l_1, ..., l_n)`.
    pub fn normalized(weights: Vec<Q>) -> Self {
        WeightVector { level: Q::one(), weights }
    }

    /// Parses `d;l1,l2,...` or `l1,l2,...` (level 1 implied).
    pub fn parse(text: &str) -> Result<Self> {
        let (level, rest) = match text.split_once(';') {
            Some((d, rest)) => (parse_rational(d)?, rest),
            None => (Q::one(), text),
        };
        let weights = rest
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(parse_rational)
            .collect::<Result<Vec<_>>>()?;
        if weights.is_empty() {
            return Err(Error::InvalidWeights("no weights given".into()));
        }
        WeightVector::new(level, weights)
    }

    pub fn level(&self) -> &Q {
        &self.level
    }

    pub fn weights(&self) -> &[Q] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn is_normalized(&self) -> bool {
        self.level.is_one()
    }

    /// `(1; l_1/d, ..., l_n/d)`.
    pub fn normalize(&self) -> WeightVector {
        WeightVector {
            level: Q::one(),
            weights: self.weights.iter().map(|l| l / &self.level).collect(),
        }
    }

    /// All weights rational in `(0, 1/2]` relative to the level.
    pub fn is_quasihomogeneous_range(&self) -> bool {
        let half = &self.level / Q::from_integer(2.into());
        self.weights.iter().all(|l| l.is_positive() && *l <= half)
    }

    pub fn push(&self, l: Q) -> WeightVector {
        let mut weights = self.weights.clone();
        weights.push(l);
        WeightVector { level: self.level.clone(), weights }
    }

    pub fn select(&self, idx: &[usize]) -> WeightVector {
        WeightVector {
            level: self.level.clone(),
            weights: idx.iter().map(|&i| self.weights[i].clone()).collect(),
        }
    }

    /// Weight list as strings `p/q`.
    pub fn to_strings(&self) -> Vec<String> {
        self.weights.iter().map(fmt_q).collect()
    }
}

impl fmt::Display for WeightVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}; {})", fmt_q(&self.level), self.to_strings().join(", "))
    }
}

impl Serialize for WeightVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            level: String,
            weights: Vec<String>,
        }
        Repr { level: fmt_q(&self.level), weights: self.to_strings() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for WeightVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            level: String,
            weights: Vec<String>,
        }
        let r = Repr::deserialize(d)?;
        let level = parse_rational(&r.level).map_err(serde::de::Error::custom)?;
        let weights = r
            .weights
            .iter()
            .map(|w| parse_rational(w))
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        WeightVector::new(level, weights).map_err(serde::de::Error::custom)
    }
}

/// `<a, l>` for an exponent vector `a`.
pub fn weighted_degree(a: &Exponent, w: &WeightVector) -> Q {
    assert_eq!(a.len(), w.len(), "exponent and weight lengths differ");
    a.0.iter()
        .zip(&w.weights)
        .filter(|(k, _)| **k != 0)
        .fold(Q::zero(), |acc, (k, l)| acc + l * Q::from_integer((*k).into()))
}

impl Poly {
    /// Minimum weighted degree over the support; `None` stands for `+inf`.
    pub fn weighted_order(&self, w: &WeightVector) -> Option<Q> {
        self.support().map(|e| weighted_degree(e, w)).min()
    }

    /// Splits into the part at weighted degree exactly `level` and the rest.
    pub fn split_at_level(&self, w: &WeightVector, level: &Q) -> (Poly, Poly) {
        let on = self.filter_terms(|e, _| weighted_degree(e, w) == *level);
        let off = self.filter_terms(|e, _| weighted_degree(e, w) != *level);
        (on, off)
    }
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
    fn degrees_on_weak_type() {
        let w = WeightVector::normalized(vec![qi(-2), qi(3), q(1, 3)]);
        assert_eq!(weighted_degree(&Exponent(vec![1, 1, 0]), &w), qi(1));
        assert_eq!(weighted_degree(&Exponent(vec![4, 3, 0]), &w), qi(1));
        assert_eq!(weighted_degree(&Exponent(vec![0, 0, 0]), &w), qi(0));
    }

    #[test]
    fn weighted_orders() {
        let v = vars(&["x", "y", "z"]);
        let p = parse("x*y + x^4*y^3 + (z+y)^3", &v).unwrap();
        let w = WeightVector::normalized(vec![q(2, 3), q(1, 3), q(1, 3)]);
        assert_eq!(p.weighted_order(&w), Some(qi(1)));
        assert_eq!(Poly::zero(3).weighted_order(&w), None);
        let p = parse("z^3 + y^5", &v).unwrap();
        let w = WeightVector::normalized(vec![q(1, 2), q(1, 5), q(1, 2)]);
        assert_eq!(p.weighted_order(&w), Some(qi(1)));
    }

    #[test]
    fn parse_and_normalize() {
        let w = WeightVector::parse("2; 1, 2/3").unwrap();
        assert_eq!(w.normalize(), WeightVector::normalized(vec![q(1, 2), q(1, 3)]));
        let w = WeightVector::parse("1/2,1/5,1/2").unwrap();
        assert!(w.is_normalized());
        assert!(w.is_quasihomogeneous_range());
        assert!(WeightVector::parse("0; 1").is_err());
        assert!(WeightVector::parse("-1; 1").is_err());
    }
}
