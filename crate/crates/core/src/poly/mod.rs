//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! Terms live in a `BTreeMap` keyed by [`Exponent`], whose ordering is
//! graded-lexicographic in the declared variable order, so iteration and
//! printing are canonical.

mod parse;
mod univariate;
mod weight;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{fmt_q, Q};

pub use parse::{parse, parse_with, ParseOptions, DEFAULT_EXPONENT_CAP};
pub use univariate::UniPoly;
pub use weight::{weighted_degree, WeightVector};

/// Exponent vector of a monomial. Ordered graded-lexicographically.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Exponent(pub Vec<u32>);

impl Exponent {
    pub fn zero(n: usize) -> Self {
        Exponent(vec![0; n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        Exponent(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn divides(&self, other: &Exponent) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn mul(&self, other: &Exponent) -> Exponent {
        Exponent(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self / other`; caller guarantees divisibility.
    pub fn div(&self, other: &Exponent) -> Exponent {
        Exponent(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn lcm(&self, other: &Exponent) -> Exponent {
        Exponent(self.0.iter().zip(&other.0).map(|(a, b)| *a.max(b)).collect())
    }

    pub fn is_coprime(&self, other: &Exponent) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| *a == 0 || *b == 0)
    }
}

impl Ord for Exponent {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Exponent, Q>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Q) -> Self {
        Self::monomial(nvars, Exponent::zero(nvars), c)
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Q::one())
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        Self::monomial(nvars, Exponent::unit(nvars, i), Q::one())
    }

    pub fn monomial(nvars: usize, exp: Exponent, c: Q) -> Self {
        assert_eq!(exp.len(), nvars);
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exp, c);
        }
        Poly { nvars, terms }
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Exponent, Q)>) -> Self {
        let mut p = Poly::zero(nvars);
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.constant_term().is_one()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Exponent, &Q)> + '_ {
        self.terms.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &Exponent> + '_ {
        self.terms.keys()
    }

    pub fn coeff(&self, e: &Exponent) -> Q {
        self.terms.get(e).cloned().unwrap_or_else(Q::zero)
    }

    pub fn constant_term(&self) -> Q {
        self.coeff(&Exponent::zero(self.nvars))
    }

    pub fn add_term(&mut self, e: Exponent, c: Q) {
        debug_assert_eq!(e.len(), self.nvars);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// Highest total degree; `None` for zero.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(Exponent::degree)
    }

    /// Lowest total degree (the order at the origin); `None` for zero.
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().next().map(Exponent::degree)
    }

    pub fn scale(&self, c: &Q) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect(),
        }
    }

    /// Multiplication by the monomial `c * z^e`.
    pub fn mul_term(&self, e: &Exponent, c: &Q) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(f, x)| (f.mul(e), x * c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut result = Poly::one(self.nvars);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = &result * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Formal partial derivative with respect to variable `i` (0-based).
    pub fn partial(&self, i: usize) -> Poly {
        assert!(i < self.nvars, "variable index out of range");
        let mut out = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            let a = e.0[i];
            if a == 0 {
                continue;
            }
            let mut d = e.clone();
            d.0[i] -= 1;
            out.terms.insert(d, c * Q::from_integer(a.into()));
        }
        out
    }

    pub fn gradient(&self) -> Vec<Poly> {
        (0..self.nvars).map(|i| self.partial(i)).collect()
    }

    /// Gradient with the `i`-th partial omitted.
    pub fn deleted_gradient(&self, i: usize) -> Vec<Poly> {
        assert!(i < self.nvars, "variable index out of range");
        (0..self.nvars).filter(|&j| j != i).map(|j| self.partial(j)).collect()
    }

    /// Drops every term of total degree above `max_degree`.
    pub fn truncate(&self, max_degree: u32) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.degree() <= max_degree)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    /// Keeps only the terms whose exponent satisfies `keep`.
    pub fn filter_terms(&self, mut keep: impl FnMut(&Exponent, &Q) -> bool) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(e, c)| keep(e, c))
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    /// Degree-1 homogeneous part as a coefficient vector.
    pub fn linear_coefficients(&self) -> Vec<Q> {
        (0..self.nvars).map(|i| self.coeff(&Exponent::unit(self.nvars, i))).collect()
    }

    /// Whether variable `i` occurs in some term.
    pub fn involves(&self, i: usize) -> bool {
        self.terms.keys().any(|e| e.0[i] > 0)
    }

    /// Exact composition `p(map_1, ..., map_n)`; the result lives in the
    /// ring of the map components.
    pub fn substitute(&self, map: &[Poly]) -> Result<Poly> {
        if map.len() != self.nvars {
            return Err(Error::Arity { expected: self.nvars, got: map.len() });
        }
        let target = match map.first() {
            Some(m) => m.nvars,
            None => 0,
        };
        if map.iter().any(|m| m.nvars != target) {
            return Err(Error::Invariant("substitution map components disagree on arity".into()));
        }
        let mut powers: Vec<Vec<Poly>> = vec![vec![Poly::one(target)]; self.nvars];
        let mut out = Poly::zero(target);
        for (e, c) in &self.terms {
            let mut term = Poly::constant(target, c.clone());
            for (i, &a) in e.0.iter().enumerate() {
                if a == 0 {
                    continue;
                }
                while powers[i].len() <= a as usize {
                    let next = powers[i].last().unwrap() * &map[i];
                    powers[i].push(next);
                }
                term = &term * &powers[i][a as usize];
            }
            out = out + term;
        }
        Ok(out)
    }

    /// Product with every term of degree above `max_degree` discarded.
    pub fn mul_truncated(&self, other: &Poly, max_degree: u32) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            let de = e.degree();
            if de > max_degree {
                continue;
            }
            for (f, d) in &other.terms {
                if de + f.degree() <= max_degree {
                    out.add_term(e.mul(f), c * d);
                }
            }
        }
        out
    }

    /// [`Poly::substitute`] modulo terms of degree above `max_degree`.
    pub fn substitute_truncated(&self, map: &[Poly], max_degree: u32) -> Result<Poly> {
        if map.len() != self.nvars {
            return Err(Error::Arity { expected: self.nvars, got: map.len() });
        }
        let target = map.first().map_or(0, |m| m.nvars);
        let mut powers: Vec<Vec<Poly>> = vec![vec![Poly::one(target)]; self.nvars];
        let mut out = Poly::zero(target);
        for (e, c) in &self.terms {
            let mut term = Poly::constant(target, c.clone());
            for (i, &a) in e.0.iter().enumerate() {
                if a == 0 {
                    continue;
                }
                while powers[i].len() <= a as usize {
                    let next = powers[i].last().unwrap().mul_truncated(&map[i], max_degree);
                    powers[i].push(next);
                }
                term = term.mul_truncated(&powers[i][a as usize], max_degree);
                if term.is_zero() {
                    break;
                }
            }
            out = out + term;
        }
        Ok(out)
    }

    /// Composition with a univariate curve `t -> (phi_1(t), ..., phi_n(t))`.
    pub fn compose_curve(&self, curve: &[UniPoly]) -> Result<UniPoly> {
        if curve.len() != self.nvars {
            return Err(Error::Arity { expected: self.nvars, got: curve.len() });
        }
        let mut powers: Vec<Vec<UniPoly>> = vec![vec![UniPoly::one()]; self.nvars];
        let mut out = UniPoly::zero();
        for (e, c) in &self.terms {
            let mut term = UniPoly::constant(c.clone());
            for (i, &a) in e.0.iter().enumerate() {
                if a == 0 {
                    continue;
                }
                while powers[i].len() <= a as usize {
                    let next = powers[i].last().unwrap().mul(&curve[i]);
                    powers[i].push(next);
                }
                term = term.mul(&powers[i][a as usize]);
                if term.is_zero() {
                    break;
                }
            }
            out = out.add(&term);
        }
        Ok(out)
    }

    /// Re-expresses the polynomial in a ring with `new_nvars` variables,
    /// sending variable `i` to `positions[i]`.
    pub fn embed(&self, new_nvars: usize, positions: &[usize]) -> Poly {
        assert_eq!(positions.len(), self.nvars);
        let mut out = Poly::zero(new_nvars);
        for (e, c) in &self.terms {
            let mut f = vec![0; new_nvars];
            for (i, &a) in e.0.iter().enumerate() {
                f[positions[i]] += a;
            }
            out.add_term(Exponent(f), c.clone());
        }
        out
    }

    /// Restricts to the variables listed in `keep`, which must cover every
    /// variable the polynomial involves.
    pub fn project(&self, keep: &[usize]) -> Result<Poly> {
        let mut out = Poly::zero(keep.len());
        for (e, c) in &self.terms {
            let dropped: u32 = (0..self.nvars).filter(|i| !keep.contains(i)).map(|i| e.0[i]).sum();
            if dropped > 0 {
                return Err(Error::Invariant("projection drops a variable the polynomial uses".into()));
            }
            out.add_term(Exponent(keep.iter().map(|&i| e.0[i]).collect()), c.clone());
        }
        Ok(out)
    }

    /// Appends `extra` fresh variables at the end.
    pub fn extend_vars(&self, extra: usize) -> Poly {
        let n = self.nvars + extra;
        let positions: Vec<usize> = (0..self.nvars).collect();
        self.embed(n, &positions)
    }

    /// Canonical text: graded-lex descending with explicit `*` and `^`.
    pub fn to_text(&self, vars: &[String]) -> String {
        assert_eq!(vars.len(), self.nvars, "variable list length must match nvars");
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, (e, c)) in self.terms.iter().rev().enumerate() {
            let negative = c < &Q::zero();
            let mag = if negative { -c.clone() } else { c.clone() };
            if k == 0 {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let mut factors: Vec<String> = Vec::new();
            let is_const = e.degree() == 0;
            if !mag.is_one() || is_const {
                factors.push(fmt_q(&mag));
            }
            for (i, &a) in e.0.iter().enumerate() {
                match a {
                    0 => {}
                    1 => factors.push(vars[i].clone()),
                    _ => factors.push(format!("{}^{}", vars[i], a)),
                }
            }
            out.push_str(&factors.join("*"));
        }
        out
    }
}

/// Default variable names `z1, ..., zn`.
pub fn default_vars(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("z{i}")).collect()
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text(&default_vars(self.nvars)))
    }
}

impl Add<&Poly> for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        assert_eq!(self.nvars, rhs.nvars);
        let (mut big, small) = if self.terms.len() >= rhs.terms.len() {
            (self.clone(), rhs)
        } else {
            (rhs.clone(), self)
        };
        for (e, c) in &small.terms {
            big.add_term(e.clone(), c.clone());
        }
        big
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(mut self, rhs: Poly) -> Poly {
        assert_eq!(self.nvars, rhs.nvars);
        if self.terms.len() < rhs.terms.len() {
            return rhs + self;
        }
        for (e, c) in rhs.terms {
            self.add_term(e, c);
        }
        self
    }
}

impl Sub<&Poly> for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        &self - &rhs
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c.clone())).collect(),
        }
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

impl Mul<&Poly> for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        assert_eq!(self.nvars, rhs.nvars);
        let mut acc: BTreeMap<Exponent, Q> = BTreeMap::new();
        for (e, c) in &self.terms {
            for (f, d) in &rhs.terms {
                let prod = c * d;
                match acc.entry(e.mul(f)) {
                    std::collections::btree_map::Entry::Vacant(v) => {
                        v.insert(prod);
                    }
                    std::collections::btree_map::Entry::Occupied(mut o) => {
                        *o.get_mut() += prod;
                    }
                }
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Poly { nvars: self.nvars, terms: acc }
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    fn vars(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn gradient_of_simple_forms() {
        let v = vars(&["x", "y"]);
        let p = parse("x^2 + y^3", &v).unwrap();
        let g = p.gradient();
        assert_eq!(g[0], parse("2*x", &v).unwrap());
        assert_eq!(g[1], parse("3*y^2", &v).unwrap());
        let d = p.deleted_gradient(0);
        assert_eq!(d, vec![parse("3*y^2", &v).unwrap()]);
        let c = Poly::constant(2, qi(5));
        assert!(c.gradient().iter().all(Poly::is_zero));
    }

    #[test]
    fn bilinear_substitution() {
        let v = vars(&["x", "y", "z"]);
        let p = parse("x*y", &v).unwrap();
        let gamma = parse("y^2*z + 3*x", &v).unwrap();
        let map = vec![&parse("x", &v).unwrap() + &gamma, parse("z", &v).unwrap(), parse("z", &v).unwrap()];
        let r = p.substitute(&map).unwrap();
        let expect = &parse("x*z", &v).unwrap() + &(&gamma * &parse("z", &v).unwrap());
        assert_eq!(r, expect);
    }

    #[test]
    fn curve_compositions() {
        let v = vars(&["x", "y", "z"]);
        let p = parse("x^2 + y^3 + z^7", &v).unwrap();
        let t = UniPoly::monomial(1, qi(1));
        let r = p.compose_curve(&[UniPoly::zero(), UniPoly::zero(), t.clone()]).unwrap();
        assert_eq!(r, UniPoly::monomial(7, qi(1)));
        let p = parse("x*z + y^5", &v).unwrap();
        let r = p.compose_curve(&[UniPoly::zero(), t, UniPoly::zero()]).unwrap();
        assert_eq!(r, UniPoly::monomial(5, qi(1)));
        assert_eq!(r.order(), Some(5));
    }

    #[test]
    fn printing_is_canonical() {
        let v = vars(&["x", "y"]);
        let p = parse("y - 3/2*x^2 + 2 - x*y", &v).unwrap();
        assert_eq!(p.to_text(&v), "-3/2*x^2 - x*y + y + 2");
        assert_eq!(Poly::zero(2).to_text(&v), "0");
        let p = parse("-x", &v).unwrap();
        assert_eq!(p.to_text(&v), "-x");
        assert_eq!(p.scale(&q(0, 1)), Poly::zero(2));
    }

    #[test]
    fn order_and_degree() {
        let v = vars(&["x", "y"]);
        let p = parse("x^2*y + y^5 + x^3", &v).unwrap();
        assert_eq!(p.order(), Some(3));
        assert_eq!(p.total_degree(), Some(5));
        assert_eq!(Poly::zero(2).order(), None);
    }
}
