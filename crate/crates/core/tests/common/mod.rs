#![allow(dead_code)]

use loj_core::poly::{parse, Exponent, Poly, WeightVector};
use loj_core::rational::{q, qi, Q};
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn vars(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

pub fn numbered(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("z{i}")).collect()
}

pub fn w(text: &str) -> WeightVector {
    WeightVector::parse(text).unwrap()
}

/// A germ with one of its weight types and the expected exponent.
pub struct Golden {
    pub name: &'static str,
    pub vars: Vec<String>,
    pub poly: Poly,
    pub weights: WeightVector,
    pub exponent: Q,
    pub milnor: u64,
}

fn golden(name: &'static str, names: &[&str], text: &str, weights: &str, exponent: Q, milnor: u64) -> Golden {
    let v = vars(names);
    let poly = parse(text, &v).unwrap();
    Golden { name, vars: v, poly, weights: w(weights), exponent, milnor }
}

pub const TWO_TYPES: &str = "x*y + x^4*y^3 + (z+y)^3";
pub const EIGEN_GERM: &str = "x*z + x*y*z^2 + x*y^3 + y^3*z^2 + y^5 + y^2*z^4 + z^8";
pub const DELETED_GRADIENT_GERM: &str = "z1*z2 + (1+z2)*(z3^4 + z3^2*z4^3 + z4^5)";

/// Germs with hand-checked types, exponents and Milnor numbers.
pub fn golden_corpus() -> Vec<Golden> {
    vec![
        golden("two types, weak", &["x", "y", "z"], TWO_TYPES, "-2,3,1/3", qi(2), 2),
        golden("two types, positive", &["x", "y", "z"], TWO_TYPES, "2/3,1/3,1/3", qi(2), 2),
        golden("hyperbolic pair with tail", &["x", "y", "z"], EIGEN_GERM, "1/2,1/5,1/2", qi(4), 4),
        golden("deleted gradient germ", &["z1", "z2", "z3", "z4"], DELETED_GRADIENT_GERM, "1/2,1/2,1/4,1/5", qi(4), 12),
        golden("weak with square tail", &["x", "y", "z"], "x*y + y^2*z^3 + z^5 + x^2*y^2", "-3/2,5/2,1/5", qi(4), 4),
        golden("A1 in one variable", &["x"], "x^2", "1/2", qi(1), 1),
        golden("E6", &["x", "y"], "x^3 + y^4", "1/3,1/4", qi(3), 6),
        golden("D5", &["x", "y"], "x^2*y + y^4", "3/8,1/4", qi(3), 5),
        golden("E7 with tail", &["x", "y"], "x^3 + x*y^3 + y^5", "1/3,2/9", q(7, 2), 7),
        golden("A3 plus square", &["x", "y"], "x^2 + y^4 + x*y^3", "1/2,1/4", qi(3), 3),
    ]
}

/// `sum z_i^{a_i}` over `n` variables.
pub fn brieskorn_pham(exps: &[u32]) -> Poly {
    let n = exps.len();
    exps.iter().enumerate().fold(Poly::zero(n), |acc, (i, &a)| {
        let mut e = Exponent::zero(n);
        e.0[i] = a;
        acc + Poly::monomial(n, e, Q::one())
    })
}

pub fn brieskorn_pham_weights(exps: &[u32]) -> WeightVector {
    WeightVector::normalized(exps.iter().map(|&a| q(1, a as i64)).collect())
}

/// Exponent tuples of the diagonal corpus: every ordered tuple for two and
/// three variables, nondecreasing tuples for four.
pub fn brieskorn_pham_corpus() -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for a in 2..=6 {
        for b in 2..=6 {
            out.push(vec![a, b]);
            for c in 2..=6 {
                out.push(vec![a, b, c]);
            }
        }
    }
    for a in 2..=6 {
        for b in a..=6 {
            for c in b..=6 {
                for d in c..=6 {
                    out.push(vec![a, b, c, d]);
                }
            }
        }
    }
    out
}

pub fn random_coeff(rng: &mut ChaCha8Rng) -> Q {
    loop {
        let n: i64 = rng.gen_range(-5..=5);
        if n != 0 {
            return q(n, rng.gen_range(1..=4));
        }
    }
}

pub fn weighted_degree(e: &Exponent, w: &WeightVector) -> Q {
    loj_core::poly::weighted_degree(e, w)
}

/// Random monomials of ordinary degree at least 2 strictly above the level.
pub fn random_tail(rng: &mut ChaCha8Rng, w: &WeightVector, count: usize, max_exp: u32, must_touch: &[usize]) -> Poly {
    let n = w.len();
    let mut tail = Poly::zero(n);
    let mut attempts = 0;
    while tail.num_terms() < count && attempts < 2000 {
        attempts += 1;
        let e = Exponent((0..n).map(|_| rng.gen_range(0..=max_exp)).collect());
        if e.degree() < 2 || weighted_degree(&e, w) <= *w.level() {
            continue;
        }
        if tail.is_zero() && !must_touch.is_empty() && !must_touch.iter().any(|&k| e.0[k] > 0) {
            continue;
        }
        tail = tail + Poly::monomial(n, e, random_coeff(rng));
    }
    tail
}

/// A germ of the splitting shape `f0(y) + sum x_j z_j + tail`.
pub struct SplitCase {
    pub poly: Poly,
    pub weights: WeightVector,
    pub pairing: Vec<(usize, usize)>,
    pub block_milnor: u64,
}

pub fn random_pair_weight(rng: &mut ChaCha8Rng) -> Q {
    // mostly non-positive, sometimes inside (0, 1/2)
    if rng.gen_bool(0.75) {
        -q(rng.gen_range(0..=8), rng.gen_range(1..=4))
    } else {
        q(rng.gen_range(1..=3), rng.gen_range(7..=9))
    }
}

pub fn split_case(rng: &mut ChaCha8Rng) -> SplitCase {
    let ny = rng.gen_range(1..=2usize);
    let np = rng.gen_range(1..=2usize);
    let n = ny + 2 * np;
    let mut weights = vec![Q::zero(); n];
    let mut f = Poly::zero(n);
    let mut block_milnor = 1u64;
    for k in 0..ny {
        let b = rng.gen_range(2..=5u32);
        weights[k] = q(1, b as i64);
        let mut e = Exponent::zero(n);
        e.0[k] = b;
        f = f + Poly::monomial(n, e, Q::one());
        block_milnor *= (b - 1) as u64;
    }
    let mut pairing = Vec::new();
    for j in 0..np {
        let (x, z) = (ny + 2 * j, ny + 2 * j + 1);
        let p = random_pair_weight(rng);
        weights[z] = Q::one() - &p;
        weights[x] = p;
        let mut e = Exponent::zero(n);
        e.0[x] = 1;
        e.0[z] = 1;
        f = f + Poly::monomial(n, e, Q::one());
        pairing.push((x, z));
    }
    let w = WeightVector::normalized(weights);
    let touch: Vec<usize> = (ny..n).collect();
    let count = rng.gen_range(1..=4usize);
    let (x0, z0) = pairing[0];
    // monomials on both sides of a pair make the remainder nonzero
    let tail = random_tail(rng, &w, count, 3, &touch) + random_tail(rng, &w, 1, 3, &[x0]) + random_tail(rng, &w, 1, 3, &[z0]);
    SplitCase { poly: f + tail, weights: w, pairing, block_milnor }
}

/// A rational weight vector in three variables together with a germ of that
/// type: a hyperbolic pair, a chain, or a diagonal germ, plus a random tail.
pub fn witnessed_type(rng: &mut ChaCha8Rng) -> (WeightVector, Poly) {
    let n = 3;
    let v = numbered(3);
    let (weights, principal) = match rng.gen_range(0..3) {
        0 => {
            let a = loop {
                let a = q(rng.gen_range(-12..=11), rng.gen_range(1..=6));
                if a < Q::one() && a != Q::zero() && a != q(1, 2) {
                    break a;
                }
            };
            let k = rng.gen_range(2..=8);
            let w = vec![a.clone(), Q::one() - a, q(1, k)];
            (w, parse(&format!("z1*z2 + z3^{k}"), &v).unwrap())
        }
        1 => {
            let a = rng.gen_range(1..=4i64);
            let b = rng.gen_range(2..=6i64);
            let c = rng.gen_range(2..=7i64);
            let ly = q(1, b);
            let lx = (Q::one() - &ly) / qi(a);
            (vec![lx, ly, q(1, c)], parse(&format!("z1^{a}*z2 + z2^{b} + z3^{c}"), &v).unwrap())
        }
        _ => {
            let exps: Vec<u32> = (0..3).map(|_| rng.gen_range(2..=9)).collect();
            (brieskorn_pham_weights(&exps).weights().to_vec(), brieskorn_pham(&exps))
        }
    };
    let w = WeightVector::normalized(weights);
    let tail = if w.weights().iter().all(|l| l.is_positive()) || rng.gen_bool(0.5) {
        let count = rng.gen_range(0..=2);
        random_tail(rng, &w, count, 4, &[])
    } else {
        Poly::zero(n)
    };
    (w, principal + tail)
}
