//! Exponents from a relation `f = sum g_i df/dz_i`: the real parts of the
//! eigenvalues of the linear part of `(g_1, ..., g_n)` serve as weights.

use num_bigint::BigInt;
use num_complex::Complex;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exponent::{loj_wsqh_interval, IntervalExponentData};
use crate::interval::Interval;
use crate::linalg::{determinant, for_each_combination, identity, mul, trace, Matrix};
use crate::localring::{
    cofinite_standard_basis, membership_with_degree, milnor_number, MilnorNumber, standard_basis, MembershipCertificate, DEFAULT_DEGREE_BOUND,
};
use crate::poly::{Poly, UniPoly};
use crate::rational::{fmt_q, lcm_of_denominators, q, round_dyadic, sqrt_upper, to_f64, Q};

type Cq = Complex<Q>;

/// Linear parts of the cofactors, row `i` holding the coefficients of `g_i`.
pub fn jacobian_at_zero(cert: &MembershipCertificate) -> Result<Matrix> {
    let n = cert.target.nvars();
    if cert.cofactors.len() != n {
        return Err(Error::Arity { expected: n, got: cert.cofactors.len() });
    }
    if cert.certified_degree < 1 {
        return Err(Error::NotApplicable("cofactors are not certified up to degree 1".into()));
    }
    cert.cofactors
        .iter()
        .map(|g| {
            if !g.constant_term().is_zero() {
                return Err(Error::NotApplicable("a cofactor does not vanish at the origin".into()));
            }
            Ok(g.linear_coefficients())
        })
        .collect()
}

/// `det(t I - A)` by the Faddeev-LeVerrier recursion.
pub fn charpoly_faddeev(a: &Matrix) -> UniPoly {
    let n = a.len();
    let mut coeffs = vec![Q::zero(); n + 1];
    coeffs[n] = Q::one();
    let mut m = identity(n);
    for k in 1..=n {
        let am = mul(a, &m);
        let c = -trace(&am) / Q::from_integer((k as i64).into());
        coeffs[n - k] = c.clone();
        m = am;
        for (i, row) in m.iter_mut().enumerate() {
            row[i] += &c;
        }
    }
    UniPoly::from_coeffs(coeffs)
}

/// `det(t I - A)` from sums of principal minors.
pub fn charpoly_minors(a: &Matrix) -> UniPoly {
    let n = a.len();
    let mut coeffs = vec![Q::zero(); n + 1];
    coeffs[n] = Q::one();
    for k in 1..=n {
        let mut e = Q::zero();
        for_each_combination(n, k, |idx| {
            let sub: Matrix = idx.iter().map(|&i| idx.iter().map(|&j| a[i][j].clone()).collect()).collect();
            e += determinant(&sub);
        });
        coeffs[n - k] = if k % 2 == 0 { e } else { -e };
    }
    UniPoly::from_coeffs(coeffs)
}

/// Characteristic polynomial, computed twice and compared.
pub fn characteristic_polynomial(a: &Matrix) -> Result<UniPoly> {
    if a.iter().any(|row| row.len() != a.len()) {
        return Err(Error::Arity { expected: a.len(), got: a.first().map_or(0, Vec::len) });
    }
    let p = charpoly_faddeev(a);
    if p != charpoly_minors(a) {
        return Err(Error::Invariant("characteristic polynomial computations disagree".into()));
    }
    Ok(p)
}

/// A box containing `multiplicity` eigenvalues counted with multiplicity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EigenEnclosure {
    pub re: Interval,
    pub im: Interval,
    pub multiplicity: usize,
    pub exact: bool,
}

#[derive(Clone, Debug)]
pub struct RootOptions {
    /// Target width of every real-part enclosure.
    pub tol: Q,
    /// Working precision cap in bits.
    pub max_bits: u64,
}

impl Default for RootOptions {
    fn default() -> Self {
        RootOptions { tol: Q::new(BigInt::one(), BigInt::one() << 64usize), max_bits: 4096 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EigenSpectrum {
    pub enclosures: Vec<EigenEnclosure>,
    /// Every enclosure reached the requested width.
    pub converged: bool,
    pub max_width: Interval,
    pub bits: u64,
}

/// Certified enclosures of all eigenvalues of `a`.
pub fn eigenvalues(a: &Matrix, opts: &RootOptions) -> Result<EigenSpectrum> {
    let p = characteristic_polynomial(a)?;
    polynomial_roots(&p, opts)
}

/// Certified enclosures of all complex roots of `p`, with multiplicity.
pub fn polynomial_roots(p: &UniPoly, opts: &RootOptions) -> Result<EigenSpectrum> {
    if !opts.tol.is_positive() {
        return Err(Error::InvalidWeights("tolerance must be positive".into()));
    }
    let mut enclosures = Vec::new();
    let mut converged = true;
    let mut bits = 0;
    for (k, s) in p.squarefree_factors().iter().enumerate() {
        let Some(d) = s.degree() else { continue };
        if d == 0 {
            continue;
        }
        let r = squarefree_roots(s, opts)?;
        converged &= r.converged;
        bits = bits.max(r.bits);
        for mut e in r.enclosures {
            e.multiplicity *= k + 1;
            enclosures.push(e);
        }
    }
    enclosures.sort_by(|a, b| a.re.lo.cmp(&b.re.lo).then(a.im.lo.cmp(&b.im.lo)));
    let max_width = enclosures
        .iter()
        .map(|e| e.re.width())
        .max()
        .unwrap_or_else(Q::zero);
    Ok(EigenSpectrum { enclosures, converged, max_width: Interval::new(Q::zero(), max_width), bits })
}

/// Real parts of the eigenvalues of `a`, one interval per eigenvalue.
pub fn eigen_real_parts(a: &Matrix, tol: &Q) -> Result<Vec<Interval>> {
    let spec = eigenvalues(a, &RootOptions { tol: tol.clone(), ..Default::default() })?;
    Ok(real_parts(&spec))
}

pub fn real_parts(spec: &EigenSpectrum) -> Vec<Interval> {
    spec.enclosures
        .iter()
        .flat_map(|e| std::iter::repeat_n(e.re.clone(), e.multiplicity))
        .collect()
}

fn cabs2(z: &Cq) -> Q {
    &z.re * &z.re + &z.im * &z.im
}

fn ceval(p: &[Q], z: &Cq) -> Cq {
    p.iter().rev().fold(Cq::new(Q::zero(), Q::zero()), |acc, c| acc * z + Cq::new(c.clone(), Q::zero()))
}

fn round_c(z: &Cq, bits: u64) -> Cq {
    Cq::new(round_dyadic(&z.re, bits), round_dyadic(&z.im, bits))
}

/// Floating-point Weierstrass iteration used only to seed the exact one.
fn float_seeds(p: &[Q]) -> Vec<Complex<f64>> {
    let d = p.len() - 1;
    let c: Vec<f64> = p.iter().map(to_f64).collect();
    let lc = c[d];
    let bound = 1.0 + c[..d].iter().map(|x| (x / lc).abs()).fold(0.0, f64::max);
    let bound = if bound.is_finite() { bound } else { 1.0 };
    let mut z: Vec<Complex<f64>> = (0..d)
        .map(|k| Complex::from_polar(bound, std::f64::consts::TAU * k as f64 / d as f64 + 0.4))
        .collect();
    let eval = |x: Complex<f64>| c.iter().rev().fold(Complex::new(0.0, 0.0), |acc, a| acc * x + a);
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..d {
            let mut den = Complex::new(lc, 0.0);
            for j in 0..d {
                if j != i {
                    den *= z[i] - z[j];
                }
            }
            let step = eval(z[i]) / den;
            if step.is_finite() {
                z[i] -= step;
                moved = moved.max(step.norm() / (1.0 + z[i].norm()));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    z.into_iter()
        .map(|x| if x.is_finite() { x } else { Complex::new(0.0, 0.0) })
        .collect()
}

fn to_q(x: f64) -> Q {
    Q::from_float(x).unwrap_or_else(Q::zero)
}

struct SquarefreeRoots {
    enclosures: Vec<EigenEnclosure>,
    converged: bool,
    bits: u64,
}

/// Roots of a monic square-free polynomial: Weierstrass iteration in
/// dyadic-rounded rational arithmetic, certified by the inclusion disks
/// `|z - z_i| <= d |W_i|`, with rational roots recognised exactly.
fn squarefree_roots(s: &UniPoly, opts: &RootOptions) -> Result<SquarefreeRoots> {
    let s = s.monic();
    let p = s.coeffs().to_vec();
    let d = p.len() - 1;
    if d == 1 {
        let r = -p[0].clone();
        return Ok(SquarefreeRoots {
            enclosures: vec![point_enclosure(r)],
            converged: true,
            bits: 0,
        });
    }
    // integer multiple of s: rational roots have the form k / lead
    let den = lcm_of_denominators(&p);
    let ints: Vec<BigInt> = p.iter().map(|c| (c * Q::from_integer(den.clone())).to_integer()).collect();
    let lead = Q::from_integer(ints[d].clone());
    let mut z: Vec<Cq> = float_seeds(&p).into_iter().map(|x| Cq::new(to_q(x.re), to_q(x.im))).collect();
    let mut exact: Vec<bool> = vec![false; d];
    let mut bits = 64u64;
    let dq = Q::from_integer((d as i64).into());
    loop {
        // refine
        for _ in 0..64 {
            let mut moved = false;
            for i in 0..d {
                if exact[i] {
                    continue;
                }
                let w = correction(&p, &z, i);
                let Some(w) = w else { continue };
                let next = round_c(&(&z[i] - &w), bits);
                if next != z[i] {
                    moved = true;
                    z[i] = next;
                }
            }
            if !moved {
                break;
            }
        }
        // snap near-real roots onto the axis and test for rational roots
        for i in 0..d {
            if exact[i] {
                continue;
            }
            let Some(w) = correction(&p, &z, i) else { continue };
            let r2 = cabs2(&w) * &dq * &dq;
            if &z[i].im * &z[i].im <= r2 {
                z[i].im = Q::zero();
                let r = sqrt_upper(&r2, bits + 8);
                let lo = (&z[i].re - &r) * &lead;
                let hi = (&z[i].re + &r) * &lead;
                let mut k = lo.ceil();
                while k <= hi {
                    let cand = &k / &lead;
                    if s.eval(&cand).is_zero() {
                        z[i] = Cq::new(cand, Q::zero());
                        exact[i] = true;
                        break;
                    }
                    k += Q::one();
                }
            }
        }
        let (enclosures, isolated, width) = certify(&p, &z, &exact, bits)?;
        let converged = isolated && width < opts.tol;
        if converged || bits >= opts.max_bits {
            return Ok(SquarefreeRoots { enclosures, converged, bits });
        }
        bits *= 2;
    }
}

fn point_enclosure(r: Q) -> EigenEnclosure {
    EigenEnclosure { re: Interval::point(r), im: Interval::zero(), multiplicity: 1, exact: true }
}

/// Weierstrass correction `p(z_i) / prod_{j != i} (z_i - z_j)` for monic `p`.
fn correction(p: &[Q], z: &[Cq], i: usize) -> Option<Cq> {
    let mut den = Cq::new(Q::one(), Q::zero());
    for (j, zj) in z.iter().enumerate() {
        if j != i {
            den *= &z[i] - zj;
        }
    }
    if den.re.is_zero() && den.im.is_zero() {
        return None;
    }
    Some(ceval(p, &z[i]) / den)
}

/// Groups the inclusion disks into connected components; a component of
/// `m` disks holds exactly `m` roots. Returns the enclosures, whether every
/// component is a single disk, and the widest real-part enclosure.
fn certify(p: &[Q], z: &[Cq], exact: &[bool], bits: u64) -> Result<(Vec<EigenEnclosure>, bool, Q)> {
    let d = z.len();
    let dq = Q::from_integer((d as i64).into());
    let mut radius = Vec::with_capacity(d);
    for i in 0..d {
        if exact[i] {
            radius.push(Q::zero());
            continue;
        }
        let w = correction(p, z, i)
            .ok_or_else(|| Error::Inconclusive("root approximations collided during refinement".into()))?;
        radius.push(sqrt_upper(&(cabs2(&w) * &dq * &dq), bits + 8));
    }
    let overlaps = |i: usize, j: usize| {
        let sum = &radius[i] + &radius[j];
        cabs2(&(&z[i] - &z[j])) <= &sum * &sum
    };
    let mut comp: Vec<usize> = (0..d).collect();
    fn find(c: &mut [usize], i: usize) -> usize {
        if c[i] == i {
            i
        } else {
            let r = find(c, c[i]);
            c[i] = r;
            r
        }
    }
    for i in 0..d {
        for j in i + 1..d {
            if overlaps(i, j) {
                let (a, b) = (find(&mut comp, i), find(&mut comp, j));
                comp[a] = b;
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_of = Vec::new();
    for i in 0..d {
        let r = find(&mut comp, i);
        match root_of.iter().position(|&x| x == r) {
            Some(k) => groups[k].push(i),
            None => {
                root_of.push(r);
                groups.push(vec![i]);
            }
        }
    }
    let isolated = groups.iter().all(|g| g.len() == 1);
    let mut out = Vec::with_capacity(groups.len());
    let mut width = Q::zero();
    for g in groups {
        let re_lo = g.iter().map(|&i| &z[i].re - &radius[i]).min().expect("non-empty");
        let re_hi = g.iter().map(|&i| &z[i].re + &radius[i]).max().expect("non-empty");
        let im_lo = g.iter().map(|&i| &z[i].im - &radius[i]).min().expect("non-empty");
        let im_hi = g.iter().map(|&i| &z[i].im + &radius[i]).max().expect("non-empty");
        let w = &re_hi - &re_lo;
        if w > width {
            width = w;
        }
        out.push(EigenEnclosure {
            re: Interval::new(re_lo, re_hi),
            im: Interval::new(im_lo, im_hi),
            multiplicity: g.len(),
            exact: g.len() == 1 && exact[g[0]],
        });
    }
    Ok((out, isolated, width))
}

#[derive(Clone, Debug)]
pub struct Theorem5Options {
    pub tol: Q,
    /// Largest denominator accepted for the exponent.
    pub denominator_cap: u64,
    pub max_bits: u64,
    pub degree_bound: u32,
}

impl Default for Theorem5Options {
    fn default() -> Self {
        Theorem5Options {
            tol: RootOptions::default().tol,
            denominator_cap: 1 << 20,
            max_bits: 4096,
            degree_bound: DEFAULT_DEGREE_BOUND,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CertificateSource {
    Supplied,
    Membership,
}

/// Everything the eigenvalue route produced.
#[derive(Clone, Debug)]
pub struct Theorem5Evidence {
    pub certificate: MembershipCertificate,
    pub source: CertificateSource,
    pub jacobian: Matrix,
    pub charpoly: UniPoly,
    pub spectrum: EigenSpectrum,
    pub real_parts: Vec<Interval>,
    pub exponent: IntervalExponentData,
    pub value: Q,
}

impl Theorem5Evidence {
    pub fn to_json(&self) -> serde_json::Value {
        let m: Vec<Vec<String>> = self.jacobian.iter().map(|r| r.iter().map(fmt_q).collect()).collect();
        serde_json::json!({
            "certificate_source": self.source,
            "certificate_exact": self.certificate.exact,
            "certified_degree": self.certificate.certified_degree,
            "jacobian": m,
            "charpoly": self.charpoly.coeffs().iter().map(fmt_q).collect::<Vec<_>>(),
            "eigenvalues": self.spectrum,
            "real_parts": self.real_parts,
            "exponent_data": self.exponent,
            "value": fmt_q(&self.value),
        })
    }
}

/// Certificate `f = sum g_i df/dz_i` from a tracked standard basis of the
/// gradient ideal; `None` when `f` is not in that ideal.
///
/// With a truncated basis the relation holds modulo `m^(t+1)` where
/// `m^(t-1)` lies in the ideal, so the remainder is a combination of the
/// partials with coefficients in `m^2` and the linear parts of the `g_i`
/// are those of an exact relation.
pub fn gradient_certificate(f: &Poly, degree_bound: u32) -> Result<Option<MembershipCertificate>> {
    let grad = f.gradient();
    let start = grad.iter().filter_map(Poly::total_degree).max().unwrap_or(1) + 2;
    let basis = match cofinite_standard_basis(&grad, start, degree_bound.max(start), true)? {
        Some(b) => b,
        None => standard_basis(&grad, degree_bound, true)?,
    };
    membership_with_degree(f, &basis, 2)
}

/// The exponent `1 / l_min - 1` computed from eigenvalue real parts.
pub fn theorem5_exponent(f: &Poly, cert: Option<&MembershipCertificate>, opts: &Theorem5Options) -> Result<Theorem5Evidence> {
    if f.order().is_none_or(|o| o < 2) {
        return Err(Error::NotApplicable("the germ is not singular at the origin".into()));
    }
    if milnor_number(f, opts.degree_bound)? == MilnorNumber::Infinite {
        return Err(Error::NotApplicable("the critical point at the origin is not isolated".into()));
    }
    let (certificate, source) = match cert {
        Some(c) => {
            if c.target != *f || c.generators != f.gradient() || !c.verify() {
                return Err(Error::InvalidWeights("certificate does not express the germ through its gradient".into()));
            }
            (c.clone(), CertificateSource::Supplied)
        }
        None => match gradient_certificate(f, opts.degree_bound)? {
            Some(c) => (c, CertificateSource::Membership),
            None => {
                return Err(Error::NotApplicable(
                    "the germ is not in its gradient ideal, so it is not weighted homogeneous in any coordinates".into(),
                ))
            }
        },
    };
    let jacobian = jacobian_at_zero(&certificate)?;
    let charpoly = characteristic_polynomial(&jacobian)?;
    let mut tol = opts.tol.clone();
    let mut bits = opts.max_bits;
    // retry with tighter enclosures when comparisons cannot be decided
    for attempt in 0..4 {
        let spectrum = polynomial_roots(&charpoly, &RootOptions { tol: tol.clone(), max_bits: bits })?;
        let real_parts = real_parts(&spectrum);
        let sum = real_parts.iter().fold(Interval::zero(), |acc, x| acc.add(x));
        if !sum.contains(&trace(&jacobian)) {
            return Err(Error::Invariant("eigenvalue real parts do not enclose the trace".into()));
        }
        match loj_wsqh_interval(&real_parts) {
            Ok(exponent) => {
                if let Some(value) = exponent.value.unique_rational(opts.denominator_cap) {
                    return Ok(Theorem5Evidence {
                        certificate,
                        source,
                        jacobian,
                        charpoly,
                        spectrum,
                        real_parts,
                        exponent,
                        value,
                    });
                }
                if attempt == 3 {
                    return Err(Error::Inconclusive(format!(
                        "exponent enclosure {} does not determine a rational with denominator <= {}",
                        exponent.value, opts.denominator_cap
                    )));
                }
            }
            Err(Error::Inconclusive(msg)) if attempt < 3 => {
                let _ = msg;
            }
            Err(e) => return Err(e),
        }
        tol *= q(1, 1 << 16);
        bits *= 2;
    }
    unreachable!("the retry loop returns on its last attempt")
}

/// Float view of an enclosure midpoint, for display.
pub fn approx(i: &Interval) -> f64 {
    to_f64(&i.mid())
}
