//! Analysis reports: orchestration of classification, exponent formulas,
//! oracles and reductions, serialized as JSON with exact rationals.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use num_traits::{One, Signed};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::curves::{lower_bound_search, LowerBound};
use crate::error::{Error, Result};
use crate::exponent::{loj_sqh, loj_wqh_n3, loj_wsqh, ExponentData, Formula};
use crate::localring::{
    euler_certificate, membership, milnor_number, power_membership, standard_basis, MembershipCertificate, MilnorNumber,
    DEFAULT_DEGREE_BOUND,
};
use crate::poly::{Poly, WeightVector};
use crate::rational::{fmt_q, half, Q};
use crate::reduce::reduce_to_sqh;
use crate::saito5::{theorem5_exponent, Theorem5Options};
use crate::weights::{
    classify, discover_classified, milnor_degree_hint, saito_symmetry_check, Classification, SaitoSymmetry, Verdict,
    DEFAULT_SUPPORT_CAP,
};

/// Version of the report layout; bumped with every schema change.
pub const REPORT_SCHEMA_VERSION: &str = "1.0.0";

#[derive(Clone, Debug, Serialize)]
pub struct Versions {
    pub schema: String,
    pub tool: String,
}

impl Default for Versions {
    fn default() -> Self {
        Versions { schema: REPORT_SCHEMA_VERSION.into(), tool: env!("CARGO_PKG_VERSION").into() }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct InputInfo {
    pub polynomial: String,
    pub variables: Vec<String>,
    pub sha256: String,
}

impl InputInfo {
    pub fn new(f: &Poly, vars: &[String]) -> Self {
        let polynomial = f.to_text(vars);
        let mut h = Sha256::new();
        h.update(vars.join(",").as_bytes());
        h.update(b"\n");
        h.update(polynomial.as_bytes());
        let sha256 = h.finalize().iter().map(|b| format!("{b:02x}")).collect();
        InputInfo { polynomial, variables: vars.to_vec(), sha256 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassificationEntry {
    pub weights: Vec<String>,
    pub verdict: Verdict,
    pub principal: String,
    pub tail: String,
    pub principal_milnor: Option<MilnorNumber>,
    pub saito_symmetry: SaitoSymmetry,
    pub reason: Option<String>,
}

impl ClassificationEntry {
    fn new(c: &Classification, vars: &[String]) -> Self {
        ClassificationEntry {
            weights: c.wtype.to_strings(),
            verdict: c.verdict,
            principal: c.principal.to_text(vars),
            tail: c.tail.to_text(vars),
            principal_milnor: c.principal_milnor,
            saito_symmetry: saito_symmetry_check(&c.wtype),
            reason: c.reason.clone(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExponentEntry {
    pub weights: Vec<String>,
    pub formula: Formula,
    pub value: String,
    pub data: Option<ExponentData>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Agreement {
    pub consistent: bool,
    pub value: Option<String>,
    pub values: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CurveOracle {
    pub lower_bound: LowerBound,
    pub max_exponent: u32,
    pub trials: u32,
    pub seed: u64,
    /// `lower_bound <= value`, when a formula value exists.
    pub sound: Option<bool>,
    pub attained: Option<bool>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Oracles {
    pub curves: Option<CurveOracle>,
    pub milnor_equals_principal: Option<bool>,
    pub membership: Option<Value>,
    pub theorem5: Option<Value>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReductionEntry {
    pub weights: Vec<String>,
    pub status: String,
    pub core: Option<String>,
    pub core_variables: Vec<String>,
    pub core_weights: Vec<String>,
    pub core_exponent: Option<String>,
    pub exponent_preserved: Option<bool>,
    pub milnor_fallback: bool,
    pub iterations: usize,
    pub trace: Value,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Diagnostics {
    pub timings_ms: BTreeMap<String, u64>,
    pub budgets_hit: Vec<String>,
    pub inconclusive: Vec<String>,
    pub violations: Vec<String>,
    pub notes: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Inconclusive,
    InvariantViolation,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Inconclusive => 2,
            Status::InvariantViolation => 3,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AnalysisReport {
    pub version: Versions,
    pub command: String,
    pub status: Status,
    pub input: InputInfo,
    pub classifications: Vec<ClassificationEntry>,
    pub exponents: Vec<ExponentEntry>,
    pub agreement: Option<Agreement>,
    pub milnor: Option<MilnorNumber>,
    pub oracles: Oracles,
    pub reductions: Vec<ReductionEntry>,
    pub diagnostics: Diagnostics,
}

impl AnalysisReport {
    fn new(command: &str, f: &Poly, vars: &[String]) -> Self {
        AnalysisReport {
            version: Versions::default(),
            command: command.into(),
            status: Status::Ok,
            input: InputInfo::new(f, vars),
            classifications: vec![],
            exponents: vec![],
            agreement: None,
            milnor: None,
            oracles: Oracles::default(),
            reductions: vec![],
            diagnostics: Diagnostics::default(),
        }
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("report serializes")
    }

    /// The agreed exponent, when one was computed.
    pub fn exponent(&self) -> Option<&str> {
        self.agreement.as_ref().and_then(|a| a.value.as_deref())
    }

    fn violation(&mut self, msg: impl Into<String>) {
        self.diagnostics.violations.push(msg.into());
        self.status = Status::InvariantViolation;
    }

    fn inconclusive(&mut self, msg: impl Into<String>) {
        self.diagnostics.inconclusive.push(msg.into());
        if self.status == Status::Ok {
            self.status = Status::Inconclusive;
        }
    }

    /// Records a non-fatal error from an optional step.
    fn absorb(&mut self, step: &str, e: Error) {
        match e {
            Error::Budget(m) => self.diagnostics.budgets_hit.push(format!("{step}: {m}")),
            Error::Invariant(m) => self.violation(format!("{step}: {m}")),
            other => self.diagnostics.notes.push(format!("{step}: {other}")),
        }
    }

    fn time<T>(&mut self, key: &str, timings: bool, run: impl FnOnce(&mut Self) -> T) -> T {
        let start = Instant::now();
        let out = run(self);
        if timings {
            self.diagnostics.timings_ms.insert(key.into(), start.elapsed().as_millis() as u64);
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Oracle {
    Curves,
    Milnor,
    Reduce,
    Theorem5,
}

impl Oracle {
    pub fn parse_list(text: &str) -> Result<BTreeSet<Oracle>> {
        text.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| match s {
                "curves" => Ok(Oracle::Curves),
                "milnor" => Ok(Oracle::Milnor),
                "reduce" => Ok(Oracle::Reduce),
                "theorem5" => Ok(Oracle::Theorem5),
                "none" => Err(Error::InvalidWeights(String::new())),
                other => Err(Error::InvalidWeights(format!("unknown oracle `{other}`"))),
            })
            .filter(|r| !matches!(r, Err(Error::InvalidWeights(m)) if m.is_empty()))
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct AnalyzeOptions {
    pub weights: Option<WeightVector>,
    pub oracles: BTreeSet<Oracle>,
    pub seed: u64,
    pub degree_bound: u32,
    pub tol: Q,
    pub max_exponent: u32,
    pub trials: u32,
    pub support_cap: usize,
    /// Record wall-clock timings (the only non-deterministic report field).
    pub timings: bool,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions {
            weights: None,
            oracles: [Oracle::Curves, Oracle::Milnor, Oracle::Reduce].into_iter().collect(),
            seed: 0,
            degree_bound: DEFAULT_DEGREE_BOUND,
            tol: Theorem5Options::default().tol,
            max_exponent: 6,
            trials: 32,
            support_cap: DEFAULT_SUPPORT_CAP,
            timings: true,
        }
    }
}

/// Every applicable formula for one classified type.
pub fn exponent_entries(w: &WeightVector, verdict: Verdict) -> Result<Vec<ExponentEntry>> {
    let w = w.normalize();
    let strs = w.to_strings();
    let mut out = Vec::new();
    let entry = |formula, value: Q, data| ExponentEntry { weights: strs.clone(), formula, value: fmt_q(&value), data };
    if verdict.is_strict() {
        out.push(entry(Formula::Thm3, loj_sqh(&w)?, None));
    }
    let data = loj_wsqh(&w).map_err(|e| match e {
        Error::InvalidWeights(m) => Error::Invariant(format!("type of an isolated singularity violates weight symmetry: {m}")),
        other => other,
    })?;
    out.push(entry(Formula::Thm4, data.value.clone(), Some(data)));
    if w.len() <= 3 {
        let positive = w.weights().iter().all(|l| l.is_positive() && *l < Q::one());
        let formula = if positive { Formula::Thm1 } else { Formula::Cor3 };
        out.push(entry(formula, loj_wqh_n3(&w)?, None));
    }
    Ok(out)
}

fn agreement(entries: &[ExponentEntry]) -> Option<Agreement> {
    if entries.is_empty() {
        return None;
    }
    let mut values: Vec<String> = entries.iter().map(|e| e.value.clone()).collect();
    values.sort();
    values.dedup();
    let consistent = values.len() == 1;
    Some(Agreement { consistent, value: consistent.then(|| values[0].clone()), values })
}

fn parse_value(s: &str) -> Q {
    crate::rational::parse_rational(s).expect("report values are canonical rationals")
}

/// Classification, exponent formulas and the requested oracles.
pub fn analyze(f: &Poly, vars: &[String], opts: &AnalyzeOptions) -> Result<AnalysisReport> {
    if vars.len() != f.nvars() {
        return Err(Error::Arity { expected: f.nvars(), got: vars.len() });
    }
    let mut rep = AnalysisReport::new("analyze", f, vars);
    let t = opts.timings;
    let classes: Vec<Classification> = rep.time("classification", t, |_| -> Result<_> {
        match &opts.weights {
            Some(w) => Ok(vec![classify(f, w)?]),
            None => discover_classified(f, opts.support_cap),
        }
    })?;
    if classes.is_empty() {
        rep.inconclusive("no weight type found for the germ");
    }
    for c in &classes {
        rep.classifications.push(ClassificationEntry::new(c, vars));
        if c.verdict.is_some() {
            match exponent_entries(&c.wtype, c.verdict) {
                Ok(es) => rep.exponents.extend(es),
                Err(Error::Invariant(m)) => rep.violation(m),
                Err(e) => return Err(e),
            }
        }
    }
    rep.agreement = agreement(&rep.exponents);
    if rep.agreement.as_ref().is_some_and(|a| !a.consistent) {
        rep.violation("exponent formulas disagree across types");
    }
    let value = rep.exponent().map(parse_value);
    if opts.oracles.contains(&Oracle::Milnor) {
        rep.time("milnor", t, |rep| {
            match milnor_number(f, milnor_hint(f, &classes, opts.degree_bound)) {
                Ok(m) => {
                    rep.milnor = Some(m);
                    let principal: Vec<MilnorNumber> = classes.iter().filter_map(|c| c.principal_milnor).collect();
                    if !principal.is_empty() {
                        let eq = principal.iter().all(|p| *p == m);
                        rep.oracles.milnor_equals_principal = Some(eq);
                        if !eq {
                            rep.violation("Milnor number of the germ differs from that of a principal part");
                        }
                    }
                }
                Err(e) => rep.absorb("milnor", e),
            }
        });
    }
    if opts.oracles.contains(&Oracle::Curves) {
        rep.time("curves", t, |rep| match lower_bound_search(f, opts.max_exponent, opts.trials, opts.seed) {
            Ok(lb) => {
                let sound = value.as_ref().map(|v| lb.value <= *v);
                let attained = value.as_ref().map(|v| lb.value == *v);
                if sound == Some(false) {
                    rep.violation("curve lower bound exceeds the formula value");
                }
                rep.oracles.curves = Some(CurveOracle {
                    lower_bound: lb,
                    max_exponent: opts.max_exponent,
                    trials: opts.trials,
                    seed: opts.seed,
                    sound,
                    attained,
                });
            }
            Err(e) => rep.absorb("curves", e),
        });
    }
    if opts.oracles.contains(&Oracle::Reduce) {
        rep.time("reduce", t, |rep| {
            for c in classes.iter().filter(|c| c.verdict.is_some() && !c.wtype.is_quasihomogeneous_range()) {
                let entry = reduction_entry(f, vars, &c.wtype);
                if entry.exponent_preserved == Some(false) {
                    rep.violation("reduction changed the exponent");
                }
                if let Some(err) = &entry.error {
                    if entry.status == "budget" {
                        rep.diagnostics.budgets_hit.push(format!("reduce: {err}"));
                    }
                }
                rep.reductions.push(entry);
            }
        });
    }
    if opts.oracles.contains(&Oracle::Theorem5) {
        rep.time("theorem5", t, |rep| {
            let t5 = Theorem5Options { tol: opts.tol.clone(), degree_bound: opts.degree_bound, ..Default::default() };
            match theorem5_exponent(f, None, &t5) {
                Ok(ev) => {
                    if value.as_ref().is_some_and(|v| *v != ev.value) {
                        rep.violation("eigenvalue route disagrees with the formula value");
                    }
                    rep.exponents.push(ExponentEntry {
                        weights: ev.real_parts.iter().map(|i| i.to_string()).collect(),
                        formula: Formula::Thm5,
                        value: fmt_q(&ev.value),
                        data: None,
                    });
                    rep.oracles.theorem5 = Some(ev.to_json());
                }
                Err(e) => rep.absorb("theorem5", e),
            }
        });
        rep.agreement = agreement(&rep.exponents);
    }
    Ok(rep)
}

fn milnor_hint(f: &Poly, classes: &[Classification], bound: u32) -> u32 {
    classes
        .iter()
        .filter(|c| c.verdict.is_some())
        .map(|c| milnor_degree_hint(&c.principal, &c.wtype))
        .max()
        .unwrap_or(bound)
        .max(bound)
        .max(f.total_degree().unwrap_or(2) + 2)
}

/// Exponent of a reduced core: 1 for the empty core.
fn core_exponent(w: &WeightVector) -> Result<Q> {
    if w.is_empty() {
        return Ok(Q::one());
    }
    Ok(loj_wsqh(w)?.value)
}

/// A germ of type (1/2, ..., 1/2) is a nondegenerate quadratic form.
fn is_quadratic_type(w: &WeightVector) -> bool {
    !w.is_empty() && w.weights().iter().all(|l| *l == half())
}

fn reduction_entry(f: &Poly, vars: &[String], w: &WeightVector) -> ReductionEntry {
    let strs = w.normalize().to_strings();
    match reduce_to_sqh(f, w) {
        Ok(r) => {
            let core_vars: Vec<String> = r.core_indices.iter().map(|&k| vars[k].clone()).collect();
            let core_exp = core_exponent(&r.core_weights).ok();
            let input_exp = loj_wsqh(w).ok().map(|d| d.value);
            let preserved = match (&core_exp, &input_exp) {
                (Some(a), Some(b)) => Some(a == b),
                _ => None,
            };
            ReductionEntry {
                weights: strs,
                status: if r.a1 || is_quadratic_type(&r.core_weights) { "a1".into() } else { "ok".into() },
                core: Some(r.core.to_text(&core_vars)),
                core_variables: core_vars,
                core_weights: r.core_weights.to_strings(),
                core_exponent: core_exp.as_ref().map(fmt_q),
                exponent_preserved: preserved,
                milnor_fallback: r.milnor_fallback,
                iterations: r.iterations,
                trace: r.trace.to_json(vars),
                error: None,
            }
        }
        Err(e) => ReductionEntry {
            weights: strs,
            status: match e {
                Error::Budget(_) => "budget".into(),
                Error::Invariant(_) => "invariant".into(),
                _ => "failed".into(),
            },
            core: None,
            core_variables: vec![],
            core_weights: vec![],
            core_exponent: None,
            exponent_preserved: None,
            milnor_fallback: false,
            iterations: 0,
            trace: Value::Array(vec![]),
            error: Some(e.to_string()),
        },
    }
}

/// Formula values for a given type, with the germ classified when given.
pub fn exponent_report(f: &Poly, vars: &[String], w: &WeightVector) -> Result<AnalysisReport> {
    let mut rep = AnalysisReport::new("exponent", f, vars);
    let verdict = if f.is_zero() {
        loj_wsqh(w)?;
        if w.is_quasihomogeneous_range() {
            Verdict::Qh
        } else {
            Verdict::Wqh
        }
    } else {
        let c = classify(f, w)?;
        rep.classifications.push(ClassificationEntry::new(&c, vars));
        c.verdict
    };
    if verdict.is_some() {
        rep.exponents = exponent_entries(w, verdict)?;
        rep.agreement = agreement(&rep.exponents);
        if rep.agreement.as_ref().is_some_and(|a| !a.consistent) {
            rep.violation("exponent formulas disagree");
        }
    } else {
        rep.diagnostics.notes.push("the germ is not of the given type".into());
    }
    Ok(rep)
}

pub fn milnor_report(f: &Poly, vars: &[String], degree_bound: u32) -> Result<AnalysisReport> {
    let mut rep = AnalysisReport::new("milnor", f, vars);
    rep.milnor = Some(milnor_number(f, degree_bound)?);
    Ok(rep)
}

fn certificate_json(cert: &MembershipCertificate, vars: &[String]) -> Value {
    json!({
        "cofactors": cert.cofactors.iter().map(|c| c.to_text(vars)).collect::<Vec<_>>(),
        "certified_degree": cert.certified_degree,
        "exact": cert.exact,
        "unit": cert.unit.to_text(vars),
        "unit_cofactors": cert.unit_cofactors.iter().map(|c| c.to_text(vars)).collect::<Vec<_>>(),
        "modulus": cert.modulus,
    })
}

/// What a membership query asks.
#[derive(Clone, Debug)]
pub enum MembershipQuery {
    /// Is the target in the gradient ideal?
    Target(Poly),
    /// Smallest `k <= k_max` with `z_i^k` in the ideal of the other partials.
    Power { var: usize, k_max: u32 },
}

pub fn membership_report(f: &Poly, vars: &[String], query: &MembershipQuery, degree_bound: u32) -> Result<AnalysisReport> {
    let mut rep = AnalysisReport::new("membership", f, vars);
    let fragment = match query {
        MembershipQuery::Target(p) => {
            let basis = standard_basis(&f.gradient(), degree_bound, true)?;
            match membership(p, &basis)? {
                Some(cert) => json!({
                    "query": "target",
                    "target": p.to_text(vars),
                    "member": true,
                    "certificate": certificate_json(&cert, vars),
                }),
                None => json!({"query": "target", "target": p.to_text(vars), "member": false}),
            }
        }
        MembershipQuery::Power { var, k_max } => match power_membership(f, *var, *k_max)? {
            Some((k, cert)) => json!({
                "query": "power",
                "variable": vars[*var],
                "k_max": k_max,
                "k": k,
                "certificate": certificate_json(&cert, vars),
            }),
            None => json!({"query": "power", "variable": vars[*var], "k_max": k_max, "k": null}),
        },
    };
    rep.oracles.membership = Some(fragment);
    Ok(rep)
}

pub fn reduce_report(f: &Poly, vars: &[String], w: &WeightVector) -> Result<AnalysisReport> {
    let mut rep = AnalysisReport::new("reduce", f, vars);
    let c = classify(f, w)?;
    rep.classifications.push(ClassificationEntry::new(&c, vars));
    if !c.verdict.is_some() {
        return Err(Error::NotApplicable(format!(
            "the germ is not weakly semiquasihomogeneous of type {w}: {}",
            c.reason.unwrap_or_default()
        )));
    }
    let entry = reduction_entry(f, vars, w);
    match entry.status.as_str() {
        "ok" | "a1" => {}
        "invariant" => rep.violation(entry.error.clone().unwrap_or_default()),
        _ => rep.inconclusive(entry.error.clone().unwrap_or_default()),
    }
    if entry.exponent_preserved == Some(false) {
        rep.violation("reduction changed the exponent");
    }
    rep.reductions.push(entry);
    Ok(rep)
}

/// Where the relation `f = sum g_i df/dz_i` comes from.
#[derive(Clone, Debug)]
pub enum CertificateInput {
    /// Computed from a tracked standard basis of the gradient ideal.
    Compute,
    /// The Euler relation of a weighted homogeneous germ.
    Euler(WeightVector),
    /// User-supplied cofactors `g_i` with `f = sum g_i df/dz_i` exactly.
    Cofactors(Vec<Poly>),
}

pub fn theorem5_report(f: &Poly, vars: &[String], cert: &CertificateInput, opts: &Theorem5Options) -> Result<AnalysisReport> {
    let mut rep = AnalysisReport::new("theorem5", f, vars);
    let supplied = match cert {
        CertificateInput::Compute => None,
        CertificateInput::Euler(w) => Some(euler_certificate(f, w)?),
        CertificateInput::Cofactors(gs) => {
            if gs.len() != f.nvars() {
                return Err(Error::Arity { expected: f.nvars(), got: gs.len() });
            }
            let cert = MembershipCertificate {
                target: f.clone(),
                generators: f.gradient(),
                cofactors: gs.clone(),
                certified_degree: gs.iter().filter_map(Poly::total_degree).max().unwrap_or(1).max(1),
                exact: true,
                unit: Poly::one(f.nvars()),
                unit_cofactors: gs.clone(),
                modulus: None,
            };
            if !cert.verify() {
                return Err(Error::InvalidWeights("the cofactors do not satisfy f = sum g_i df/dz_i".into()));
            }
            Some(cert)
        }
    };
    let ev = theorem5_exponent(f, supplied.as_ref(), opts)?;
    rep.exponents.push(ExponentEntry {
        weights: ev.real_parts.iter().map(|i| i.to_string()).collect(),
        formula: Formula::Thm5,
        value: fmt_q(&ev.value),
        data: None,
    });
    rep.agreement = agreement(&rep.exponents);
    let mut j = ev.to_json();
    j["certificate"] = certificate_json(&ev.certificate, vars);
    rep.oracles.theorem5 = Some(j);
    if !ev.spectrum.converged {
        rep.diagnostics.notes.push("eigenvalue enclosures did not all reach the requested width".into());
    }
    Ok(rep)
}

/// Report for a failed command: the error and its exit code.
pub fn error_json(command: &str, e: &Error) -> Value {
    json!({
        "version": Versions::default(),
        "command": command,
        "status": "error",
        "error": {"kind": e.kind(), "message": e.to_string(), "exit_code": e.exit_code()},
    })
}
