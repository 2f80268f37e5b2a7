use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::Value;

use loj_core::error::{Error, Result};
use loj_core::localring::DEFAULT_DEGREE_BOUND;
use loj_core::poly::{parse, Poly, WeightVector};
use loj_core::rational::{parse_rational, Q};
use loj_core::report::{
    analyze, error_json, exponent_report, membership_report, milnor_report, reduce_report, theorem5_report,
    AnalysisReport, AnalyzeOptions, CertificateInput, MembershipQuery, Oracle,
};
use loj_core::saito5::Theorem5Options;

/// Łojasiewicz gradient exponents of weighted semiquasihomogeneous germs.
///
/// Exit codes: 0 ok, 1 usage or parse error, 2 inconclusive or budget hit,
/// 3 internal invariant violation.
#[derive(Parser, Debug)]
#[command(name = "loj", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Comma-separated variable names; inferred from the polynomial when absent
    #[arg(short = 'v', long = "vars", global = true)]
    vars: Option<String>,
    /// Print only the JSON report
    #[arg(long, global = true)]
    json: bool,
    /// Seed for randomized oracles
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    /// Degree bound for local standard bases
    #[arg(long, default_value_t = DEFAULT_DEGREE_BOUND, global = true)]
    degree_bound: u32,
    /// Width tolerance for eigenvalue enclosures, as p/q
    #[arg(long, default_value = "1/18446744073709551616", global = true)]
    tol: String,
    /// Omit wall-clock timings from the report
    #[arg(long, global = true)]
    no_timings: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify the germ, evaluate every applicable formula and run oracles
    Analyze {
        polynomial: String,
        /// Weight type `d;l1,...` or `l1,...` (d = 1); discovered when absent
        #[arg(long, allow_hyphen_values = true)]
        weights: Option<String>,
        /// Oracles to run: curves, milnor, reduce, theorem5 (or `none`)
        #[arg(long, default_value = "curves,milnor,reduce")]
        oracle: String,
        /// Largest exponent of monomial test curves
        #[arg(long, default_value_t = 6)]
        max_exp: u32,
        /// Random test curves per exponent pattern
        #[arg(long, default_value_t = 32)]
        trials: u32,
        #[command(flatten)]
        common: Common,
    },
    /// Exponent formulas for a weight type, optionally checked against a germ
    Exponent {
        #[arg(long, allow_hyphen_values = true)]
        weights: String,
        polynomial: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Milnor number of the germ at the origin
    Milnor {
        polynomial: String,
        #[command(flatten)]
        common: Common,
    },
    /// Membership in the gradient ideal, or power search in a deleted gradient
    Membership {
        polynomial: String,
        /// Target polynomial tested against the full gradient ideal
        #[arg(long, conflicts_with = "power")]
        target: Option<String>,
        /// Variable whose powers are tested against the other partials
        #[arg(long)]
        power: Option<String>,
        #[arg(long, default_value_t = 8)]
        kmax: u32,
        #[command(flatten)]
        common: Common,
    },
    /// Reduce a weakly semiquasihomogeneous germ to a semiquasihomogeneous core
    Reduce {
        polynomial: String,
        #[arg(long, allow_hyphen_values = true)]
        weights: String,
        #[command(flatten)]
        common: Common,
    },
    /// Exponent from the linear part of a relation f = sum g_i df/dz_i
    Theorem5 {
        polynomial: String,
        /// JSON file `{"cofactors": ["g_1", ...]}`
        #[arg(long, conflicts_with = "euler_weights")]
        cert: Option<PathBuf>,
        /// Use the Euler relation of this quasihomogeneous type
        #[arg(long, allow_hyphen_values = true)]
        euler_weights: Option<String>,
        #[command(flatten)]
        common: Common,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Analyze { .. } => "analyze",
            Command::Exponent { .. } => "exponent",
            Command::Milnor { .. } => "milnor",
            Command::Membership { .. } => "membership",
            Command::Reduce { .. } => "reduce",
            Command::Theorem5 { .. } => "theorem5",
        }
    }

    fn common(&self) -> &Common {
        match self {
            Command::Analyze { common, .. }
            | Command::Exponent { common, .. }
            | Command::Milnor { common, .. }
            | Command::Membership { common, .. }
            | Command::Reduce { common, .. }
            | Command::Theorem5 { common, .. } => common,
        }
    }
}

/// Identifiers in order of first appearance.
fn infer_vars(texts: &[&str]) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for text in texts {
        let mut cur = String::new();
        for ch in text.chars().chain(std::iter::once(' ')) {
            if ch.is_alphanumeric() || ch == '_' {
                if cur.is_empty() && ch.is_ascii_digit() {
                    continue;
                }
                cur.push(ch);
            } else if !cur.is_empty() {
                if !out.contains(&cur) {
                    out.push(cur.clone());
                }
                cur.clear();
            }
        }
    }
    out
}

fn resolve_vars(common: &Common, texts: &[&str]) -> Vec<String> {
    match &common.vars {
        Some(v) => v.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect(),
        None => infer_vars(texts),
    }
}

fn tol(common: &Common) -> Result<Q> {
    let t = parse_rational(&common.tol)?;
    if t <= Q::from_integer(0.into()) {
        return Err(Error::InvalidWeights("tolerance must be positive".into()));
    }
    Ok(t)
}

fn load_cofactors(path: &PathBuf, vars: &[String]) -> Result<Vec<Poly>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::syntax(0, format!("{}: {e}", path.display())))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| Error::syntax(0, format!("{}: {e}", path.display())))?;
    let list = v
        .get("cofactors")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::syntax(0, "certificate file needs a `cofactors` array of strings"))?;
    list.iter()
        .map(|g| g.as_str().ok_or_else(|| Error::syntax(0, "cofactors must be strings")).and_then(|s| parse(s, vars)))
        .collect()
}

fn run(cmd: &Command) -> Result<AnalysisReport> {
    let common = cmd.common();
    match cmd {
        Command::Analyze { polynomial, weights, oracle, max_exp, trials, .. } => {
            let vars = resolve_vars(common, &[polynomial]);
            let f = parse(polynomial, &vars)?;
            let oracles: BTreeSet<Oracle> = Oracle::parse_list(oracle)?;
            let opts = AnalyzeOptions {
                weights: weights.as_deref().map(WeightVector::parse).transpose()?,
                oracles,
                seed: common.seed,
                degree_bound: common.degree_bound,
                tol: tol(common)?,
                max_exponent: *max_exp,
                trials: *trials,
                timings: !common.no_timings,
                ..Default::default()
            };
            analyze(&f, &vars, &opts)
        }
        Command::Exponent { weights, polynomial, .. } => {
            let w = WeightVector::parse(weights)?;
            let (f, vars) = match polynomial {
                Some(p) => {
                    let vars = resolve_vars(common, &[p]);
                    (parse(p, &vars)?, vars)
                }
                None => {
                    let vars = match &common.vars {
                        Some(_) => resolve_vars(common, &[]),
                        None => (1..=w.len()).map(|i| format!("z{i}")).collect(),
                    };
                    (Poly::zero(vars.len()), vars)
                }
            };
            if vars.len() != w.len() {
                return Err(Error::Arity { expected: vars.len(), got: w.len() });
            }
            exponent_report(&f, &vars, &w)
        }
        Command::Milnor { polynomial, .. } => {
            let vars = resolve_vars(common, &[polynomial]);
            milnor_report(&parse(polynomial, &vars)?, &vars, common.degree_bound)
        }
        Command::Membership { polynomial, target, power, kmax, .. } => {
            let mut texts = vec![polynomial.as_str()];
            texts.extend(target.as_deref());
            let vars = resolve_vars(common, &texts);
            let f = parse(polynomial, &vars)?;
            let query = match (target, power) {
                (Some(t), None) => MembershipQuery::Target(parse(t, &vars)?),
                (None, Some(v)) => {
                    let var = vars.iter().position(|x| x == v).ok_or_else(|| Error::UnknownVariable { name: v.clone(), offset: 0 })?;
                    MembershipQuery::Power { var, k_max: *kmax }
                }
                _ => return Err(Error::syntax(0, "give exactly one of --target or --power")),
            };
            membership_report(&f, &vars, &query, common.degree_bound)
        }
        Command::Reduce { polynomial, weights, .. } => {
            let vars = resolve_vars(common, &[polynomial]);
            reduce_report(&parse(polynomial, &vars)?, &vars, &WeightVector::parse(weights)?)
        }
        Command::Theorem5 { polynomial, cert, euler_weights, .. } => {
            let vars = resolve_vars(common, &[polynomial]);
            let f = parse(polynomial, &vars)?;
            let input = match (cert, euler_weights) {
                (Some(path), _) => CertificateInput::Cofactors(load_cofactors(path, &vars)?),
                (None, Some(w)) => CertificateInput::Euler(WeightVector::parse(w)?),
                (None, None) => CertificateInput::Compute,
            };
            let opts = Theorem5Options { tol: tol(common)?, degree_bound: common.degree_bound, ..Default::default() };
            theorem5_report(&f, &vars, &input, &opts)
        }
    }
}

fn summary(rep: &AnalysisReport) {
    if !(rep.command == "exponent" && rep.input.polynomial == "0") {
        println!("germ: {}  [{}]", rep.input.polynomial, rep.input.variables.join(", "));
    }
    for c in &rep.classifications {
        let verdict = serde_json::to_value(c.verdict).unwrap_or(Value::Null);
        println!("type ({}): {}", c.weights.join(", "), verdict.as_str().unwrap_or("?"));
    }
    for e in &rep.exponents {
        let formula = serde_json::to_value(e.formula).unwrap_or(Value::Null);
        println!("exponent via {}: {}", formula.as_str().unwrap_or("?"), e.value);
    }
    if let Some(a) = &rep.agreement {
        match &a.value {
            Some(v) => println!("exponent: {v}"),
            None => println!("exponent: formulas disagree ({})", a.values.join(", ")),
        }
    }
    if let Some(m) = &rep.milnor {
        match m.finite() {
            Some(mu) => println!("milnor number: {mu}"),
            None => println!("milnor number: infinite (non-isolated)"),
        }
    }
    if let Some(c) = &rep.oracles.curves {
        println!("curve lower bound: {}", loj_core::rational::fmt_q(&c.lower_bound.value));
    }
    if let Some(m) = &rep.oracles.membership {
        match (m.get("member").and_then(Value::as_bool), m.get("k")) {
            (Some(true), _) => println!("membership: member"),
            (Some(false), _) => println!("membership: not a member"),
            (None, Some(Value::Number(k))) => println!("membership: smallest power k = {k}"),
            (None, _) => println!("membership: no power up to the bound"),
        }
    }
    if let Some(t) = &rep.oracles.theorem5 {
        if let Some(parts) = t.get("real_parts").and_then(Value::as_array) {
            println!("eigenvalue real parts: {} enclosures", parts.len());
        }
    }
    for r in &rep.reductions {
        match &r.core {
            Some(_) if r.status == "a1" => println!("reduction ({}): type A1, exponent 1", r.weights.join(", ")),
            Some(core) => println!(
                "reduction ({}): core {} of type ({}), exponent {}",
                r.weights.join(", "),
                core,
                r.core_weights.join(", "),
                r.core_exponent.as_deref().unwrap_or("?")
            ),
            None => println!("reduction ({}): {}", r.weights.join(", "), r.error.as_deref().unwrap_or("")),
        }
    }
    for n in rep.diagnostics.violations.iter().chain(&rep.diagnostics.inconclusive) {
        println!("warning: {n}");
    }
}

fn emit(v: &Value) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let _ = serde_json::to_writer_pretty(&mut out, v);
    let _ = writeln!(out);
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let json_only = cli.command.common().json;
    match run(&cli.command) {
        Ok(rep) => {
            if json_only {
                emit(&rep.to_json());
            } else {
                summary(&rep);
            }
            ExitCode::from(rep.status.exit_code() as u8)
        }
        Err(e) => {
            if json_only {
                emit(&error_json(cli.command.name(), &e));
            } else {
                eprintln!("error: {e}");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
