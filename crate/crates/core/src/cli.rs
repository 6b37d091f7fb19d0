//! Command-line front end.
//!
//! Exit codes: 0 success, 2 bad parameters or malformed input, 3 infeasible
//! system, invalid certificate or violated inequality, 4 a built-in
//! construction failed its own verification.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::constructions::{
    combinations_transition, combinations_weights, cyclic_profile_explicit, cyclic_weights,
    kedlaya_transition, kedlaya_weights, lift_cyclic_profile, verify_cyclic_profile, ProfileMatrix,
};
use crate::distributions::{
    dist_from_weights, verify_transition, Certificate, DistSequence, TransitionMatrix,
};
use crate::error::Error;
use crate::gridexpand::{expand_transition, verify_expansion, ExpansionMatrix};
use crate::means::{MeanSpec, WeightFunction};
use crate::rational::{format_rational, RatStr};
use crate::solver::{solve_cyclic_profile, solve_transition, Solved};
use crate::verify::{check_mixed_inequality, random_suite, Sampler};

const DESCRIPTOR_HELP: &str = "\
Family descriptors:
  kedlaya:N      indicators of {1}, {1,2}, ..., {1..N}
  comb:N,K       indicators of all K-subsets of {1..N}, lexicographic
  cyclic:N,K     indicators of the N cyclic windows of length K
  PATH           JSON file: an array of weight vectors (nonnegative
                 integers), an array of distributions (rational strings
                 such as \"1/3\"), or an object with a \"weights\" or
                 \"family\" field holding one of these

Means: power:P, gini:P,Q, qa:log, qa:exp, qa:power:P, min, max (P, Q rational).

Exit codes: 0 ok, 2 bad parameters or input, 3 infeasible / invalid /
violated, 4 self-verification failure.
Set MIXMEAN_THREADS to cap the number of worker threads.";

#[derive(Parser, Debug)]
#[command(
    name = "mixmean",
    version,
    about = "Exact certificates for conjugated families and mixed-mean inequalities",
    after_help = DESCRIPTOR_HELP
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build an explicit family, transition matrix or profile.
    Construct {
        #[command(subcommand)]
        what: Construct,
    },
    /// Decide conjugacy by exact linear programming.
    Solve {
        #[command(subcommand)]
        what: Solve,
    },
    /// Check a certificate exactly.
    Verify {
        #[command(subcommand)]
        what: VerifyCmd,
    },
    /// Expand a transition matrix into an integer repetition matrix.
    Expand(ExpandArgs),
    /// Evaluate the mixed-mean inequality at a point or on seeded samples.
    Inequality(InequalityArgs),
}

#[derive(Subcommand, Debug)]
enum Construct {
    /// Selfconjugacy certificate of the Kedlaya family.
    Kedlaya {
        #[arg(long)]
        n: usize,
    },
    /// Transition matrix between C_n^k and C_n^l (l defaults to k).
    Comb {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        l: Option<usize>,
    },
    /// Transition matrix between O_n^k and O_n^(n-k+1).
    Cyclic {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        /// Must equal n-k+1; use `solve` for other window pairs.
        #[arg(long)]
        l: Option<usize>,
    },
    /// Closed-form profile matrix for (n, min(k, n-k+1), max(k, n-k+1)).
    CyclicProfile {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
}

#[derive(Subcommand, Debug)]
enum Solve {
    /// Find a transition matrix between two families.
    Transition {
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
    },
    /// Find a profile matrix for (n, k, l), k <= l <= n.
    CyclicProfile {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        l: usize,
    },
}

#[derive(Subcommand, Debug)]
enum VerifyCmd {
    /// Verify a transition matrix between two families.
    Transition {
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
        #[arg(long)]
        matrix: PathBuf,
    },
    /// Verify conditions (i)-(iii) of a profile matrix.
    CyclicProfile {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        l: Option<usize>,
        #[arg(long)]
        matrix: PathBuf,
    },
    /// Verify the count identities of an expansion matrix.
    Expansion {
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
        #[arg(long)]
        matrix: PathBuf,
    },
}

#[derive(Args, Debug)]
struct ExpandArgs {
    /// Transition matrix (bare array or a document with a "matrix" field).
    #[arg(long)]
    matrix: PathBuf,
    /// Row weight functions; defaults to the row marginals of the matrix.
    #[arg(long)]
    left: Option<String>,
    /// Column weight functions; defaults to the column marginals.
    #[arg(long)]
    right: Option<String>,
}

#[derive(Args, Debug)]
struct InequalityArgs {
    /// Inner mean on the left-hand side.
    #[arg(long = "M")]
    m: String,
    /// Outer mean on the left-hand side.
    #[arg(long = "N")]
    n: String,
    /// `LEFT/RIGHT` family descriptors.
    #[arg(long)]
    families: Option<String>,
    #[arg(long, conflicts_with = "families")]
    left: Option<String>,
    #[arg(long, conflicts_with = "families", requires = "left")]
    right: Option<String>,
    /// Evaluate at this comma-separated point instead of sampling.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    x: Option<Vec<f64>>,
    #[arg(long, default_value_t = 1000)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Conjugacy certificate; otherwise a built-in one or the solver is used.
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// Run even when (M, N) is not a known Ingham-Jessen pair.
    #[arg(long)]
    force: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Lib(#[from] Error),
    #[error("{path}: {message}")]
    Input { path: PathBuf, message: String },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Lib(
                Error::NotATransition(_) | Error::InvalidProfile(_) | Error::UncertifiedFamilies,
            ) => 3,
            _ => 2,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// A rendered command result.
struct Output {
    json: Value,
    csv: String,
    text: String,
    code: u8,
    message: Option<String>,
}

impl Output {
    fn new(json: Value, csv: String, text: String) -> Self {
        Output {
            json,
            csv,
            text,
            code: 0,
            message: None,
        }
    }

    fn fail(mut self, code: u8, message: impl Into<String>) -> Self {
        self.code = code;
        self.message = Some(message.into());
        self
    }

    fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).expect("values serialize");
                s.push('\n');
                s
            }
            Format::Csv => self.csv.clone(),
            Format::Text => self.text.clone(),
        }
    }
}

fn to_value(value: &impl Serialize) -> Value {
    serde_json::to_value(value).expect("values serialize")
}

/// A family of weight functions named on the command line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Family {
    Kedlaya(usize),
    Comb(usize, usize),
    Cyclic(usize, usize),
    Custom(PathBuf),
}

fn parse_params(text: &str, count: usize) -> Option<Vec<usize>> {
    let params: Vec<usize> = text
        .split(',')
        .map(|p| p.trim().parse().ok())
        .collect::<Option<_>>()?;
    (params.len() == count).then_some(params)
}

impl FromStr for Family {
    type Err = CliError;

    fn from_str(text: &str) -> CliResult<Self> {
        let bad = |kind: &str, shape: &str| {
            CliError::Usage(format!(
                "malformed {kind} descriptor {text:?}, expected {shape}"
            ))
        };
        match text.split_once(':') {
            Some(("kedlaya", p)) => {
                let v = parse_params(p, 1).ok_or_else(|| bad("kedlaya", "kedlaya:N"))?;
                Ok(Family::Kedlaya(v[0]))
            }
            Some(("comb", p)) => {
                let v = parse_params(p, 2).ok_or_else(|| bad("comb", "comb:N,K"))?;
                Ok(Family::Comb(v[0], v[1]))
            }
            Some(("cyclic", p)) => {
                let v = parse_params(p, 2).ok_or_else(|| bad("cyclic", "cyclic:N,K"))?;
                Ok(Family::Cyclic(v[0], v[1]))
            }
            _ => Ok(Family::Custom(PathBuf::from(text))),
        }
    }
}

impl Family {
    pub fn weights(&self) -> CliResult<Vec<WeightFunction>> {
        Ok(match self {
            Family::Kedlaya(n) => kedlaya_weights(*n)?,
            Family::Comb(n, k) => combinations_weights(*n, *k)?,
            Family::Cyclic(n, k) => cyclic_weights(*n, *k)?,
            Family::Custom(path) => custom_family(path)?,
        })
    }
}

fn read_json(path: &Path) -> CliResult<Value> {
    let input_error = |message: String| CliError::Input {
        path: path.to_path_buf(),
        message,
    };
    let text = std::fs::read_to_string(path).map_err(|e| input_error(e.to_string()))?;
    serde_json::from_str(&text).map_err(|e| input_error(e.to_string()))
}

fn decode<T: serde::de::DeserializeOwned>(path: &Path, value: Value) -> CliResult<T> {
    serde_json::from_value(value).map_err(|e| CliError::Input {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

fn custom_family(path: &Path) -> CliResult<Vec<WeightFunction>> {
    let mut value = read_json(path)?;
    for key in ["weights", "family"] {
        if let Some(inner) = value.get_mut(key) {
            value = inner.take();
            break;
        }
    }
    let all_integers = value.as_array().is_some_and(|rows| {
        rows.iter()
            .all(|row| row.as_array().is_some_and(|r| r.iter().all(Value::is_u64)))
    });
    if all_integers {
        return decode(path, value);
    }
    let family: DistSequence = decode(path, value)?;
    Ok(family.to_weights()?)
}

/// Splits `LEFT/RIGHT`, allowing `/` inside file paths.
fn split_families(text: &str) -> CliResult<(Family, Family)> {
    let usable = |part: &str| -> Option<Family> {
        match part.parse::<Family>().ok()? {
            Family::Custom(path) if !path.is_file() => None,
            family => Some(family),
        }
    };
    text.match_indices('/')
        .find_map(|(at, _)| Some((usable(&text[..at])?, usable(&text[at + 1..])?)))
        .ok_or_else(|| {
            CliError::Usage(format!(
                "cannot split {text:?} into LEFT/RIGHT family descriptors"
            ))
        })
}

fn read_transition(path: &Path) -> CliResult<TransitionMatrix> {
    let mut value = read_json(path)?;
    if let Some(inner) = value.get_mut("matrix") {
        value = inner.take();
    }
    decode(path, value)
}

fn read_expansion(path: &Path) -> CliResult<ExpansionMatrix> {
    let mut value = read_json(path)?;
    if let Some(inner) = value.get_mut("expansion") {
        value = inner.take();
    }
    decode(path, value)
}

fn read_profile(
    path: &Path,
    n: Option<usize>,
    k: Option<usize>,
    l: Option<usize>,
) -> CliResult<ProfileMatrix> {
    let mut value = read_json(path)?;
    if let Some(inner) = value.get_mut("profile") {
        value = inner.take();
    }
    if value.is_array() {
        let entries: Vec<Vec<RatStr>> = decode(path, value)?;
        let entries = entries
            .into_iter()
            .map(|row| row.into_iter().map(|v| v.0).collect())
            .collect::<Vec<Vec<_>>>();
        let rows = entries.len();
        let cols = entries.first().map_or(0, Vec::len);
        let (n, k) = (n.unwrap_or(cols), k.unwrap_or(rows));
        let l = l.ok_or_else(|| CliError::Usage("a bare profile array needs --l".into()))?;
        return Ok(ProfileMatrix::new(n, k, l, entries)?);
    }
    let profile: ProfileMatrix = decode(path, value)?;
    for (flag, given, actual) in [
        ("n", n, profile.n()),
        ("k", k, profile.k()),
        ("l", l, profile.l()),
    ] {
        if given.is_some_and(|g| g != actual) {
            return Err(CliError::Usage(format!(
                "--{flag} {} disagrees with the profile header ({actual})",
                given.unwrap_or_default()
            )));
        }
    }
    Ok(profile)
}

fn dist_family(weights: &[WeightFunction]) -> CliResult<DistSequence> {
    Ok(DistSequence::new(
        weights.iter().map(dist_from_weights).collect(),
    )?)
}

fn matrix_text(r: &TransitionMatrix) -> String {
    let mut out = String::new();
    for i in 0..r.rows() {
        let cells: Vec<String> = (0..r.cols())
            .map(|j| format!("({})", r.get(i, j)))
            .collect();
        let _ = writeln!(out, "{}", cells.join(" "));
    }
    out
}

fn profile_text(a: &ProfileMatrix) -> String {
    let mut out = format!("n={} k={} l={}\n", a.n(), a.k(), a.l());
    for row in a.entries() {
        let cells: Vec<String> = row.iter().map(format_rational).collect();
        let _ = writeln!(out, "{}", cells.join(" "));
    }
    out
}

fn csv_field(text: &str) -> String {
    if text.contains([',', '"', '\n']) {
        format!("\"{}\"", text.replace('"', "\"\""))
    } else {
        text.to_string()
    }
}

fn certificate_output(cert: &Certificate) -> Output {
    let mut csv = String::from("location,expected,actual\n");
    let mut text = if cert.is_valid() {
        String::from("valid\n")
    } else {
        format!("invalid: {} failure(s)\n", cert.failures().len())
    };
    for f in cert.failures() {
        let _ = writeln!(
            csv,
            "{},{},{}",
            csv_field(&f.location.to_string()),
            f.expected,
            f.actual
        );
        let _ = writeln!(text, "  {f}");
    }
    let out = Output::new(to_value(cert), csv, text);
    match cert.failures().first() {
        Some(first) => out.fail(3, format!("invalid certificate: {first}")),
        None => out,
    }
}

/// Attaches a self-verification certificate; a failure is an internal bug.
fn construction_output(mut json: Value, csv: String, text: String, cert: &Certificate) -> Output {
    json["certificate"] = to_value(cert);
    let out = Output::new(json, csv, text);
    match cert.failures().first() {
        Some(first) => out.fail(4, format!("self-verification failed: {first}")),
        None => out,
    }
}

fn transition_output(
    kind: &str,
    p: &DistSequence,
    q: &DistSequence,
    r: &TransitionMatrix,
) -> CliResult<Output> {
    let cert = verify_transition(p, q, r)?;
    let json = json!({ "kind": kind, "left": p, "right": q, "matrix": r });
    Ok(construction_output(json, r.to_csv(), matrix_text(r), &cert))
}

fn cmd_construct(what: &Construct) -> CliResult<Output> {
    match *what {
        Construct::Kedlaya { n } => {
            let w = kedlaya_weights(n)?;
            let p = dist_family(&w)?;
            transition_output("kedlaya", &p, &p, &kedlaya_transition(n)?)
        }
        Construct::Comb { n, k, l } => {
            let l = l.unwrap_or(k);
            let r = combinations_transition(n, k, l)?;
            let p = dist_family(&combinations_weights(n, k)?)?;
            let q = dist_family(&combinations_weights(n, l)?)?;
            transition_output("comb", &p, &q, &r)
        }
        Construct::Cyclic { n, k, l } => {
            if k == 0 || k > n {
                return Err(
                    Error::OutOfRange(format!("need 1 <= k <= n, got n={n}, k={k}")).into(),
                );
            }
            let dual = n - k + 1;
            if l.is_some_and(|l| l != dual) {
                return Err(Error::HypothesisViolated(format!(
                    "the explicit cyclic construction pairs k={k} with l={dual}; use `solve transition` for other pairs"
                ))
                .into());
            }
            let profile = cyclic_profile_explicit(n, k)?;
            let lifted = lift_cyclic_profile(n, profile.k(), profile.l(), &profile)?;
            let r = if k <= dual {
                lifted
            } else {
                lifted.transpose()
            };
            let p = dist_family(&cyclic_weights(n, k)?)?;
            let q = dist_family(&cyclic_weights(n, dual)?)?;
            transition_output("cyclic", &p, &q, &r)
        }
        Construct::CyclicProfile { n, k } => {
            let profile = cyclic_profile_explicit(n, k)?;
            let cert = verify_cyclic_profile(n, profile.k(), profile.l(), &profile)?;
            let json = json!({ "kind": "cyclic-profile", "profile": profile });
            Ok(construction_output(
                json,
                profile.to_csv(),
                profile_text(&profile),
                &cert,
            ))
        }
    }
}

fn infeasible_output(phase_one_optimum: &rug::Rational) -> Output {
    let optimum = format_rational(phase_one_optimum);
    Output::new(
        json!({ "status": "infeasible", "phase_one_optimum": optimum }),
        format!("status,phase_one_optimum\ninfeasible,{optimum}\n"),
        format!("infeasible (phase-1 optimum {optimum})\n"),
    )
    .fail(3, "infeasible")
}

fn cmd_solve(what: &Solve) -> CliResult<Output> {
    match what {
        Solve::Transition { left, right } => {
            let p = dist_family(&left.parse::<Family>()?.weights()?)?;
            let q = dist_family(&right.parse::<Family>()?.weights()?)?;
            match solve_transition(&p, &q)? {
                Solved::Feasible { certificate: r } => {
                    let cert = verify_transition(&p, &q, &r)?;
                    let json = json!({ "status": "feasible", "matrix": r });
                    Ok(construction_output(
                        json,
                        r.to_csv(),
                        matrix_text(&r),
                        &cert,
                    ))
                }
                Solved::Infeasible { phase_one_optimum } => {
                    Ok(infeasible_output(&phase_one_optimum))
                }
            }
        }
        &Solve::CyclicProfile { n, k, l } => match solve_cyclic_profile(n, k, l)? {
            Solved::Feasible { certificate: a } => {
                let cert = verify_cyclic_profile(n, k, l, &a)?;
                let json = json!({ "status": "feasible", "profile": a });
                Ok(construction_output(
                    json,
                    a.to_csv(),
                    profile_text(&a),
                    &cert,
                ))
            }
            Solved::Infeasible { phase_one_optimum } => Ok(infeasible_output(&phase_one_optimum)),
        },
    }
}

fn cmd_verify(what: &VerifyCmd) -> CliResult<Output> {
    let cert = match what {
        VerifyCmd::Transition {
            left,
            right,
            matrix,
        } => {
            let p = dist_family(&left.parse::<Family>()?.weights()?)?;
            let q = dist_family(&right.parse::<Family>()?.weights()?)?;
            verify_transition(&p, &q, &read_transition(matrix)?)?
        }
        VerifyCmd::CyclicProfile { n, k, l, matrix } => {
            let a = read_profile(matrix, *n, *k, *l)?;
            verify_cyclic_profile(a.n(), a.k(), a.l(), &a)?
        }
        VerifyCmd::Expansion {
            left,
            right,
            matrix,
        } => {
            let f = left.parse::<Family>()?.weights()?;
            let g = right.parse::<Family>()?.weights()?;
            verify_expansion(&read_expansion(matrix)?, &f, &g)?
        }
    };
    Ok(certificate_output(&cert))
}

fn cmd_expand(args: &ExpandArgs) -> CliResult<Output> {
    let r = read_transition(&args.matrix)?;
    let weights =
        |descriptor: &Option<String>, marginals: DistSequence| -> CliResult<Vec<WeightFunction>> {
            match descriptor {
                Some(d) => d.parse::<Family>()?.weights(),
                None => Ok(marginals.to_weights()?),
            }
        };
    let f = weights(&args.left, r.row_marginals()?)?;
    let g = weights(&args.right, r.col_marginals()?)?;
    let e = expand_transition(&f, &g, &r)?;
    let cert = verify_expansion(&e, &f, &g)?;
    let csv = e
        .entries()
        .iter()
        .map(|row| {
            row.iter()
                .map(usize::to_string)
                .collect::<Vec<_>>()
                .join(",")
                + "\n"
        })
        .collect();
    let json = json!({ "expansion": e });
    Ok(construction_output(json, csv, e.to_string(), &cert))
}

/// A transition matrix for two built-in families when one is known in
/// closed form.
fn builtin_certificate(left: &Family, right: &Family) -> CliResult<Option<TransitionMatrix>> {
    Ok(match (left, right) {
        (Family::Kedlaya(a), Family::Kedlaya(b)) if a == b => Some(kedlaya_transition(*a)?),
        (Family::Comb(n, k), Family::Comb(n2, l)) if n == n2 && *n < k + l => {
            combinations_transition(*n, *k, *l).ok()
        }
        (Family::Cyclic(n, k), Family::Cyclic(n2, l)) if n == n2 && *n < k + l => {
            let (lo, hi) = ((*k).min(*l), (*k).max(*l));
            match solve_cyclic_profile(*n, lo, hi)
                .ok()
                .and_then(Solved::feasible)
            {
                Some(a) => {
                    let r = lift_cyclic_profile(*n, lo, hi, &a)?;
                    Some(if k <= l { r } else { r.transpose() })
                }
                None => None,
            }
        }
        _ => None,
    })
}

fn cmd_inequality(args: &InequalityArgs) -> CliResult<Output> {
    let m: MeanSpec = args.m.parse()?;
    let n: MeanSpec = args.n.parse()?;
    let (left, right) = match (&args.families, &args.left, &args.right) {
        (Some(pair), _, _) => split_families(pair)?,
        (None, Some(l), Some(r)) => (l.parse()?, r.parse()?),
        (None, Some(l), None) => (l.parse()?, l.parse()?),
        _ => {
            return Err(CliError::Usage(
                "give --families LEFT/RIGHT or --left/--right".into(),
            ))
        }
    };
    let f = left.weights()?;
    let g = right.weights()?;
    let families = format!("{}/{}", describe(&left), describe(&right));
    if let Some(x) = &args.x {
        let mut report = check_mixed_inequality(&m, &n, &f, &g, x)?;
        report.families = Some(families);
        let csv = format!(
            "lhs,rhs,slack,holds\n{},{},{},{}\n",
            report.lhs, report.rhs, report.slack, report.holds
        );
        let text = format!(
            "lhs   = {}\nrhs   = {}\nslack = {}\n{}\n",
            report.lhs,
            report.rhs,
            report.slack,
            if report.holds { "holds" } else { "violated" }
        );
        let out = Output::new(to_value(&report), csv, text);
        return Ok(if report.holds {
            out
        } else {
            out.fail(3, "inequality violated")
        });
    }
    let certificate = match &args.matrix {
        Some(path) => Some(read_transition(path)?),
        None => builtin_certificate(&left, &right)?,
    };
    let sampler = Sampler::new(args.count, args.seed);
    let report = random_suite(&m, &n, &f, &g, &sampler, certificate.as_ref(), args.force)?;
    let mut json = to_value(&report);
    json["families"] = Value::String(families);
    let csv = format!(
        "count,failures,min_slack,seed\n{},{},{},{}\n",
        report.count, report.failures, report.min_slack, report.seed
    );
    let text = format!(
        "{} samples, {} failure(s), min relative slack {} at x = {:?}\n",
        report.count, report.failures, report.min_slack, report.argmin_x
    );
    let out = Output::new(json, csv, text);
    Ok(if report.failures == 0 {
        out
    } else {
        let message = format!(
            "{} of {} samples violate the inequality",
            report.failures, report.count
        );
        out.fail(3, message)
    })
}

fn describe(family: &Family) -> String {
    match family {
        Family::Kedlaya(n) => format!("kedlaya:{n}"),
        Family::Comb(n, k) => format!("comb:{n},{k}"),
        Family::Cyclic(n, k) => format!("cyclic:{n},{k}"),
        Family::Custom(path) => path.display().to_string(),
    }
}

fn execute(cli: &Cli) -> CliResult<Output> {
    match &cli.command {
        Command::Construct { what } => cmd_construct(what),
        Command::Solve { what } => cmd_solve(what),
        Command::Verify { what } => cmd_verify(what),
        Command::Expand(args) => cmd_expand(args),
        Command::Inequality(args) => cmd_inequality(args),
    }
}

/// Runs the command line `args` (including the program name) and returns the
/// exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let output = match execute(&cli) {
        Ok(output) => output,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return e.exit_code();
        }
    };
    let rendered = output.render(cli.format);
    let written = match &cli.out {
        Some(path) => {
            std::fs::write(path, rendered).map_err(|e| format!("{}: {e}", path.display()))
        }
        None => stdout
            .write_all(rendered.as_bytes())
            .map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: {e}");
        return 2;
    }
    if let Some(message) = &output.message {
        let _ = writeln!(stderr, "{message}");
    }
    output.code
}

/// Caps the global worker pool at `MIXMEAN_THREADS` when it is set.
pub fn init_threads() {
    if let Some(threads) = std::env::var("MIXMEAN_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&t| t > 0)
    {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
}
