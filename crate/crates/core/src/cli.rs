//! Command-line front end. [`run`] takes the argument vector and output
//! streams so it can be driven from tests; the binary only forwards to it.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error, 3 budget or
//! capacity exceeded. Errors go to standard error as one JSON object per line.

use std::io::Write;
use std::path::PathBuf;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::asymptotics::{self, EvalMode, Log2Estimate};
use crate::boolfn::{ci_order, walsh_transform, BooleanFunction};
use crate::enumerate::{census, count_single, Budget, CensusOptions, CensusTable};
use crate::error::Error;
use crate::gf_oracle;
use crate::hadamard;
use crate::oa;

/// Environment variable holding the default worker count.
pub const WORKERS_ENV: &str = "CI_COUNT_WORKERS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "ci-count",
    version,
    about = "Correlation-immune boolean functions: spectra, exact counts and estimates"
)]
pub struct RunConfig {
    /// Worker threads for exhaustive censuses [env: CI_COUNT_WORKERS, default 1].
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    pub workers: Option<u32>,
    /// Output format; each subcommand has its own default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    /// Wall-clock limit for exhaustive censuses.
    #[arg(long, global = true)]
    pub budget_seconds: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EstimateMethod {
    Denisov,
    Main,
    Resilient,
    Nk,
    K1,
    Smallq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exact,
    Logspace,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Walsh spectrum and correlation-immunity order of one function.
    Analyze {
        #[arg(long)]
        n: u32,
        /// Bit string of length 2^n (index 0 first) or hex.
        #[arg(long)]
        truth_table: String,
    },
    /// Exact census N(n,k,q).
    Count(CountArgs),
    /// Log2 estimate from one of the closed forms.
    Estimate {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        q: Option<u64>,
        #[arg(long, value_enum, default_value = "main")]
        method: EstimateMethod,
        /// Evaluation route for the k = 1 form.
        #[arg(long, value_enum, default_value = "logspace")]
        mode: Mode,
    },
    /// Exact census against the main estimate, for every q.
    Compare(CompareArgs),
    /// Orthogonal-array validation and export.
    #[command(subcommand)]
    Oa(OaCommand),
    /// Mechanical checks of the counting identities.
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Hadamard-matrix counts.
    #[command(subcommand)]
    Hadamard(HadamardCommand),
}

#[derive(Debug, Args)]
pub struct CountArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub k: u32,
    #[arg(long)]
    pub q: Option<u64>,
    /// Permit n = 6.
    #[arg(long)]
    pub allow_large: bool,
    /// Upper bound on support sets visited.
    #[arg(long)]
    pub max_combinations: Option<u128>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub k: u32,
    #[arg(long)]
    pub allow_large: bool,
}

#[derive(Debug, Subcommand)]
pub enum OaCommand {
    /// Check that a row file is an orthogonal array of strength k.
    Check {
        file: PathBuf,
        #[arg(long)]
        k: u32,
    },
    /// Print the support of a function as orthogonal-array rows.
    Export {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        truth_table: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum VerifyCommand {
    /// Generating-function constant terms against the census, every q.
    Lemma2 {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        k: u32,
    },
    /// Critical-lattice cardinality against 2^Q.
    Lemma3 {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        k: u32,
    },
}

#[derive(Debug, Subcommand)]
pub enum HadamardCommand {
    Count {
        #[arg(long)]
        order: usize,
        /// Permit the backtracking search above order 4.
        #[arg(long)]
        allow_large: bool,
    },
    /// H_n against 2^n n! N(n-1, 2, n/4).
    Identity {
        #[arg(long)]
        order: usize,
    },
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Capacity(_) | Error::BudgetExceeded(_) => EXIT_BUDGET,
        Error::Structure(_) => EXIT_VERIFY_FAILED,
        _ => EXIT_USAGE,
    }
}

fn report_error(err: &mut dyn Write, kind: &str, message: &str) {
    let line = json!({ "error": kind, "message": message.replace('\n', " ").trim() });
    let _ = writeln!(err, "{line}");
}

/// Parses `argv` (program name first) and runs the subcommand.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return EXIT_OK;
            }
            report_error(err, "UsageError", &e.to_string());
            return EXIT_USAGE;
        }
    };
    match execute(&config, out) {
        Ok(code) => code,
        Err(e) => {
            report_error(err, e.kind(), &e.to_string());
            exit_code(&e)
        }
    }
}

/// Flag, then environment, then 1.
fn resolve_workers(flag: Option<u32>) -> crate::Result<usize> {
    if let Some(w) = flag {
        return Ok(w as usize);
    }
    match std::env::var(WORKERS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(w) if w >= 1 => Ok(w),
            _ => Err(Error::Range(format!(
                "{WORKERS_ENV} must be a positive integer, got {v:?}"
            ))),
        },
        Err(_) => Ok(1),
    }
}

fn census_options(
    config: &RunConfig,
    allow_large: bool,
    max_combinations: Option<u128>,
) -> crate::Result<CensusOptions> {
    let mut budget = Budget {
        max_duration: config.budget_seconds.map(Duration::from_secs),
        ..Budget::default()
    };
    if let Some(m) = max_combinations {
        budget.max_combinations = m;
    }
    Ok(CensusOptions {
        workers: resolve_workers(config.workers)?,
        budget,
        allow_large,
    })
}

fn emit_json(out: &mut dyn Write, value: &impl Serialize) -> crate::Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Parse(e.to_string()))?;
    writeln!(out, "{text}")?;
    Ok(())
}

fn emit_csv<R: Serialize>(out: &mut dyn Write, rows: &[R]) -> crate::Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Error::Parse(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
    out.write_all(&bytes)?;
    Ok(())
}

fn execute(config: &RunConfig, out: &mut dyn Write) -> crate::Result<i32> {
    let format = config.format;
    match &config.command {
        Command::Analyze { n, truth_table } => {
            let f = BooleanFunction::parse(*n, truth_table)?;
            let spectrum = walsh_transform(&f);
            let profile = ci_order(&spectrum);
            emit_json(
                out,
                &json!({
                    "n": n,
                    "weight": profile.weight,
                    "spectrum": spectrum.coeffs(),
                    "ci_order": profile.ci_order,
                    "q_at_order": profile.q_at_order,
                    "resilient_order": profile.resilient_order,
                }),
            )?;
            Ok(EXIT_OK)
        }
        Command::Count(args) => {
            let opts = census_options(config, args.allow_large, args.max_combinations)?;
            let table = match args.q {
                Some(q) => {
                    let e = count_single(args.n, args.k, q, &opts)?;
                    CensusTable {
                        n: e.n,
                        k: e.k,
                        entries: vec![e],
                        total: e.count,
                    }
                }
                None => census(args.n, args.k, &opts)?,
            };
            match format.unwrap_or(OutputFormat::Csv) {
                OutputFormat::Csv => write!(out, "{}", table.to_csv())?,
                OutputFormat::Json => emit_json(out, &table)?,
            }
            Ok(EXIT_OK)
        }
        Command::Estimate {
            n,
            k,
            q,
            method,
            mode,
        } => {
            let estimate = run_estimate(*n, *k, *q, *method, *mode)?;
            match format.unwrap_or(OutputFormat::Json) {
                OutputFormat::Json => emit_json(out, &estimate)?,
                OutputFormat::Csv => emit_csv(out, &[EstimateRow::from(&estimate)])?,
            }
            Ok(EXIT_OK)
        }
        Command::Compare(args) => {
            let opts = census_options(config, args.allow_large, None)?;
            let rows = compare(args.n, args.k, &opts)?;
            match format.unwrap_or(OutputFormat::Csv) {
                OutputFormat::Csv => emit_csv(
                    out,
                    &rows.iter().map(CompareCsvRow::from).collect::<Vec<_>>(),
                )?,
                OutputFormat::Json => emit_json(out, &rows)?,
            }
            Ok(EXIT_OK)
        }
        Command::Oa(OaCommand::Check { file, k }) => {
            let (n, rows) = oa::read_rows(file)?;
            let report = oa::check_strength(n, &rows, *k)?;
            emit_json(out, &report)?;
            Ok(if report.holds {
                EXIT_OK
            } else {
                EXIT_VERIFY_FAILED
            })
        }
        Command::Oa(OaCommand::Export { n, truth_table }) => {
            let f = BooleanFunction::parse(*n, truth_table)?;
            write!(out, "{}", oa::write_rows(&oa::to_orthogonal_array(&f)))?;
            Ok(EXIT_OK)
        }
        Command::Verify(VerifyCommand::Lemma2 { n, k }) => {
            let opts = census_options(config, false, None)?;
            let mut rows = Vec::new();
            for q in 0..=1u64 << n.saturating_sub(*k).min(63) {
                let generating = gf_oracle::constant_term_count(*n, *k, q)?;
                let exact = count_single(*n, *k, q, &opts)?.count;
                rows.push(json!({ "q": q, "constant_term": generating, "census": exact, "pass": generating == exact }));
            }
            let pass = rows.iter().all(|r| r["pass"] == true);
            emit_json(
                out,
                &json!({ "check": "lemma2", "n": n, "k": k, "pass": pass, "rows": rows }),
            )?;
            Ok(if pass { EXIT_OK } else { EXIT_VERIFY_FAILED })
        }
        Command::Verify(VerifyCommand::Lemma3 { n, k }) => {
            let c = gf_oracle::lattice_count(*n, *k)?;
            let pass = c.agrees();
            emit_json(
                out,
                &json!({
                    "check": "lemma3",
                    "n": n,
                    "k": k,
                    "pass": pass,
                    "count": c.count.to_string(),
                    "expected": c.expected.to_string(),
                    "grid_count": c.grid_count.as_ref().map(|g| g.to_string()),
                    "q_exponent": c.q_exponent,
                }),
            )?;
            Ok(if pass { EXIT_OK } else { EXIT_VERIFY_FAILED })
        }
        Command::Hadamard(HadamardCommand::Count { order, allow_large }) => {
            let count = hadamard::count_hadamard(*order, *allow_large)?;
            emit_json(out, &json!({ "order": order, "count": count.to_string() }))?;
            Ok(EXIT_OK)
        }
        Command::Hadamard(HadamardCommand::Identity { order }) => {
            let report =
                hadamard::verify_identity(*order, false, &census_options(config, false, None)?)?;
            emit_json(out, &report)?;
            Ok(if report.holds {
                EXIT_OK
            } else {
                EXIT_VERIFY_FAILED
            })
        }
    }
}

fn require_q(q: Option<u64>, method: &str) -> crate::Result<u64> {
    q.ok_or_else(|| Error::Range(format!("method {method} needs --q")))
}

fn exact_one(method: asymptotics::Method, note: String) -> Log2Estimate {
    Log2Estimate {
        method,
        log2_value: 0.0,
        valid: true,
        eta: None,
        in_kbounds: None,
        in_krange: None,
        notes: vec![note],
    }
}

/// Evaluates the requested closed form; `λ ∈ {0, 1}` short-circuits to the
/// exact count 1 for the main estimate.
pub fn run_estimate(
    n: u32,
    k: u32,
    q: Option<u64>,
    method: EstimateMethod,
    mode: Mode,
) -> crate::Result<Log2Estimate> {
    let k1_only = |name: &str| {
        if k != 1 {
            Err(Error::Range(format!(
                "method {name} is defined for k = 1 only"
            )))
        } else {
            Ok(())
        }
    };
    match method {
        EstimateMethod::Main => {
            let p = asymptotics::params(n, k, require_q(q, "main")?)?;
            match asymptotics::estimate_main(&p) {
                Err(Error::Domain(msg)) => Ok(exact_one(
                    asymptotics::Method::Main,
                    format!("exact: {msg}"),
                )),
                other => other,
            }
        }
        EstimateMethod::Resilient => asymptotics::estimate_resilient(n, k),
        EstimateMethod::Nk => asymptotics::estimate_nk(n, k),
        EstimateMethod::Denisov => asymptotics::estimate_denisov(n, k),
        EstimateMethod::K1 => {
            k1_only("k1")?;
            let mode = if mode == Mode::Exact {
                EvalMode::Exact
            } else {
                EvalMode::LogSpace
            };
            asymptotics::estimate_k1_exact_form(n, require_q(q, "k1")?, mode)
        }
        EstimateMethod::Smallq => {
            k1_only("smallq")?;
            asymptotics::estimate_small_q(n, require_q(q, "smallq")?)
        }
    }
}

#[derive(Debug, Serialize)]
struct EstimateRow {
    method: &'static str,
    log2_value: f64,
    valid: bool,
    eta: Option<f64>,
    in_kbounds: Option<bool>,
    in_krange: Option<bool>,
    notes: String,
}

impl From<&Log2Estimate> for EstimateRow {
    fn from(e: &Log2Estimate) -> Self {
        Self {
            method: e.method.as_str(),
            log2_value: e.log2_value,
            valid: e.valid,
            eta: e.eta,
            in_kbounds: e.in_kbounds,
            in_krange: e.in_krange,
            notes: e.notes.join("; "),
        }
    }
}

/// One line of the exact-versus-estimate table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareRow {
    pub q: u64,
    pub exact_count: u64,
    pub log2_exact: f64,
    pub log2_estimate: f64,
    pub ratio: f64,
    pub eta: Option<f64>,
}

#[derive(Debug, Serialize)]
struct CompareCsvRow {
    q: u64,
    exact_count: u64,
    log2_exact: String,
    log2_estimate: f64,
    ratio: f64,
    eta: Option<f64>,
}

impl From<&CompareRow> for CompareCsvRow {
    fn from(r: &CompareRow) -> Self {
        Self {
            q: r.q,
            exact_count: r.exact_count,
            log2_exact: if r.log2_exact.is_finite() {
                r.log2_exact.to_string()
            } else {
                "-inf".into()
            },
            log2_estimate: r.log2_estimate,
            ratio: r.ratio,
            eta: r.eta,
        }
    }
}

/// Exact census next to the main estimate for every `q`; the degenerate
/// weights use the exact count 1 as their estimate.
pub fn compare(n: u32, k: u32, opts: &CensusOptions) -> crate::Result<Vec<CompareRow>> {
    let table = census(n, k, opts)?;
    table
        .entries
        .iter()
        .map(|e| {
            let p = asymptotics::params(n, k, e.q)?;
            let log2_estimate = if p.is_degenerate() {
                0.0
            } else {
                asymptotics::estimate_main(&p)?.log2_value
            };
            let log2_exact = if e.count == 0 {
                f64::NEG_INFINITY
            } else {
                (e.count as f64).log2()
            };
            Ok(CompareRow {
                q: e.q,
                exact_count: e.count,
                log2_exact,
                log2_estimate,
                ratio: (log2_exact - log2_estimate).exp2(),
                eta: p.eta,
            })
        })
        .collect()
}
