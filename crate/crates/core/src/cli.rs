//! `list` and `verify` subcommands.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::ExecPolicy;
use crate::identities::{
    sample_with_guard, verify, verify_with, IdentityId, Mode, SamplerConfig, VerificationReport, CATALOG,
};
use crate::scalar::QBase;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Parser)]
#[command(name = "qbilinear", version, about = "Verify basic hypergeometric transformation formulas")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the identity registry.
    List,
    /// Sample admissible parameters and compare both sides.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    #[default]
    Exact,
    Float,
}

#[derive(Clone, Debug, Args)]
pub struct VerifyArgs {
    /// Identity id, e.g. MF or GBL.
    #[arg(long)]
    pub identity: String,
    /// Base q, a rational in (0, 1).
    #[arg(long, default_value = "1/2")]
    pub q: String,
    /// Termination index: a single value or a half-open range `a..b`.
    #[arg(long = "N", default_value = "2")]
    pub n: String,
    /// Truncation order for formal identities.
    #[arg(long, default_value_t = crate::powerseries::DEFAULT_ORDER)]
    pub order: usize,
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Precision::Exact)]
    pub mode: Precision,
    /// Write the JSON document here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Dimension signature, comma separated (e.g. `2,1,2,2`); defaults to
    /// cycling through the identity's standard signatures.
    #[arg(long)]
    pub dims: Option<String>,
    /// Worker threads; 1 runs sequentially.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Include wall-clock timings in the output (not reproducible).
    #[arg(long)]
    pub timing: bool,
}

/// Validated settings of a verification campaign.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub identity: IdentityId,
    #[serde(serialize_with = "display")]
    pub q: QBase,
    #[serde(rename = "N")]
    pub n_values: Vec<usize>,
    pub order: usize,
    pub trials: usize,
    pub seed: u64,
    pub mode: Precision,
    pub dims: Vec<Vec<usize>>,
    // Left out of the report so output does not depend on the pool size.
    #[serde(skip)]
    pub threads: Option<usize>,
    pub timing: bool,
}

fn display<S: serde::Serializer>(q: &QBase, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&q.to_string())
}

fn parse_n(text: &str) -> Result<Vec<usize>> {
    let bad = || Error::Config(format!("--N expects `k` or `a..b`, got {text:?}"));
    if let Some((a, b)) = text.split_once("..") {
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b.trim().parse().map_err(|_| bad())?;
        if a >= b {
            return Err(bad());
        }
        Ok((a..b).collect())
    } else {
        Ok(vec![text.trim().parse().map_err(|_| bad())?])
    }
}

fn parse_dims(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| Error::Config(format!("--dims expects comma-separated sizes, got {text:?}")))
        })
        .collect()
}

impl RunConfig {
    pub fn from_args(args: &VerifyArgs) -> Result<Self> {
        let identity: IdentityId = args.identity.parse()?;
        let q = QBase::parse(&args.q).map_err(|e| Error::Config(e.to_string()))?;
        let formal = identity.definition().mode == Mode::FormalSeries;
        let n_values = if formal { vec![args.order] } else { parse_n(&args.n)? };
        let dims = match &args.dims {
            Some(text) => {
                let d = parse_dims(text)?;
                identity.check_dims(&d).map_err(|e| Error::Config(e.to_string()))?;
                vec![d]
            }
            None => identity.signatures(),
        };
        if args.trials == 0 {
            return Err(Error::Config("--trials must be positive".into()));
        }
        if args.threads == Some(0) {
            return Err(Error::Config("--threads must be positive".into()));
        }
        Ok(RunConfig {
            identity,
            q,
            n_values,
            order: args.order,
            trials: args.trials,
            seed: args.seed,
            mode: args.mode,
            dims,
            threads: args.threads,
            timing: args.timing,
        })
    }

    pub fn policy(&self) -> ExecPolicy {
        if self.threads == Some(1) {
            ExecPolicy::Sequential
        } else {
            ExecPolicy::Parallel
        }
    }
}

/// Registry table, one identity per line.
pub fn cmd_list() -> String {
    let mut out = format!("{:<7} {:<16} {:<18} {:<12} {}\n", "ID", "DIMS", "MODE", "LABEL", "CONSTRAINT");
    for d in CATALOG.iter() {
        let mode = match d.mode {
            Mode::ExactTerminating => "exact-terminating",
            Mode::FormalSeries => "formal-series",
        };
        out.push_str(&format!(
            "{:<7} {:<16} {:<18} {:<12} {}\n",
            d.id.as_str(),
            d.dims,
            mode,
            d.label,
            d.constraint
        ));
    }
    out
}

#[derive(Clone, Debug)]
struct Trial {
    index: usize,
    n: usize,
    dims: Vec<usize>,
    seed: u64,
}

enum Outcome {
    Report(Box<VerificationReport>),
    Error(Error),
}

fn run_trial(config: &RunConfig, sampler: &SamplerConfig, trial: &Trial) -> Outcome {
    let captured: RefCell<Option<VerificationReport>> = RefCell::new(None);
    let sampled = sample_with_guard(
        config.identity,
        &trial.dims,
        &config.q,
        trial.n,
        trial.seed,
        sampler,
        |case| {
            *captured.borrow_mut() = Some(verify(case)?);
            Ok(())
        },
    );
    let case = match sampled {
        Ok(case) => case,
        Err(e) => return Outcome::Error(e),
    };
    let exact = captured.into_inner().expect("guard stored the report");
    match config.mode {
        Precision::Exact => Outcome::Report(Box::new(exact)),
        Precision::Float => match verify_with::<f64>(&case) {
            Ok(mut r) => {
                if !r.equal {
                    r.diagnostics.push(format!(
                        "float evaluation is lossy; the exact evaluation of this case reports equal = {}",
                        exact.equal
                    ));
                }
                Outcome::Report(Box::new(r))
            }
            Err(e) => Outcome::Error(e),
        },
    }
}

/// Runs a campaign. Returns the process exit code and the JSON document:
/// 0 when every trial agrees, 1 otherwise.
pub fn run_campaign(config: &RunConfig) -> (i32, serde_json::Value) {
    let start = Instant::now();
    let sampler = SamplerConfig::default();
    let mut trials = Vec::new();
    for &n in &config.n_values {
        for t in 0..config.trials {
            trials.push(Trial {
                index: trials.len(),
                n,
                dims: config.dims[t % config.dims.len()].clone(),
                seed: config.seed.wrapping_add(t as u64),
            });
        }
    }
    let policy = config.policy();
    let outcomes = policy.install(config.threads, || {
        policy.map(&trials, |trial| run_trial(config, &sampler, trial))
    });

    let (mut passed, mut failed, mut errors, mut with_errata) = (0usize, 0usize, 0usize, 0usize);
    let mut by_correction: BTreeMap<String, usize> = BTreeMap::new();
    let mut rows = Vec::with_capacity(trials.len());
    for (trial, outcome) in trials.iter().zip(outcomes) {
        let mut row = serde_json::json!({
            "trial": trial.index,
            "N": trial.n,
            "dims": trial.dims,
            "seed": trial.seed,
        });
        match outcome {
            Outcome::Report(report) => {
                if report.equal {
                    passed += 1;
                } else {
                    failed += 1;
                }
                if !report.errata.is_empty() {
                    with_errata += 1;
                }
                for e in &report.errata {
                    for c in &e.corrections {
                        let key = serde_json::to_value(c).expect("serializable")
                            .as_str()
                            .unwrap_or_default()
                            .to_string();
                        *by_correction.entry(key).or_insert(0) += 1;
                    }
                }
                row["status"] = if report.equal { "pass" } else { "fail" }.into();
                row["report"] = report.to_json(config.timing);
            }
            Outcome::Error(e) => {
                errors += 1;
                row["status"] = "error".into();
                row["error"] = e.to_string().into();
            }
        }
        rows.push(row);
    }

    let mut doc = serde_json::json!({
        "schema_version": SCHEMA_VERSION,
        "config": config,
        "trials": rows,
        "summary": {
            "total": trials.len(),
            "passed": passed,
            "failed": failed,
            "errors": errors,
            "errata": with_errata,
            "errata_by_correction": by_correction,
        },
    });
    if config.timing {
        doc["summary"]["elapsed_ms"] = serde_json::json!(start.elapsed().as_secs_f64() * 1e3);
    }
    let code = if failed == 0 && errors == 0 { 0 } else { 1 };
    (code, doc)
}

/// `verify` end to end: exit code 2 on a configuration error.
pub fn cmd_verify(args: &VerifyArgs) -> (i32, serde_json::Value) {
    match RunConfig::from_args(args) {
        Ok(config) => run_campaign(&config),
        Err(e) => (
            2,
            serde_json::json!({ "schema_version": SCHEMA_VERSION, "error": e.to_string() }),
        ),
    }
}

/// Parses `argv`, runs the command and returns the exit code.
pub fn main_with<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match cli.command {
        Command::List => {
            print!("{}", cmd_list());
            0
        }
        Command::Verify(args) => {
            let (code, doc) = cmd_verify(&args);
            let text = serde_json::to_string_pretty(&doc).expect("serializable") + "\n";
            match &args.out {
                Some(path) if code != 2 => {
                    if let Err(e) = std::fs::write(path, &text) {
                        eprintln!("cannot write {}: {e}", path.display());
                        return 2;
                    }
                }
                _ => print!("{text}"),
            }
            if code == 2 {
                if let Some(msg) = doc["error"].as_str() {
                    eprintln!("error: {msg}");
                }
            }
            code
        }
    }
}
