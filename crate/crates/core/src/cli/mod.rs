//! Command-line front end: declarative configs in, reports out.
//!
//! Exit status: 0 ok, 1 I/O failure or failed identity suite, 2 config
//! error, 3 precondition violation, 4 precision cap, 5 non-convergence.

mod commands;
mod config;
mod identities;
mod validate;

pub use commands::run;
pub use config::{
    parse_measure_shorthand, AtomSpec, Command, DensitySpec, ExperimentConfig, FormatArg, MeasureDescriptor,
    MeasureSpec, OutputSpec, Params, PieceSpec, WeightsSpec,
};
pub use identities::{
    beta_csc_suite, gamma_recurrence_suite, identity_suites, moment_battery, moment_tail_suite, stirling_suite,
    SuiteResult,
};
pub use validate::{diagnostics_error, validate, Diagnostic, DiagnosticKind};

use std::collections::HashMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::report::{ExperimentReport, ReportFormat};

/// Environment variable read for the batch worker count.
pub const WORKERS_ENV: &str = "HILBERT_WORKERS";

#[derive(Debug, Parser)]
#[command(name = "hilbert", version, about = "Generalized Hilbert series operators on weighted sequence spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Moment table and decay check.
    Moments(RunArgs),
    /// Carleson ratio on a grid toward 1, compared with the moment decay check.
    Carleson(RunArgs),
    /// Apply the operator to a test sequence.
    Apply(RunArgs),
    /// Upper bound and epsilon-family lower bounds for the operator norm.
    Norm(RunArgs),
    /// Floors and tau-family ratios for a nondecreasing density.
    Sharpness(RunArgs),
    /// Growth of the epsilon-family lower bound when beta > alpha.
    Divergence(RunArgs),
    /// Special-function and moment identity suites.
    Identities(RunArgs),
    /// Run the command named in --config.
    Run(RunArgs),
    /// Print the diagnostics for a config without running it.
    Validate(RunArgs),
    /// Run every config (*.json, *.toml) in a directory.
    Batch(BatchArgs),
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// JSON or TOML config; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Measure shorthand: lebesgue, dirac:T[:MASS], const:C, monomial:K[:C], one-minus-t:S[:C].
    #[arg(long)]
    pub measure: Option<String>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    /// Report path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Command for `validate` when no config is given.
    #[arg(long, value_enum)]
    pub command: Option<Command>,
    #[command(flatten)]
    pub params: Params,
}

#[derive(Debug, Clone, Args)]
pub struct BatchArgs {
    pub dir: PathBuf,
    /// Concurrent jobs; defaults to $HILBERT_WORKERS, then 1.
    #[arg(long)]
    pub workers: Option<usize>,
}

impl RunArgs {
    /// Loads `--config` (if any) and applies the flag overrides.
    pub fn to_config(&self, command: Option<Command>) -> Result<ExperimentConfig> {
        let command = command.or(self.command);
        let mut cfg = match &self.config {
            Some(path) => {
                let cfg = ExperimentConfig::load(path)?;
                if let Some(c) = command {
                    if c != cfg.command {
                        return Err(Error::Config(format!(
                            "command '{}' conflicts with '{}' in {}",
                            c.name(),
                            cfg.command.name(),
                            path.display()
                        )));
                    }
                }
                cfg
            }
            None => ExperimentConfig::new(
                command.ok_or_else(|| Error::Config("no command given and no --config".into()))?,
            ),
        };
        if let Some(m) = &self.measure {
            cfg.measure = Some(MeasureSpec::Shorthand(m.clone()));
        }
        if self.p.is_some() || self.alpha.is_some() || self.beta.is_some() {
            let base = cfg.weights;
            let p = self.p.or(base.map(|w| w.p));
            let alpha = self.alpha.or(base.map(|w| w.alpha));
            match (p, alpha) {
                (Some(p), Some(alpha)) => {
                    let beta = self.beta.or(base.and_then(|w| w.beta));
                    cfg.weights = Some(WeightsSpec { p, alpha, beta });
                }
                _ => return Err(Error::Config("weights need both --p and --alpha".into())),
            }
        }
        if let Some(out) = &self.out {
            cfg.output.path = Some(out.clone());
        }
        if let Some(f) = self.format {
            cfg.output.format = f;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        cfg.params.merge(self.params.clone());
        Ok(cfg)
    }
}

/// Exit status for a finished report: failed identity suites give 1.
fn report_status(report: &ExperimentReport) -> i32 {
    if report.experiment == "identities" && report.details["all_pass"] != serde_json::Value::Bool(true) {
        1
    } else {
        0
    }
}

fn emit(report: &ExperimentReport, cfg: &ExperimentConfig, out: &mut dyn Write) -> Result<()> {
    let format: ReportFormat = cfg.output.format.into();
    match &cfg.output.path {
        Some(path) => report.write_atomic(path, format),
        None => out
            .write_all(report.render(format).as_bytes())
            .map_err(|e| Error::Io(format!("writing report: {e}"))),
    }
}

/// Runs one config and writes its report; returns the exit status.
pub fn run_and_emit(cfg: &ExperimentConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match run(cfg).and_then(|r| emit(&r, cfg, out).map(|_| r)) {
        Ok(report) => report_status(&report),
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn worker_count(flag: Option<usize>) -> usize {
    flag.or_else(|| std::env::var(WORKERS_ENV).ok().and_then(|v| v.trim().parse().ok()))
        .unwrap_or(1)
        .max(1)
}

fn batch_configs(dir: &Path) -> Result<Vec<PathBuf>> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::Io(format!("reading {}: {e}", dir.display())))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            let ext_ok = matches!(p.extension().and_then(|e| e.to_str()), Some("json") | Some("toml"));
            let is_report = p.file_stem().and_then(|s| s.to_str()).is_some_and(|s| s.ends_with(".report"));
            p.is_file() && ext_ok && !is_report
        })
        .collect();
    paths.sort();
    Ok(paths)
}

/// Default report path for a batch config: `<stem>.report.<json|csv>`.
fn batch_output(path: &Path, cfg: &ExperimentConfig) -> PathBuf {
    let ext = match cfg.output.format {
        FormatArg::Json => "json",
        FormatArg::Csv => "csv",
    };
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("config");
    path.with_file_name(format!("{stem}.report.{ext}"))
}

/// Runs every config in `dir` on a bounded pool; writes to one output path
/// are serialized. Returns the largest exit status.
pub fn run_batch(dir: &Path, workers: usize, err: &mut dyn Write) -> i32 {
    let paths = match batch_configs(dir) {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return e.exit_code();
        }
    };
    let jobs: Vec<(PathBuf, Result<ExperimentConfig>)> = paths
        .into_iter()
        .map(|p| {
            let cfg = ExperimentConfig::load(&p).map(|mut c| {
                if c.output.path.is_none() {
                    c.output.path = Some(batch_output(&p, &c));
                }
                c
            });
            (p, cfg)
        })
        .collect();
    let mut locks: HashMap<PathBuf, Arc<Mutex<()>>> = HashMap::new();
    for (_, cfg) in &jobs {
        if let Ok(c) = cfg {
            let key = c.output.path.clone().expect("set above");
            locks.entry(key).or_default();
        }
    }
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: cannot start worker pool: {e}");
            return 1;
        }
    };
    let results: Vec<(PathBuf, i32, String)> = pool.install(|| {
        jobs.par_iter()
            .map(|(path, cfg)| {
                let mut msg = Vec::new();
                let code = match cfg {
                    Err(e) => {
                        let _ = writeln!(msg, "error: {e}");
                        e.exit_code()
                    }
                    Ok(c) => {
                        let lock = locks[c.output.path.as_ref().expect("set above")].clone();
                        match run(c) {
                            Ok(report) => {
                                let _guard = lock.lock().unwrap_or_else(|e| e.into_inner());
                                match emit(&report, c, &mut std::io::sink()) {
                                    Ok(()) => report_status(&report),
                                    Err(e) => {
                                        let _ = writeln!(msg, "error: {e}");
                                        e.exit_code()
                                    }
                                }
                            }
                            Err(e) => {
                                let _ = writeln!(msg, "error: {e}");
                                e.exit_code()
                            }
                        }
                    }
                };
                (path.clone(), code, String::from_utf8_lossy(&msg).into_owned())
            })
            .collect()
    });
    let mut worst = 0;
    for (path, code, msg) in results {
        let _ = writeln!(err, "{}: exit {code}", path.display());
        if !msg.is_empty() {
            let _ = write!(err, "{msg}");
        }
        worst = worst.max(code);
    }
    worst
}

/// Parses `args` and executes; returns the process exit status.
pub fn main_with_args<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    let (args, command) = match cli.command {
        CliCommand::Batch(b) => return run_batch(&b.dir, worker_count(b.workers), err),
        CliCommand::Validate(a) => {
            let cfg = match a.to_config(None) {
                Ok(c) => c,
                Err(e) => {
                    let _ = writeln!(err, "error: {e}");
                    return e.exit_code();
                }
            };
            let diags = validate(&cfg);
            for d in &diags {
                let _ = writeln!(out, "{}", serde_json::to_string(d).expect("serializes"));
            }
            return diagnostics_error(&diags).map_or(0, |e| e.exit_code());
        }
        CliCommand::Run(a) => (a, None),
        CliCommand::Moments(a) => (a, Some(Command::Moments)),
        CliCommand::Carleson(a) => (a, Some(Command::Carleson)),
        CliCommand::Apply(a) => (a, Some(Command::Apply)),
        CliCommand::Norm(a) => (a, Some(Command::Norm)),
        CliCommand::Sharpness(a) => (a, Some(Command::Sharpness)),
        CliCommand::Divergence(a) => (a, Some(Command::Divergence)),
        CliCommand::Identities(a) => (a, Some(Command::Identities)),
    };
    match args.to_config(command) {
        Ok(cfg) => run_and_emit(&cfg, out, err),
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
