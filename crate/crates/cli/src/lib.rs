//! `pslab` — batch driver for floor-power prime experiments.
//!
//! Every operation in the library is exposed as a subcommand. A run reads
//! parameters from flags and an optional JSON config (flags win), sizes
//! the worker pool, executes, and writes two files into the output
//! directory: `results.csv` (deterministic, regression-diffable) and
//! `manifest.json` (inputs, versions, timings). The CSV bytes are also
//! mirrored to stdout.
//!
//! Exit codes: 0 success; 2 configuration or input problems (including
//! malformed profiles, bad config files, and unusable caches); 3 a
//! computation exceeded its configured table range.

use std::fmt;
use std::time::Instant;

use clap::{Parser, Subcommand};

pub mod commands;
pub mod config;
pub mod report;

use config::{
    AdmissibleArgs, Effective, ExpsumScanArgs, GlobalOpts, HbCheckArgs, PsCountArgs, PsiScanArgs,
    RunConfig, SingularArgs, TernaryArgs,
};
pub use report::RunPaths;

#[derive(Parser, Debug)]
#[command(name = "pslab", version, about = "Batch driver for floor-power prime experiments")]
pub struct Cli {
    #[command(flatten)]
    pub globals: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Count constrained primes up to x against both main terms.
    PsCount(PsCountArgs),
    /// Ternary representation sums in one of four weightings.
    Ternary(TernaryArgs),
    /// Truncated singular series with its tail bound.
    Singular(SingularArgs),
    /// Exact rational admissibility system for three profiles.
    Admissible(AdmissibleArgs),
    /// Exponential-sum envelope scan driven by a JSON spec file.
    ExpsumScan(ExpsumScanArgs),
    /// Prime-detecting identity residual sweep.
    HbCheck(HbCheckArgs),
    /// Sawtooth-difference decay scan over a size ladder.
    PsiScan(PsiScanArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::PsCount(_) => "ps-count",
            Command::Ternary(_) => "ternary",
            Command::Singular(_) => "singular",
            Command::Admissible(_) => "admissible",
            Command::ExpsumScan(_) => "expsum-scan",
            Command::HbCheck(_) => "hb-check",
            Command::PsiScan(_) => "psi-scan",
        }
    }
}

/// CLI failure carrying its process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config file, or input values — exit 2.
    Config(String),
    /// A computation exceeded an explicitly configured range — exit 3.
    Range(String),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn range(msg: impl Into<String>) -> Self {
        CliError::Range(msg.into())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Range(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) | CliError::Range(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for CliError {}

impl From<pslab_core::Error> for CliError {
    fn from(e: pslab_core::Error) -> Self {
        match e {
            pslab_core::Error::TableRange { .. } | pslab_core::Error::SieveCapacity { .. } => {
                CliError::Range(e.to_string())
            }
            other => CliError::Config(other.to_string()),
        }
    }
}

/// Executes a parsed invocation end to end; returns the output paths and
/// the CSV bytes for mirroring to stdout.
pub fn run(cli: &Cli) -> Result<(RunPaths, Vec<u8>), CliError> {
    let started = Instant::now();
    let file = cli
        .globals
        .config
        .as_deref()
        .map(RunConfig::load)
        .transpose()?
        .unwrap_or_default();
    let env_workers = std::env::var("PSLAB_WORKERS").ok();
    let eff = Effective::resolve(&cli.globals, &file, env_workers.as_deref())?;
    init_workers(eff.workers);
    let output = commands::execute(&cli.command, &file, &eff)?;
    report::write_run(&eff.out_dir, cli.command.name(), &output, eff.workers, eff.seed, started)
}

/// Sizes the global worker pool. It can be sized only once per process;
/// the binary calls this before any parallel work, so a failure means a
/// pool already exists (e.g. tests driving [`run`] twice), which cannot
/// change results — all reductions are worker-count independent.
fn init_workers(n: usize) {
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
}
