//! Run configuration: a single JSON file, flag overrides, and the merge
//! rules between them.
//!
//! Precedence, lowest to highest: built-in defaults, config file, the
//! `PSLAB_WORKERS` environment variable (worker count only), command-line
//! flags. Unknown JSON keys are rejected so a typo cannot silently fall
//! back to a default.

use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Global command-line flags; each overrides the matching config key.
#[derive(Args, Clone, Debug, Default)]
pub struct GlobalOpts {
    /// JSON run configuration; flags win over file values.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Prime table ceiling. When set it is an explicit resource bound: a
    /// subcommand needing more exits with the range code instead of
    /// silently growing the table.
    #[arg(long, global = true, value_parser = parse_u64_literal, value_name = "N")]
    pub sieve_limit: Option<u64>,

    /// Worker-pool size; numeric outputs do not depend on it.
    #[arg(long, global = true, value_name = "N")]
    pub workers: Option<usize>,

    /// Directory for results.csv and manifest.json (default "out").
    #[arg(long, global = true, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,

    /// Seed for the deterministic alpha grids (default 0).
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,

    /// Optional prime-table cache file, reused when large enough.
    #[arg(long, global = true, value_name = "FILE")]
    pub sieve_cache: Option<PathBuf>,
}

/// On-disk run configuration. Every field is optional; the effective
/// value is resolved after merging with flags and the environment.
/// Subcommand sections carry that command's parameters; its flags
/// override them field by field.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sieve_limit: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sieve_cache: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ps_count: Option<PsCountArgs>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ternary: Option<TernaryArgs>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub singular: Option<SingularArgs>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub admissible: Option<AdmissibleArgs>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expsum_scan: Option<ExpsumScanArgs>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hb_check: Option<HbCheckArgs>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub psi_scan: Option<PsiScanArgs>,
}

impl RunConfig {
    /// Reads and strictly parses a JSON config file.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::config(format!("{}: {e}", path.display())))
    }
}

/// Globals after merging defaults, file, environment, and flags.
#[derive(Clone, Debug, PartialEq)]
pub struct Effective {
    pub sieve_limit: Option<u64>,
    pub workers: usize,
    pub out_dir: PathBuf,
    pub seed: u64,
    pub sieve_cache: Option<PathBuf>,
}

impl Effective {
    /// `flags` win over `env_workers`, which wins over `file`.
    pub fn resolve(
        flags: &GlobalOpts,
        file: &RunConfig,
        env_workers: Option<&str>,
    ) -> Result<Self, CliError> {
        let env_workers = env_workers
            .map(|v| {
                v.trim().parse::<usize>().map_err(|_| {
                    CliError::config(format!("PSLAB_WORKERS must be a positive integer, got '{v}'"))
                })
            })
            .transpose()?;
        let workers = flags
            .workers
            .or(env_workers)
            .or(file.workers)
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
        if workers == 0 {
            return Err(CliError::config("worker count must be at least 1"));
        }
        Ok(Self {
            sieve_limit: flags.sieve_limit.or(file.sieve_limit),
            workers,
            out_dir: flags
                .out_dir
                .clone()
                .or_else(|| file.out_dir.clone())
                .unwrap_or_else(|| PathBuf::from("out")),
            seed: flags.seed.or(file.seed).unwrap_or(0),
            sieve_cache: flags.sieve_cache.clone().or_else(|| file.sieve_cache.clone()),
        })
    }
}

/// Integer literal with batch-friendly sugar: plain digits, `_` group
/// separators, `a^b` powers, and `AeB` scientific forms (integer mantissa).
pub fn parse_u64_literal(s: &str) -> Result<u64, String> {
    let t = s.trim().replace('_', "");
    let err = || format!("'{s}' is not an unsigned integer literal");
    let pow = |base: &str, exp: &str| -> Result<u64, String> {
        let b: u64 = base.parse().map_err(|_| err())?;
        let e: u32 = exp.parse().map_err(|_| err())?;
        b.checked_pow(e).ok_or_else(|| format!("'{s}' overflows u64"))
    };
    if let Some((base, exp)) = t.split_once('^') {
        return pow(base, exp);
    }
    if let Some((mant, exp)) = t.split_once(['e', 'E']) {
        let m: u64 = mant.parse().map_err(|_| err())?;
        let p = pow("10", exp)?;
        return m.checked_mul(p).ok_or_else(|| format!("'{s}' overflows u64"));
    }
    t.parse().map_err(|_| err())
}

#[derive(Args, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PsCountArgs {
    /// Count primes up to this bound (accepts 10^6 / 1e6 / 1_000_000).
    #[arg(long, value_parser = parse_u64_literal)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<u64>,
    /// Membership profile literal, e.g. "k=1; g=2/3" (the "k=" section
    /// may be omitted and is then inferred from the list).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub profile: Option<String>,
}

#[derive(clap::ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeArg {
    Unweighted,
    #[value(alias = "log")]
    LogWeighted,
    #[value(alias = "bf")]
    BfWeighted,
    Constrained,
}

#[derive(Args, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TernaryArgs {
    /// Odd target, at least 9.
    #[arg(long, value_parser = parse_u64_literal)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    /// Weighting: unweighted | log-weighted | bf-weighted | constrained.
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<ModeArg>,
    /// Exactly three profile literals; required by the bf-weighted and
    /// constrained modes, rejected by the other two.
    #[arg(long, num_args = 3, value_name = "PROFILE")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub profiles: Option<Vec<String>>,
}

#[derive(Args, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SingularArgs {
    /// Target integer, at least 3.
    #[arg(long, value_parser = parse_u64_literal)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    /// Euler-product truncation prime (default 10^5).
    #[arg(long, value_parser = parse_u64_literal)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
}

#[derive(Args, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AdmissibleArgs {
    /// First profile literal.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p1: Option<String>,
    /// Second profile literal.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p2: Option<String>,
    /// Third profile literal.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p3: Option<String>,
}

#[derive(Args, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExpsumScanArgs {
    /// JSON scan description (coefficients, exponents, range, grid size,
    /// envelope variants).
    #[arg(long, value_name = "FILE")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spec: Option<PathBuf>,
}

#[derive(Args, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HbCheckArgs {
    /// Residual sweep covers 1..=limit.
    #[arg(long, value_parser = parse_u64_literal)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub limit: Option<u64>,
    /// Identity depth.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nu: Option<u32>,
    /// Sifting cutoff; the identity needs limit <= 2 z^nu.
    #[arg(long, value_parser = parse_u64_literal)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z: Option<u64>,
}

#[derive(Args, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PsiScanArgs {
    /// Strictly increasing sizes, comma separated on the command line.
    #[arg(long, value_delimiter = ',', value_parser = parse_u64_literal, value_name = "N,...")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_list: Option<Vec<u64>>,
    /// Membership profile literal.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub profile: Option<String>,
    /// Exact rational decay exponent, e.g. 161/10000.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<String>,
    /// Alpha-grid size (default 128).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alphas: Option<usize>,
}

macro_rules! merge_opt_fields {
    ($ty:ty { $($field:ident),+ $(,)? }) => {
        impl $ty {
            /// Field-by-field merge; `self` (flags) wins over `file`.
            pub fn merged(mut self, file: Option<&Self>) -> Self {
                if let Some(f) = file {
                    $( if self.$field.is_none() { self.$field = f.$field.clone(); } )+
                }
                self
            }
        }
    };
}

merge_opt_fields!(PsCountArgs { x, profile });
merge_opt_fields!(TernaryArgs { n, mode, profiles });
merge_opt_fields!(SingularArgs { n, p });
merge_opt_fields!(AdmissibleArgs { p1, p2, p3 });
merge_opt_fields!(ExpsumScanArgs { spec });
merge_opt_fields!(HbCheckArgs { limit, nu, z });
merge_opt_fields!(PsiScanArgs { n_list, profile, delta, alphas });

/// The expsum-scan spec file: one exponential-sum family evaluated
/// against its envelopes over a deterministic alpha grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpScanSpec {
    /// Phase coefficients, one per exponent.
    pub coeffs: Vec<f64>,
    /// Strictly decreasing rational exponents as "u/v" strings.
    pub gammas: Vec<String>,
    /// Sum over the dyadic range (m, 2m].
    pub m: u64,
    /// Alpha-grid size.
    pub alphas: usize,
    /// Envelope variants: any of "second", "third".
    pub variants: Vec<String>,
}

impl ExpScanSpec {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::config(format!("{}: {e}", path.display())))
    }
}
