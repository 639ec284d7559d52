//! Subcommand executors. Each resolves its parameters (flags over config
//! section), builds whatever tables it needs, delegates to the library,
//! and packs rows plus manifest data into a [`CommandOutput`].

use std::time::Instant;

use num::BigRational;
use serde_json::json;

use pslab_core::expsum::{
    bound_prop31_at, golden_alpha_grid, hb_residual_batch, scan_decay, ExpSumParams, PhaseTable,
    Prop31Variant,
};
use pslab_core::psets::{check_admissibility, count_ps_primes, main_term_li, main_term_simple};
use pslab_core::ternary::{count_unweighted, sum_bf_weighted, sum_constrained, sum_log_weighted};
use pslab_core::{singular::singular_series, ArithTables, PrimeTable, PsProfile};

use crate::config::{
    AdmissibleArgs, Effective, ExpScanSpec, ExpsumScanArgs, HbCheckArgs, ModeArg, PsCountArgs,
    PsiScanArgs, RunConfig, SingularArgs, TernaryArgs,
};
use crate::report::{fmt_float, CommandOutput};
use crate::{CliError, Command};

pub fn execute(
    cmd: &Command,
    file: &RunConfig,
    eff: &Effective,
) -> Result<CommandOutput, CliError> {
    match cmd {
        Command::PsCount(a) => ps_count(a.clone().merged(file.ps_count.as_ref()), eff),
        Command::Ternary(a) => ternary(a.clone().merged(file.ternary.as_ref()), eff),
        Command::Singular(a) => singular(a.clone().merged(file.singular.as_ref()), eff),
        Command::Admissible(a) => admissible(a.clone().merged(file.admissible.as_ref())),
        Command::ExpsumScan(a) => expsum_scan(a.clone().merged(file.expsum_scan.as_ref()), eff),
        Command::HbCheck(a) => hb_check(a.clone().merged(file.hb_check.as_ref())),
        Command::PsiScan(a) => psi_scan(a.clone().merged(file.psi_scan.as_ref()), eff),
    }
}

/// A parameter that must arrive from either a flag or the config section.
fn require<T>(v: Option<T>, flag: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::config(format!("missing {flag} (flag or config section)")))
}

/// Profile literal with shorthand: a missing "k=" section is inferred
/// from the number of listed exponents, so "g=2/3" works as "k=1; g=2/3".
fn parse_profile(s: &str) -> Result<PsProfile, CliError> {
    let t = s.trim();
    if t.contains("k=") {
        Ok(PsProfile::parse(t)?)
    } else {
        let g = t.strip_prefix("g=").unwrap_or(t);
        let k = g.split(',').count();
        Ok(PsProfile::parse(&format!("k={k}; g={g}"))?)
    }
}

/// Builds (or loads) the prime table a command needs. An explicitly
/// configured sieve_limit acts as a hard resource bound; asking for more
/// is a range error, not a silent upgrade.
fn prime_table(needed: u64, eff: &Effective) -> Result<(PrimeTable, f64), CliError> {
    let t0 = Instant::now();
    let limit = match eff.sieve_limit {
        Some(l) if l < needed => {
            return Err(CliError::range(format!(
                "configured sieve_limit {l} is below the {needed} this command needs"
            )))
        }
        Some(l) => l,
        None => needed,
    };
    let table = match &eff.sieve_cache {
        Some(path) if path.exists() => {
            let loaded = PrimeTable::load(path)?;
            if loaded.limit() >= limit {
                loaded
            } else {
                let built = PrimeTable::sieve(limit)?;
                built.save(path)?;
                built
            }
        }
        Some(path) => {
            let built = PrimeTable::sieve(limit)?;
            built.save(path)?;
            built
        }
        None => PrimeTable::sieve(limit)?,
    };
    Ok((table, t0.elapsed().as_secs_f64()))
}

fn ps_count(a: PsCountArgs, eff: &Effective) -> Result<CommandOutput, CliError> {
    let x = require(a.x, "--x")?;
    let profile = parse_profile(&require(a.profile, "--profile")?)?;
    let (table, sieve_s) = prime_table(x, eff)?;
    let t0 = Instant::now();
    let count = count_ps_primes(x, &profile, &table)?;
    let li = main_term_li(x as f64, &profile)?;
    let simple = main_term_simple(x as f64, &profile)?;
    Ok(CommandOutput {
        headers: &["x", "profile", "count", "main_term_li", "main_term_simple", "ratio_li", "ratio_simple"],
        rows: vec![vec![
            x.to_string(),
            profile.to_string(),
            count.to_string(),
            fmt_float(li),
            fmt_float(simple),
            fmt_float(count as f64 / li),
            fmt_float(count as f64 / simple),
        ]],
        inputs: json!({"x": x, "profile": profile.to_string()}),
        summary: json!({"count": count, "ratio_li": count as f64 / li}),
        timings: vec![("sieve_seconds", sieve_s), ("compute_seconds", t0.elapsed().as_secs_f64())],
    })
}

fn ternary(a: TernaryArgs, eff: &Effective) -> Result<CommandOutput, CliError> {
    let n = require(a.n, "--n")?;
    let mode = require(a.mode, "--mode")?;
    let takes_profiles = matches!(mode, ModeArg::BfWeighted | ModeArg::Constrained);
    let profiles = match (&a.profiles, takes_profiles) {
        (Some(list), true) => {
            if list.len() != 3 {
                return Err(CliError::config(format!(
                    "--profiles takes exactly three literals, got {}",
                    list.len()
                )));
            }
            Some([
                parse_profile(&list[0])?,
                parse_profile(&list[1])?,
                parse_profile(&list[2])?,
            ])
        }
        (None, true) => return Err(CliError::config("this mode requires --profiles")),
        (Some(_), false) => {
            return Err(CliError::config("this mode does not take --profiles"))
        }
        (None, false) => None,
    };
    let (table, sieve_s) = prime_table(n, eff)?;
    let report = match (mode, &profiles) {
        (ModeArg::Unweighted, _) => count_unweighted(n, &table)?,
        (ModeArg::LogWeighted, _) => sum_log_weighted(n, &table)?,
        (ModeArg::BfWeighted, Some([p1, p2, p3])) => sum_bf_weighted(n, p1, p2, p3, &table)?,
        (ModeArg::Constrained, Some([p1, p2, p3])) => sum_constrained(n, p1, p2, p3, &table)?,
        _ => unreachable!("profile presence checked above"),
    };
    let [s1, s2, s3] = report
        .profiles
        .clone()
        .unwrap_or_else(|| [String::new(), String::new(), String::new()]);
    Ok(CommandOutput {
        headers: &["n", "mode", "count_or_sum", "main_term", "ratio", "profile1", "profile2", "profile3"],
        rows: vec![vec![
            n.to_string(),
            report.mode.to_string(),
            fmt_float(report.count_or_sum),
            fmt_float(report.main_term),
            fmt_float(report.ratio),
            s1.clone(),
            s2.clone(),
            s3.clone(),
        ]],
        inputs: json!({
            "n": n,
            "mode": report.mode.to_string(),
            "profiles": report.profiles.as_ref().map(|p| p.to_vec()),
        }),
        summary: json!({"count_or_sum": report.count_or_sum, "ratio": report.ratio}),
        timings: vec![("sieve_seconds", sieve_s), ("compute_seconds", report.seconds)],
    })
}

fn singular(a: SingularArgs, eff: &Effective) -> Result<CommandOutput, CliError> {
    let n = require(a.n, "--n")?;
    let p = a.p.unwrap_or(100_000);
    // the product sweep needs primes to p, exact factorization needs sqrt(n)
    let (table, sieve_s) = prime_table(p.max(n.isqrt() + 1), eff)?;
    let t0 = Instant::now();
    let value = singular_series(n, p, &table)?;
    Ok(CommandOutput {
        headers: &["n", "truncation_prime", "value", "tail_bound"],
        rows: vec![vec![
            n.to_string(),
            value.truncation_prime.to_string(),
            fmt_float(value.value),
            fmt_float(value.tail_bound),
        ]],
        inputs: json!({"n": n, "p": p}),
        summary: json!({"value": value.value, "tail_bound": value.tail_bound}),
        timings: vec![("sieve_seconds", sieve_s), ("compute_seconds", t0.elapsed().as_secs_f64())],
    })
}

fn admissible(a: AdmissibleArgs) -> Result<CommandOutput, CliError> {
    let p1 = parse_profile(&require(a.p1, "--p1")?)?;
    let p2 = parse_profile(&require(a.p2, "--p2")?)?;
    let p3 = parse_profile(&require(a.p3, "--p3")?)?;
    let t0 = Instant::now();
    let rep = check_admissibility(&p1, &p2, &p3)?;

    // everything here is exact rational, so strings are printed verbatim
    let mut rows = vec![vec![
        "varpi".to_string(),
        String::new(),
        rep.varpi.to_string(),
        String::new(),
        String::new(),
    ]];
    let mut condition_rows = |label: &str, set: &[pslab_core::psets::ConditionRow; 3]| {
        for (i, row) in set.iter().enumerate() {
            rows.push(vec![
                format!("{label}-row-{}", i + 1),
                row.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" "),
                row.lhs.to_string(),
                row.rhs.to_string(),
                row.satisfied.to_string(),
            ]);
        }
    };
    condition_rows("general", &rep.general);
    if let Some(set) = &rep.specialized {
        condition_rows("k3", set);
    }
    for (label, check) in [
        ("corollary-equal", &rep.corollary_equal),
        ("corollary-single", &rep.corollary_single),
    ] {
        rows.push(vec![
            label.to_string(),
            String::new(),
            check.sigma.to_string(),
            check.threshold.to_string(),
            check.satisfied.to_string(),
        ]);
    }
    rows.push(vec![
        "admissible".to_string(),
        String::new(),
        String::new(),
        String::new(),
        rep.admissible.to_string(),
    ]);

    Ok(CommandOutput {
        headers: &["check", "coeffs", "lhs", "rhs", "satisfied"],
        rows,
        inputs: json!({
            "p1": p1.to_string(),
            "p2": p2.to_string(),
            "p3": p3.to_string(),
        }),
        summary: json!({"admissible": rep.admissible, "k": rep.k}),
        timings: vec![("compute_seconds", t0.elapsed().as_secs_f64())],
    })
}

fn expsum_scan(a: ExpsumScanArgs, eff: &Effective) -> Result<CommandOutput, CliError> {
    let path = require(a.spec, "--spec")?;
    let spec = ExpScanSpec::load(&path)?;
    if spec.alphas == 0 {
        return Err(CliError::config("alphas must be at least 1"));
    }
    let variants = spec
        .variants
        .iter()
        .map(|v| match v.as_str() {
            "second" => Ok(Prop31Variant::Second),
            "third" => Ok(Prop31Variant::Third),
            other => Err(CliError::config(format!(
                "unknown variant '{other}' (expected \"second\" or \"third\")"
            ))),
        })
        .collect::<Result<Vec<_>, _>>()?;
    if variants.is_empty() {
        return Err(CliError::config("variants list is empty"));
    }
    let gammas = spec
        .gammas
        .iter()
        .map(|g| g.parse().map_err(CliError::from))
        .collect::<Result<Vec<_>, _>>()?;
    let m1 = spec
        .m
        .checked_mul(2)
        .ok_or_else(|| CliError::config(format!("m {} overflows the dyadic range", spec.m)))?;
    let base = ExpSumParams::new(0.0, spec.coeffs.clone(), gammas, spec.m, m1)?;

    let t0 = Instant::now();
    let table = PhaseTable::build(&base)?;
    let table_s = t0.elapsed().as_secs_f64();

    let t1 = Instant::now();
    let grid = golden_alpha_grid(spec.alphas, eff.seed);
    let mut rows = Vec::with_capacity(grid.len() * variants.len());
    let mut max_ratio = f64::NEG_INFINITY;
    for (i, &alpha) in grid.iter().enumerate() {
        let params = base.with_alpha(alpha)?;
        for &variant in &variants {
            let rep = bound_prop31_at(&table, &params, variant)?;
            max_ratio = max_ratio.max(rep.ratio);
            rows.push(vec![
                i.to_string(),
                fmt_float(alpha),
                rep.formula.to_string(),
                fmt_float(rep.observed),
                fmt_float(rep.bound),
                fmt_float(rep.ratio),
            ]);
        }
    }

    Ok(CommandOutput {
        headers: &["index", "alpha", "formula", "observed", "bound", "ratio"],
        rows,
        inputs: json!({
            "spec": path,
            "coeffs": spec.coeffs,
            "gammas": spec.gammas,
            "m": spec.m,
            "alphas": spec.alphas,
            "variants": spec.variants,
        }),
        summary: json!({"max_ratio": max_ratio}),
        timings: vec![
            ("phase_table_seconds", table_s),
            ("grid_seconds", t1.elapsed().as_secs_f64()),
        ],
    })
}

fn hb_check(a: HbCheckArgs) -> Result<CommandOutput, CliError> {
    let limit = require(a.limit, "--limit")?;
    let nu = require(a.nu, "--nu")?;
    let z = require(a.z, "--z")?;
    let t0 = Instant::now();
    let tables = ArithTables::build(limit)?;
    let tables_s = t0.elapsed().as_secs_f64();
    let t1 = Instant::now();
    let (max_residual, argmax) = hb_residual_batch(limit, nu, z, &tables)?;
    Ok(CommandOutput {
        headers: &["limit", "nu", "z", "max_residual", "argmax_n"],
        rows: vec![vec![
            limit.to_string(),
            nu.to_string(),
            z.to_string(),
            fmt_float(max_residual),
            argmax.to_string(),
        ]],
        inputs: json!({"limit": limit, "nu": nu, "z": z}),
        summary: json!({"max_residual": max_residual, "argmax_n": argmax}),
        timings: vec![
            ("tables_seconds", tables_s),
            ("compute_seconds", t1.elapsed().as_secs_f64()),
        ],
    })
}

fn psi_scan(a: PsiScanArgs, eff: &Effective) -> Result<CommandOutput, CliError> {
    let n_list = require(a.n_list, "--n-list")?;
    let profile = parse_profile(&require(a.profile, "--profile")?)?;
    let delta_text = require(a.delta, "--delta")?;
    let delta: BigRational = delta_text
        .trim()
        .parse()
        .map_err(|e| CliError::config(format!("delta '{delta_text}': {e}")))?;
    let alphas = a.alphas.unwrap_or(128);
    if alphas == 0 {
        return Err(CliError::config("alphas must be at least 1"));
    }
    let needed = n_list
        .iter()
        .max()
        .copied()
        .ok_or_else(|| CliError::config("--n-list is empty"))?;
    let (table, sieve_s) = prime_table(needed, eff)?;
    let t0 = Instant::now();
    let grid = golden_alpha_grid(alphas, eff.seed);
    let report = scan_decay(&profile, &n_list, &grid, &delta, &table)?;
    let rows = report
        .rows
        .iter()
        .map(|r| vec![r.n.to_string(), fmt_float(r.max_modulus), fmt_float(r.ratio)])
        .collect();
    Ok(CommandOutput {
        headers: &["n", "max_modulus", "ratio"],
        rows,
        inputs: json!({
            "n_list": n_list,
            "profile": profile.to_string(),
            "delta": delta.to_string(),
            "alphas": alphas,
        }),
        summary: json!({
            "monotone_improvement": report.monotone_improvement,
            "mode": if profile.k() == 1 { "balog-friedlander" } else { "standard" },
        }),
        timings: vec![("sieve_seconds", sieve_s), ("scan_seconds", t0.elapsed().as_secs_f64())],
    })
}
