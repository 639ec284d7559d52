//! Ternary representation counts `n = p1 + p2 + p3` in four flavours:
//! plain ordered-triple counting, log-weighted smoothing, the
//! Balog–Friedlander weighted form over three floor-power sets, and the
//! fully constrained intersection sum, each paired with its asymptotic
//! main term.
//!
//! All modes share one enumeration kernel. The three prime sets are
//! assigned canonical roles — sorted by member count (sparsest outermost)
//! with the profile literal as tie-break — so the arithmetic, including
//! the floating-point summation order, is identical under any permutation
//! of the inputs. Per-outer-prime partial sums are combined by fixed
//! pairwise reduction, making results independent of the worker count.

use rayon::prelude::*;
use std::fmt;
use std::time::Instant;

use crate::exact::is_ps_member;
use crate::psets::PsProfile;
use crate::reduce::pairwise_sum;
use crate::sieve::PrimeTable;
use crate::singular::{partial_value, DEFAULT_TRUNCATION};
use crate::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum TernaryMode {
    Unweighted,
    LogWeighted,
    BfWeighted,
    Constrained,
}

impl fmt::Display for TernaryMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TernaryMode::Unweighted => "unweighted",
            TernaryMode::LogWeighted => "log-weighted",
            TernaryMode::BfWeighted => "bf-weighted",
            TernaryMode::Constrained => "constrained",
        })
    }
}

/// One evaluated representation sum next to its main term.
#[derive(Clone, Debug)]
pub struct TernaryReport {
    pub n: u64,
    pub mode: TernaryMode,
    /// The full left-hand side including density prefactors; an exact
    /// integer value for the unweighted mode.
    pub count_or_sum: f64,
    pub main_term: f64,
    /// `count_or_sum / main_term`, NaN when the main term vanishes.
    pub ratio: f64,
    /// Profile literals in input order, for constrained/weighted modes.
    pub profiles: Option<[String; 3]>,
    pub seconds: f64,
}

impl TernaryReport {
    fn assemble(
        n: u64,
        mode: TernaryMode,
        count_or_sum: f64,
        main_term: f64,
        profiles: Option<[String; 3]>,
        started: Instant,
    ) -> Self {
        let ratio = if main_term > 0.0 { count_or_sum / main_term } else { f64::NAN };
        Self {
            n,
            mode,
            count_or_sum,
            main_term,
            ratio,
            profiles,
            seconds: started.elapsed().as_secs_f64(),
        }
    }
}

fn validate(n: u64, table: &PrimeTable) -> Result<()> {
    if n % 2 == 0 || n < 9 {
        return Err(Error::Domain(format!("need an odd n >= 9, got {n}")));
    }
    if n > table.limit() {
        return Err(Error::TableRange { query: n, limit: table.limit() });
    }
    Ok(())
}

/// Singular series truncated at whatever the table supports (capped at
/// the default truncation prime).
fn series_for_main_term(n: u64, table: &PrimeTable) -> Result<f64> {
    partial_value(n, DEFAULT_TRUNCATION.min(table.limit()), table)
}

/// One role in the triple enumeration: its member primes and weights.
struct Role {
    primes: Vec<u64>,
    weights: Vec<f64>,
    key: String,
}

impl Role {
    fn build(n: u64, table: &PrimeTable, profile: &PsProfile, weight: &dyn Fn(u64) -> f64) -> Self {
        let primes: Vec<u64> = table
            .primes_up_to(n - 4)
            .into_iter()
            .filter(|&p| profile.gammas().iter().all(|g| is_ps_member(p, g)))
            .collect();
        let weights = primes.iter().map(|&p| weight(p)).collect();
        Role { primes, weights, key: profile.to_string() }
    }
}

/// Sum of `w1(p1) w2(p2) w3(p3)` over ordered prime triples summing to
/// `n`, with each role restricted to its member set.
fn triple_sum(n: u64, mut roles: [Role; 3]) -> f64 {
    roles.sort_by(|a, b| (a.primes.len(), &a.key).cmp(&(b.primes.len(), &b.key)));
    let [outer, inner, table_role] = roles;
    let mut lookup = vec![0.0f64; n as usize + 1];
    for (&p, &w) in table_role.primes.iter().zip(table_role.weights.iter()) {
        lookup[p as usize] = w;
    }
    let partials: Vec<f64> = outer
        .primes
        .par_iter()
        .zip(outer.weights.par_iter())
        .map(|(&p1, &w1)| {
            let cap = n - p1 - 2;
            let mut acc = 0.0;
            for (i, &p2) in inner.primes.iter().enumerate() {
                if p2 > cap {
                    break;
                }
                acc += inner.weights[i] * lookup[(n - p1 - p2) as usize];
            }
            w1 * acc
        })
        .collect();
    pairwise_sum(&partials)
}

/// Exact integer companion of [`triple_sum`] for the unweighted count.
fn triple_count(n: u64, table: &PrimeTable) -> u64 {
    let primes = table.primes_up_to(n - 4);
    let mut member = vec![false; n as usize + 1];
    for &p in &primes {
        member[p as usize] = true;
    }
    primes
        .par_iter()
        .map(|&p1| {
            let cap = n - p1 - 2;
            primes
                .iter()
                .take_while(|&&p2| p2 <= cap)
                .filter(|&&p2| member[(n - p1 - p2) as usize])
                .count() as u64
        })
        .sum()
}

/// Ordered-triple representation count with main term
/// `S(n)/2 * n^2 / log^3 n`.
pub fn count_unweighted(n: u64, table: &PrimeTable) -> Result<TernaryReport> {
    let started = Instant::now();
    validate(n, table)?;
    let count = triple_count(n, table) as f64;
    let ln = (n as f64).ln();
    let main = 0.5 * series_for_main_term(n, table)? * (n as f64).powi(2) / (ln * ln * ln);
    Ok(TernaryReport::assemble(n, TernaryMode::Unweighted, count, main, None, started))
}

/// `sum log p1 log p2 log p3` over representations, against
/// `S(n)/2 * n^2`.
pub fn sum_log_weighted(n: u64, table: &PrimeTable) -> Result<TernaryReport> {
    let started = Instant::now();
    validate(n, table)?;
    let ones = PsProfile::all_ones(1)?;
    let w = |p: u64| (p as f64).ln();
    let roles = [
        Role::build(n, table, &ones, &w),
        Role::build(n, table, &ones, &w),
        Role::build(n, table, &ones, &w),
    ];
    let sum = triple_sum(n, roles);
    let main = 0.5 * series_for_main_term(n, table)? * (n as f64).powi(2);
    Ok(TernaryReport::assemble(n, TernaryMode::LogWeighted, sum, main, None, started))
}

/// Balog–Friedlander weighted sum
/// `1/(g1 g2 g3) * sum prod p_j^(1-g_j) log p_j` over triples with
/// `p_j` in the j-th floor-power set, against `S(n)/2 * n^2`.
/// Each profile must be a single exponent.
pub fn sum_bf_weighted(
    n: u64,
    p1: &PsProfile,
    p2: &PsProfile,
    p3: &PsProfile,
    table: &PrimeTable,
) -> Result<TernaryReport> {
    let started = Instant::now();
    validate(n, table)?;
    for p in [p1, p2, p3] {
        if p.k() != 1 {
            return Err(Error::ProfileShape(format!(
                "bf-weighted mode needs single-exponent profiles, got k={}",
                p.k()
            )));
        }
    }
    let role = |p: &PsProfile| {
        let exponent = 1.0 - p.gammas()[0].as_f64();
        let w = move |q: u64| (q as f64).powf(exponent) * (q as f64).ln();
        Role::build(n, table, p, &w)
    };
    let sum = triple_sum(n, [role(p1), role(p2), role(p3)]);
    let prefactor = p1.coeff_c() * p2.coeff_c() * p3.coeff_c();
    let main = 0.5 * series_for_main_term(n, table)? * (n as f64).powi(2);
    let profiles = Some([p1.to_string(), p2.to_string(), p3.to_string()]);
    Ok(TernaryReport::assemble(n, TernaryMode::BfWeighted, prefactor * sum, main, profiles, started))
}

/// Constrained intersection sum
/// `C1 C2 C3 * sum prod p_i^(s_i)` over triples with `p_i` in the i-th
/// k-fold intersection, against `S(n)/2 * n^2 / log^3 n`.
pub fn sum_constrained(
    n: u64,
    p1: &PsProfile,
    p2: &PsProfile,
    p3: &PsProfile,
    table: &PrimeTable,
) -> Result<TernaryReport> {
    let started = Instant::now();
    validate(n, table)?;
    let role = |p: &PsProfile| {
        let sigma = p.sigma_f64();
        let w = move |q: u64| (q as f64).powf(sigma);
        Role::build(n, table, p, &w)
    };
    let sum = triple_sum(n, [role(p1), role(p2), role(p3)]);
    let prefactor = p1.coeff_c() * p2.coeff_c() * p3.coeff_c();
    let ln = (n as f64).ln();
    let main = 0.5 * series_for_main_term(n, table)? * (n as f64).powi(2) / (ln * ln * ln);
    let profiles = Some([p1.to_string(), p2.to_string(), p3.to_string()]);
    Ok(TernaryReport::assemble(n, TernaryMode::Constrained, prefactor * sum, main, profiles, started))
}
