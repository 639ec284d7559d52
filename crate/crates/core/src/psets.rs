//! Intersection profiles, constrained prime counting and the
//! admissibility checker.
//!
//! A [`PsProfile`] bundles a decreasing list of exponents
//! `1/2 < g_k < ... < g_1 <= 1` together with its exact deficit
//! `sigma = k - (g_1 + ... + g_k)` and the density coefficient
//! `C = 1/(g_1 ... g_k)`. Profiles feed the counting function
//! [`count_ps_primes`], the asymptotic main terms, and
//! [`check_admissibility`], which evaluates the three-profile condition
//! system in exact rational arithmetic.

use num::{BigInt, BigRational, One, ToPrimitive};
use rayon::prelude::*;
use std::fmt;
use std::str::FromStr;

use crate::exact::{is_ps_member, RationalExponent};
use crate::sieve::PrimeTable;
use crate::{Error, Result};

/// Relative accuracy target of the adaptive quadrature in
/// [`main_term_li`].
pub const LI_REL_TOL: f64 = 1e-8;

/// Fixed chunk width for the parallel prime scan; counting is a sum of
/// non-negative integers, so the grouping cannot change the result.
const COUNT_CHUNK: usize = 4096;

fn big_ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// A list of exponents cutting out one intersection of floor-power sets.
///
/// Exponents must decrease strictly except that the value `1` may repeat:
/// a `1` slot matches every integer and models a degenerate (unconstrained)
/// position. Note the classical single-exponent setting requires `g < 1`
/// strictly; we admit `g = 1` and let callers decide whether a degenerate
/// slot makes sense for their use.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PsProfile {
    gammas: Vec<RationalExponent>,
    sigma: BigRational,
}

impl PsProfile {
    /// Builds a profile, validating the ordering constraint.
    pub fn new(gammas: Vec<RationalExponent>) -> Result<Self> {
        if gammas.is_empty() {
            return Err(Error::ProfileShape("profile needs at least one exponent".into()));
        }
        for w in gammas.windows(2) {
            let strictly_less = w[1] < w[0];
            let repeated_one = w[1] == w[0] && w[0].is_one();
            if !(strictly_less || repeated_one) {
                return Err(Error::ProfileShape(format!(
                    "exponents must decrease strictly (repeats only at 1): got {} then {}",
                    w[0], w[1]
                )));
            }
        }
        let k = BigRational::from_integer(BigInt::from(gammas.len() as i64));
        let sum: BigRational = gammas.iter().map(|g| g.to_rational()).sum();
        Ok(Self { gammas, sigma: k - sum })
    }

    /// Single-exponent convenience constructor.
    pub fn single(gamma: RationalExponent) -> Self {
        Self::new(vec![gamma]).expect("one exponent is always a valid profile")
    }

    /// Fully degenerate profile: `k` slots all equal to 1.
    pub fn all_ones(k: usize) -> Result<Self> {
        Self::new(vec![RationalExponent::one(); k.max(1)])
    }

    pub fn k(&self) -> usize {
        self.gammas.len()
    }

    pub fn gammas(&self) -> &[RationalExponent] {
        &self.gammas
    }

    /// Exact deficit `k - sum(g_j)`; zero exactly for the all-ones profile.
    pub fn sigma(&self) -> &BigRational {
        &self.sigma
    }

    pub fn sigma_f64(&self) -> f64 {
        self.sigma.to_f64().expect("deficit fits in f64")
    }

    /// Density coefficient `1/(g_1 ... g_k)`.
    pub fn coeff_c(&self) -> f64 {
        self.gammas.iter().map(|g| g.as_f64()).product::<f64>().recip()
    }

    /// Parses the literal format `"k=3; g=49/50,47/50,9/10"`.
    pub fn parse(s: &str) -> Result<Self> {
        let mut k_text: Option<&str> = None;
        let mut g_text: Option<&str> = None;
        for piece in s.split(';') {
            let piece = piece.trim();
            if piece.is_empty() {
                continue;
            }
            if let Some(v) = piece.strip_prefix("k=") {
                k_text = Some(v.trim());
            } else if let Some(v) = piece.strip_prefix("g=") {
                g_text = Some(v.trim());
            } else {
                return Err(Error::ProfileShape(format!("unrecognised section '{piece}'")));
            }
        }
        let k: usize = k_text
            .ok_or_else(|| Error::ProfileShape("missing 'k=' section".into()))?
            .parse()
            .map_err(|_| Error::ProfileShape("k is not a positive integer".into()))?;
        let gammas = g_text
            .ok_or_else(|| Error::ProfileShape("missing 'g=' section".into()))?
            .split(',')
            .map(|t| t.trim().parse::<RationalExponent>())
            .collect::<Result<Vec<_>>>()?;
        if gammas.len() != k {
            return Err(Error::ProfileShape(format!(
                "k={k} but {} exponents listed",
                gammas.len()
            )));
        }
        Self::new(gammas)
    }
}

impl fmt::Display for PsProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "k={}; g=", self.k())?;
        for (i, g) in self.gammas.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{g}")?;
        }
        Ok(())
    }
}

impl FromStr for PsProfile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

/// Counts primes `p <= x` lying in every floor-power set of the profile.
///
/// Exact: membership of each prime is decided by the integer ceiling test,
/// with `g = 1` slots short-circuiting to true. The scan parallelises over
/// fixed-width chunks of the prime list; the result is a plain integer sum
/// and therefore independent of the worker count.
pub fn count_ps_primes(x: u64, profile: &PsProfile, table: &PrimeTable) -> Result<u64> {
    if x > table.limit() {
        return Err(Error::TableRange { query: x, limit: table.limit() });
    }
    let primes = table.primes_up_to(x);
    let count = primes
        .par_chunks(COUNT_CHUNK)
        .map(|chunk| {
            chunk
                .iter()
                .filter(|&&p| profile.gammas.iter().all(|g| is_ps_member(p, g)))
                .count() as u64
        })
        .sum();
    Ok(count)
}

/// Logarithmic-integral main term
/// `g_1...g_k * integral_2^x t^(-sigma) / ln t dt`,
/// evaluated by adaptive Simpson quadrature to relative accuracy
/// [`LI_REL_TOL`]. Requires `x >= 3`.
pub fn main_term_li(x: f64, profile: &PsProfile) -> Result<f64> {
    if !(x >= 3.0) {
        return Err(Error::Domain(format!("main_term_li needs x >= 3, got {x}")));
    }
    let sigma = profile.sigma_f64();
    let f = |t: f64| t.powf(-sigma) / t.ln();
    let split = 10.0f64.min(x);
    // Crude one-panel estimates fix the absolute tolerance scale.
    let crude = simpson_panel(&f, 2.0, split) + if x > 10.0 { simpson_panel(&f, 10.0, x) } else { 0.0 };
    let tol = LI_REL_TOL * crude.abs().max(1e-300) / 2.0;
    let mut integral = adaptive_simpson(&f, 2.0, split, tol);
    if x > 10.0 {
        integral += adaptive_simpson(&f, 10.0, x, tol);
    }
    let lead: f64 = profile.gammas.iter().map(|g| g.as_f64()).product();
    Ok(lead * integral)
}

/// Closed-form main term `g_1...g_k/(1-sigma) * x^(1-sigma)/ln x`.
/// Requires `x >= 3` and `sigma < 1`.
pub fn main_term_simple(x: f64, profile: &PsProfile) -> Result<f64> {
    if !(x >= 3.0) {
        return Err(Error::Domain(format!("main_term_simple needs x >= 3, got {x}")));
    }
    if profile.sigma >= BigRational::one() {
        return Err(Error::Domain(format!(
            "main_term_simple needs deficit < 1, got {}",
            profile.sigma
        )));
    }
    let sigma = profile.sigma_f64();
    let lead: f64 = profile.gammas.iter().map(|g| g.as_f64()).product();
    Ok(lead / (1.0 - sigma) * x.powf(1.0 - sigma) / x.ln())
}

fn simpson_panel(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b))
}

fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, whole: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let left = simpson_panel(f, a, m);
        let right = simpson_panel(f, m, b);
        let delta = left + right - whole;
        if depth >= 52 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        rec(f, a, m, tol / 2.0, left, depth + 1) + rec(f, m, b, tol / 2.0, right, depth + 1)
    }
    rec(f, a, b, tol, simpson_panel(f, a, b), 0)
}

/// One evaluated inequality `c1*s1 + c2*s2 + c3*s3 < rhs` over the three
/// profile deficits, kept in exact rationals.
#[derive(Clone, Debug)]
pub struct ConditionRow {
    pub coeffs: [BigRational; 3],
    pub lhs: BigRational,
    pub rhs: BigRational,
    pub satisfied: bool,
}

impl ConditionRow {
    fn evaluate(coeffs: [i64; 3], sigmas: &[BigRational; 3], rhs: BigRational) -> Self {
        let coeffs = coeffs.map(|c| BigRational::from_integer(BigInt::from(c)));
        let lhs: BigRational = coeffs
            .iter()
            .zip(sigmas.iter())
            .map(|(c, s)| c * s)
            .sum();
        let satisfied = lhs < rhs;
        Self { coeffs, lhs, rhs, satisfied }
    }
}

/// A single corollary-style threshold comparison `sigma < threshold`.
#[derive(Clone, Debug)]
pub struct CorollaryCheck {
    pub sigma: BigRational,
    pub threshold: BigRational,
    pub satisfied: bool,
}

impl CorollaryCheck {
    fn new(sigma: BigRational, threshold: BigRational) -> Self {
        let satisfied = sigma < threshold;
        Self { sigma, threshold, satisfied }
    }
}

/// Outcome of [`check_admissibility`]: the general condition system, the
/// dedicated `k = 3` constant set when applicable, and the two
/// equal-profile / single-profile threshold shortcuts.
#[derive(Clone, Debug)]
pub struct AdmissibilityReport {
    pub k: usize,
    pub varpi: BigRational,
    /// Rows with coefficients `(4k, 2k(k+1))` against `1 - varpi_k`.
    pub general: [ConditionRow; 3],
    /// For `k = 3` only: the sharper-analysed row set with coefficients
    /// `(12, 26)` against `1 - 1/24`. This set governs the verdict at
    /// `k = 3`; the general rows are reported for reference.
    pub specialized: Option<[ConditionRow; 3]>,
    /// All rows of the governing system hold strictly.
    pub admissible: bool,
    /// Equal-profile threshold on `max(s1, s2, s3)`:
    /// `(1 - 1/24)/64` at `k = 3`, `(1 - varpi_k)/(4k^2 + 8k)` beyond.
    pub corollary_equal: CorollaryCheck,
    /// Single-constrained-profile threshold on `s3`:
    /// `(1 - 1/24)/12` at `k = 3`, `(1 - varpi_k)/(4k)` beyond. The
    /// stated threshold matches a degenerate choice in the *last two*
    /// condition slots; with the constrained profile in slot 3 the row
    /// system itself is more restrictive (see `general`/`specialized`),
    /// so this flag is a necessary, not sufficient, signal.
    pub corollary_single: CorollaryCheck,
}

/// The admissibility margin `varpi_k`: `1/36, 1/64, 1/90` for
/// `k = 3, 4, 5` and `1/(3k^2)` from `k = 6` on.
pub fn varpi(k: usize) -> Result<BigRational> {
    match k {
        0..=2 => Err(Error::KTooSmall { min: 3, got: k }),
        3 => Ok(big_ratio(1, 36)),
        4 => Ok(big_ratio(1, 64)),
        5 => Ok(big_ratio(1, 90)),
        _ => Ok(big_ratio(1, 3 * (k as i64) * (k as i64))),
    }
}

/// Evaluates the three-profile admissibility system in exact rational
/// arithmetic. All three profiles must share the same `k >= 3`. Strict
/// inequalities: a profile triple sitting exactly on a boundary is not
/// admissible.
pub fn check_admissibility(
    p1: &PsProfile,
    p2: &PsProfile,
    p3: &PsProfile,
) -> Result<AdmissibilityReport> {
    let k = p1.k();
    if p2.k() != k {
        return Err(Error::MismatchedK(k, p2.k()));
    }
    if p3.k() != k {
        return Err(Error::MismatchedK(k, p3.k()));
    }
    let varpi_k = varpi(k)?;
    let ki = k as i64;
    let sigmas = [p1.sigma.clone(), p2.sigma.clone(), p3.sigma.clone()];
    let rhs = BigRational::one() - &varpi_k;

    let a = 4 * ki; // weight on the leading deficit of each row
    let b = 2 * ki * (ki + 1); // weight on the trailing deficits
    let general = [
        ConditionRow::evaluate([0, 0, a], &sigmas, rhs.clone()),
        ConditionRow::evaluate([0, a, b], &sigmas, rhs.clone()),
        ConditionRow::evaluate([a, b, b], &sigmas, rhs.clone()),
    ];

    let specialized = (k == 3).then(|| {
        let rhs3 = BigRational::one() - big_ratio(1, 24);
        [
            ConditionRow::evaluate([0, 0, 12], &sigmas, rhs3.clone()),
            ConditionRow::evaluate([0, 12, 26], &sigmas, rhs3.clone()),
            ConditionRow::evaluate([12, 26, 26], &sigmas, rhs3),
        ]
    });

    let admissible = match &specialized {
        Some(rows) => rows.iter().all(|r| r.satisfied),
        None => general.iter().all(|r| r.satisfied),
    };

    let sigma_max = sigmas.iter().max().expect("three deficits").clone();
    let equal_threshold = if k == 3 {
        big_ratio(23, 24 * 64)
    } else {
        &rhs / BigRational::from_integer(BigInt::from(4 * ki * ki + 8 * ki))
    };
    let single_threshold = if k == 3 {
        big_ratio(23, 24 * 12)
    } else {
        &rhs / BigRational::from_integer(BigInt::from(4 * ki))
    };

    Ok(AdmissibilityReport {
        k,
        varpi: varpi_k,
        general,
        specialized,
        admissible,
        corollary_equal: CorollaryCheck::new(sigma_max, equal_threshold),
        corollary_single: CorollaryCheck::new(sigmas[2].clone(), single_threshold),
    })
}
