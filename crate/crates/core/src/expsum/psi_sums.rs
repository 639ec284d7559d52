//! Sawtooth machinery over primes: the truncated Fourier expansion, the
//! membership-detecting difference sums, the min-envelope sum, and the
//! decay scan that probes the admissible exponent window empirically.

use num::complex::Complex64;
use num::rational::BigRational;
use num::{BigInt, One, Signed, ToPrimitive};
use rayon::prelude::*;

use super::phase::frac_mul_int;
use super::sums::e;
use crate::error::Error;
use crate::exact::{psi_f64, psi_neg_pow, psi_pow, MIN_FRAC_BITS};
use crate::psets::{varpi, PsProfile};
use crate::reduce::{par_chunked_sum, DEFAULT_CHUNK};
use crate::sieve::PrimeTable;
use crate::Result;

/// Truncation error of the sawtooth Fourier expansion at height `H`,
/// paired with its envelope `min(1, 1/(H ||theta||))`.
///
/// The conjugate `h`-pairs are summed as real sine terms, so the series
/// value is exactly real. For integral `theta` the envelope degenerates
/// to `1`.
pub fn psi_fourier_error(theta: f64, h: f64) -> (f64, f64) {
    assert!(h > 1.0, "expansion height must exceed 1");
    let mut series = 0.0;
    let cap = h.floor() as u64;
    // summed downward: the 1/k tail terms are the small ones
    for k in (1..=cap).rev() {
        series += (std::f64::consts::TAU * k as f64 * theta).sin() / (std::f64::consts::PI * k as f64);
    }
    let error = (psi_f64(theta) + series).abs();
    let dist = (theta - theta.round()).abs();
    let envelope = if dist == 0.0 {
        1.0
    } else {
        (1.0 / (h * dist)).min(1.0)
    };
    (error, envelope)
}

/// Which difference sum a weight table carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsiDiffMode {
    /// `p^(sigma_k) prod_j (psi(-(p+1)^(gamma_j)) - psi(-p^(gamma_j)))`,
    /// the form whose decay window is probed by [`scan_decay`].
    Standard,
    /// Single-exponent variant
    /// `(1/gamma) p^(1-gamma) (psi((p+1)^gamma) - psi(p^gamma))`,
    /// carrying the positive sawtooth convention and the density
    /// normalization. Requires a one-exponent profile.
    BalogFriedlander,
}

/// The alpha-independent weights `w(p)` of a difference sum, tabulated
/// once so that an alpha grid costs one complex exponential per prime
/// and grid point instead of six certified power evaluations.
pub struct PsiWeightTable {
    primes: Vec<u64>,
    weights: Vec<f64>,
    mode: PsiDiffMode,
}

impl PsiWeightTable {
    pub fn build(
        n: u64,
        profile: &PsProfile,
        mode: PsiDiffMode,
        table: &PrimeTable,
    ) -> Result<Self> {
        if n > table.limit() {
            return Err(Error::TableRange {
                query: n,
                limit: table.limit(),
            });
        }
        if mode == PsiDiffMode::BalogFriedlander && profile.k() != 1 {
            return Err(Error::ProfileShape(format!(
                "the normalized single-exponent sum needs k = 1, got k = {}",
                profile.k()
            )));
        }
        let primes = table.primes_up_to(n);
        let sigma = profile.sigma_f64();
        let weights = primes
            .par_iter()
            .map(|&p| {
                let pf = p as f64;
                match mode {
                    PsiDiffMode::Standard => {
                        let mut w = pf.powf(sigma);
                        for g in profile.gammas() {
                            if g.is_one() {
                                // psi(-(p+1)) - psi(-p) = 0 exactly
                                return Ok(0.0);
                            }
                            let hi = psi_neg_pow(p + 1, g, MIN_FRAC_BITS)?;
                            let lo = psi_neg_pow(p, g, MIN_FRAC_BITS)?;
                            w *= hi - lo;
                        }
                        Ok(w)
                    }
                    PsiDiffMode::BalogFriedlander => {
                        let g = &profile.gammas()[0];
                        if g.is_one() {
                            return Ok(0.0);
                        }
                        let hi = psi_pow(p + 1, g, MIN_FRAC_BITS)?;
                        let lo = psi_pow(p, g, MIN_FRAC_BITS)?;
                        let gamma = g.as_f64();
                        Ok(pf.powf(1.0 - gamma) * (hi - lo) / gamma)
                    }
                }
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(Self {
            primes,
            weights,
            mode,
        })
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn mode(&self) -> PsiDiffMode {
        self.mode
    }

    /// `sum_p w(p) e(alpha p)`.
    pub fn sum_at(&self, alpha: f64) -> Complex64 {
        par_chunked_sum(self.primes.len(), DEFAULT_CHUNK, |lo, hi| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (p, w) in self.primes[lo..hi].iter().zip(&self.weights[lo..hi]) {
                if *w != 0.0 {
                    acc += *w * e(frac_mul_int(alpha, *p));
                }
            }
            acc
        })
    }
}

/// One-shot evaluation of the difference sum over `p <= n`. Grid scans
/// should build a [`PsiWeightTable`] instead.
pub fn psi_diff_sum(
    n: u64,
    alpha: f64,
    profile: &PsProfile,
    mode: PsiDiffMode,
    table: &PrimeTable,
) -> Result<Complex64> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Domain(format!(
            "alpha must lie in [0, 1], got {alpha}"
        )));
    }
    Ok(PsiWeightTable::build(n, profile, mode, table)?.sum_at(alpha))
}

/// `sum_{m < x <= 2m} prod_j min(1, 1/(h_j ||(x + u_j)^(gamma_j)||))`.
///
/// Saturation makes this envelope insensitive near its corners, so plain
/// `f64` powers suffice; the exact fixed-point machinery is reserved for
/// the difference sums whose signs flip at integer boundaries.
pub fn sstar_min_sum(
    m: u64,
    hs: &[f64],
    gammas: &[crate::exact::RationalExponent],
    us: &[f64],
) -> Result<f64> {
    let s = hs.len();
    if s < 2 {
        return Err(Error::KTooSmall { min: 2, got: s });
    }
    if gammas.len() != s || us.len() != s {
        return Err(Error::MismatchedK(gammas.len(), s));
    }
    if hs.iter().any(|h| !(*h > 1.0)) {
        return Err(Error::Domain("envelope heights must exceed 1".into()));
    }
    if us.iter().any(|u| !(0.0..=1.0).contains(u)) {
        return Err(Error::Domain("shifts must lie in [0, 1]".into()));
    }
    if m == 0 {
        return Err(Error::Domain("range start must be positive".into()));
    }
    let gf: Vec<f64> = gammas.iter().map(|g| g.as_f64()).collect();
    Ok(par_chunked_sum(m as usize, DEFAULT_CHUNK, |lo, hi| {
        let mut acc = 0.0;
        for off in lo..hi {
            let x = (m + 1 + off as u64) as f64;
            let mut prod = 1.0;
            for j in 0..s {
                let v = (x + us[j]).powf(gf[j]);
                let dist = (v - v.round()).abs();
                let factor = if dist == 0.0 {
                    1.0
                } else {
                    (1.0 / (hs[j] * dist)).min(1.0)
                };
                prod *= factor;
            }
            acc += prod;
        }
        acc
    }))
}

/// The envelope `m (prod_j h_j)^(-1) (ln H)^s + H^(s/(s+1)) (ln H)^s`
/// with `H = max_j h_j` — the aggregate height is read as the largest
/// one, a documented interpretation choice.
pub fn sstar_bound(m: u64, hs: &[f64]) -> f64 {
    let s = hs.len() as f64;
    let h_max = hs.iter().cloned().fold(f64::MIN, f64::max);
    let inv_prod: f64 = hs.iter().map(|h| 1.0 / h).product();
    let log_pow = h_max.ln().powf(s);
    m as f64 * inv_prod * log_pow + h_max.powf(s / (s + 1.0)) * log_pow
}

/// One scanned size: the grid maximum of `|sum|` and its ratio to the
/// target scale `n^(1-delta)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub n: u64,
    pub max_modulus: f64,
    pub ratio: f64,
}

/// Decay-scan outcome across sizes.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanReport {
    pub rows: Vec<ScanRow>,
    pub delta: f64,
    pub alphas: usize,
    /// Last ratio no larger than the first: the scan is consistent with
    /// the claimed power saving.
    pub monotone_improvement: bool,
}

/// Exact admissibility gate for `(profile, delta)`: the inequality pair
/// under which the difference sum is known to decay like `n^(1-delta)`.
///
/// * `k = 1`: `9 sigma + 12 delta < 1` and `0 <= delta <= sigma`
///   (the normalized single-exponent statement);
/// * `k = 2`: `12 sigma + 38 delta < 1` and `delta < 1/2`;
/// * `k = 3`: `12 sigma + 52 delta < 23/24` and `delta < 1/2`;
/// * `k >= 4`: `4k sigma + 4k(k+1) delta < 1 - w_k` and `delta < 1/2`.
fn check_scan_admissible(profile: &PsProfile, delta: &BigRational) -> Result<()> {
    let k = profile.k();
    let big = |v: i64| BigRational::from_integer(BigInt::from(v));
    if delta.is_negative() {
        return Err(Error::InadmissibleScan(format!(
            "delta must be nonnegative, got {delta}"
        )));
    }
    let sigma = profile.sigma();
    let (lhs, rhs, extra_ok, label) = match k {
        1 => (
            big(9) * sigma + big(12) * delta,
            BigRational::one(),
            delta <= sigma,
            "k=1: 9 sigma + 12 delta < 1, delta <= sigma",
        ),
        2 => (
            big(12) * sigma + big(38) * delta,
            BigRational::one(),
            delta < &BigRational::new(BigInt::from(1), BigInt::from(2)),
            "k=2: 12 sigma + 38 delta < 1, delta < 1/2",
        ),
        3 => (
            big(12) * sigma + big(52) * delta,
            BigRational::new(BigInt::from(23), BigInt::from(24)),
            delta < &BigRational::new(BigInt::from(1), BigInt::from(2)),
            "k=3: 12 sigma + 52 delta < 23/24, delta < 1/2",
        ),
        k => (
            big(4 * k as i64) * sigma + big(4 * k as i64 * (k as i64 + 1)) * delta,
            BigRational::one() - varpi(k)?,
            delta < &BigRational::new(BigInt::from(1), BigInt::from(2)),
            "k>=4: 4k sigma + 4k(k+1) delta < 1 - w_k, delta < 1/2",
        ),
    };
    if lhs >= rhs || !extra_ok {
        return Err(Error::InadmissibleScan(format!(
            "({}, delta={delta}) violates [{label}]: lhs = {lhs}, rhs = {rhs}",
            profile,
        )));
    }
    Ok(())
}

/// Probes the decay of the difference sum over an alpha grid at each
/// size in `n_list`. The `(profile, delta)` pair must pass the exact
/// admissibility gate; sizes must be ascending. `k = 1` profiles are
/// scanned in the normalized single-exponent form, everything else in
/// the standard form.
pub fn scan_decay(
    profile: &PsProfile,
    n_list: &[u64],
    alphas: &[f64],
    delta: &BigRational,
    table: &PrimeTable,
) -> Result<ScanReport> {
    check_scan_admissible(profile, delta)?;
    if n_list.is_empty() || alphas.is_empty() {
        return Err(Error::Domain("need at least one size and one alpha".into()));
    }
    if n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain("sizes must be strictly ascending".into()));
    }
    let mode = if profile.k() == 1 {
        PsiDiffMode::BalogFriedlander
    } else {
        PsiDiffMode::Standard
    };
    let delta_f = delta.to_f64().ok_or_else(|| {
        Error::Domain("delta does not fit in a float".into())
    })?;
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let weights = PsiWeightTable::build(n, profile, mode, table)?;
        let moduli: Vec<f64> = alphas.iter().map(|&a| weights.sum_at(a).norm()).collect();
        let max_modulus = moduli.iter().cloned().fold(0.0, f64::max);
        let ratio = max_modulus / (n as f64).powf(1.0 - delta_f);
        rows.push(ScanRow {
            n,
            max_modulus,
            ratio,
        });
    }
    let monotone_improvement = rows.last().unwrap().ratio <= rows.first().unwrap().ratio;
    Ok(ScanReport {
        rows,
        delta: delta_f,
        alphas: alphas.len(),
        monotone_improvement,
    })
}
