//! Exponential sums and the bound formulas they are measured against.
//!
//! Everything here follows one reporting discipline: oscillating sums are
//! evaluated directly (with exact mod-1 phase reduction, see [`phase`]),
//! closed-form bound envelopes are evaluated as written, and the two are
//! paired into [`BoundReport`]s carrying the observed/bound ratio. The
//! ratios — not the unknowable implied constants — are what regression
//! tests pin.

mod bounds;
mod hb;
pub mod phase;
mod psi_sums;
mod sums;
mod weyl;

pub use bounds::{
    bound_prop31, bound_prop31_at, bound_second_deriv, bound_third_deriv, Prop31Variant, SumClass,
    TypeRangeClass,
};
pub use hb::{hb_decompose, hb_identity_residual, hb_residual_batch, HbTerm};
pub use psi_sums::{
    psi_diff_sum, psi_fourier_error, scan_decay, sstar_bound, sstar_min_sum, PsiDiffMode,
    PsiWeightTable, ScanReport, ScanRow,
};
pub use sums::{exp_sum_sk, type_i_sum, type_ii_sum, PhaseTable};
pub use weyl::weyl_vdc_sides;

use crate::error::Error;
use crate::exact::RationalExponent;
use crate::Result;
use std::fmt;

/// Inverse golden ratio, the rotation step of [`golden_alpha_grid`].
pub const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Low-discrepancy grid of `count` points in `[0, 1)`: a golden-ratio
/// rotation whose starting offset is derived from `seed`. Deterministic
/// and, unlike a uniform lattice, never locked to the periods of the
/// phases being probed.
pub fn golden_alpha_grid(count: usize, seed: u64) -> Vec<f64> {
    let offset = ((seed % (1 << 20)) as f64 * INV_PHI).fract();
    (0..count)
        .map(|i| (offset + i as f64 * INV_PHI).fract())
        .collect()
}

/// Inputs of the one-dimensional sum `S_k`: the linear frequency `alpha`,
/// real coefficients `a_j` attached to exponents `gamma_j`, and the
/// summation range `(m, m1]` with `m1 <= 2m`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpSumParams {
    alpha: f64,
    coeffs: Vec<f64>,
    gammas: Vec<RationalExponent>,
    m: u64,
    m1: u64,
}

impl ExpSumParams {
    pub fn new(
        alpha: f64,
        coeffs: Vec<f64>,
        gammas: Vec<RationalExponent>,
        m: u64,
        m1: u64,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::Domain(format!(
                "alpha must lie in [0, 1], got {alpha}"
            )));
        }
        if coeffs.is_empty() {
            return Err(Error::Domain("at least one phase coefficient".into()));
        }
        if coeffs.len() != gammas.len() {
            return Err(Error::MismatchedK(coeffs.len(), gammas.len()));
        }
        if coeffs.iter().any(|a| !a.is_finite() || *a == 0.0) {
            return Err(Error::Domain(
                "phase coefficients must be finite and nonzero".into(),
            ));
        }
        validate_exponents(&gammas)?;
        if m == 0 || m >= m1 || m1 > 2 * m {
            return Err(Error::Domain(format!(
                "range must satisfy 1 <= m < m1 <= 2m, got ({m}, {m1}]"
            )));
        }
        Ok(Self {
            alpha,
            coeffs,
            gammas,
            m,
            m1,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Same parameters with a different linear frequency.
    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::Domain(format!(
                "alpha must lie in [0, 1], got {alpha}"
            )));
        }
        let mut p = self.clone();
        p.alpha = alpha;
        Ok(p)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn gammas(&self) -> &[RationalExponent] {
        &self.gammas
    }

    pub fn k(&self) -> usize {
        self.coeffs.len()
    }

    /// Range start `m` (exclusive).
    pub fn m(&self) -> u64 {
        self.m
    }

    /// Range end `m1` (inclusive).
    pub fn m1(&self) -> u64 {
        self.m1
    }

    pub fn len(&self) -> usize {
        (self.m1 - self.m) as usize
    }

    pub fn is_empty(&self) -> bool {
        false // the constructor guarantees m < m1
    }

    /// The amplitude scale `R = sum_j |a_j| m^(gamma_j)` the bound
    /// formulas are phrased in.
    pub fn r(&self) -> f64 {
        let m = self.m as f64;
        self.coeffs
            .iter()
            .zip(&self.gammas)
            .map(|(a, g)| a.abs() * m.powf(g.as_f64()))
            .sum()
    }
}

impl fmt::Display for ExpSumParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "alpha={:.6e}; coeffs=[", self.alpha)?;
        for (i, a) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a:.6e}")?;
        }
        write!(f, "]; gammas=[")?;
        for (i, g) in self.gammas.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{g}")?;
        }
        write!(f, "]; range=({}, {}]", self.m, self.m1)
    }
}

/// An observed sum modulus paired with the bound formula it is tested
/// against. `ratio` is the dimensionless quantity regression fixtures pin.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    /// Identifier of the bound formula (e.g. `"prop31-second"`).
    pub formula: &'static str,
    /// `|S|` as evaluated.
    pub observed: f64,
    /// The formula value; always positive.
    pub bound: f64,
    /// `observed / bound`.
    pub ratio: f64,
    /// Echo of the inputs for CSV reporting.
    pub params: String,
}

impl BoundReport {
    pub(crate) fn assemble(formula: &'static str, observed: f64, bound: f64, params: String) -> Self {
        debug_assert!(bound > 0.0, "bound formulas are positive on their domain");
        Self {
            formula,
            observed,
            bound,
            ratio: observed / bound,
            params,
        }
    }
}

/// Strictly decreasing exponents in `(1/2, 1)` — the window every phase
/// exponent here lives in. Integral exponents belong to the linear term,
/// so `1` is rejected.
fn validate_exponents(gammas: &[RationalExponent]) -> Result<()> {
    for g in gammas {
        if g.is_one() {
            return Err(Error::Domain(
                "phase exponents must be non-integral; fold gamma=1 into alpha".into(),
            ));
        }
    }
    for w in gammas.windows(2) {
        if w[1] >= w[0] {
            return Err(Error::Domain(format!(
                "exponents must strictly decrease, got {} before {}",
                w[0], w[1]
            )));
        }
    }
    Ok(())
}
