//! Bound envelopes: derivative tests, the k-phase sum bound, and the
//! bilinear range thresholds.

use super::sums::PhaseTable;
use super::{BoundReport, ExpSumParams};
use crate::error::Error;
use crate::exact::RationalExponent;
use crate::psets::varpi;
use crate::Result;
use num::ToPrimitive;

/// Second-derivative test envelope `A lambda1^(1/2) + lambda1^(-1/2)` for
/// a phase with `f'' ~ lambda1` over an interval of length `A`.
pub fn bound_second_deriv(a: f64, lambda1: f64) -> f64 {
    assert!(a > 0.0 && lambda1 > 0.0, "derivative scales are positive");
    a * lambda1.sqrt() + lambda1.powf(-0.5)
}

/// Third-derivative test envelope `A lambda2^(1/6) + lambda2^(-1/3)`.
pub fn bound_third_deriv(a: f64, lambda2: f64) -> f64 {
    assert!(a > 0.0 && lambda2 > 0.0, "derivative scales are positive");
    a * lambda2.powf(1.0 / 6.0) + lambda2.powf(-1.0 / 3.0)
}

/// Which envelope of the k-phase sum bound to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Prop31Variant {
    /// `R^(1/2) + M R^(-1/(k+1))`
    Second,
    /// `M^(1/2) R^(1/6) + M R^(-1/(k+2))`
    Third,
}

/// Evaluates `|S_k|` against the chosen envelope. Requires `k >= 3`; the
/// one- and two-phase cases have their own sharper statements and are not
/// covered by this formula.
pub fn bound_prop31(params: &ExpSumParams, variant: Prop31Variant) -> Result<BoundReport> {
    bound_prop31_at(&PhaseTable::build(params)?, params, variant)
}

/// Same as [`bound_prop31`], but the alpha-independent phase table is
/// supplied by the caller so a grid of alphas pays for one build. The
/// table must come from the same coefficient/exponent/range data.
pub fn bound_prop31_at(
    table: &PhaseTable,
    params: &ExpSumParams,
    variant: Prop31Variant,
) -> Result<BoundReport> {
    let k = params.k();
    if k < 3 {
        return Err(Error::KTooSmall { min: 3, got: k });
    }
    if table.len() != params.len() {
        return Err(Error::Domain(format!(
            "phase table covers {} points, params describe {}",
            table.len(),
            params.len()
        )));
    }
    let m = params.m() as f64;
    let r = params.r();
    let (formula, bound) = match variant {
        Prop31Variant::Second => (
            "prop31-second",
            r.sqrt() + m * r.powf(-1.0 / (k as f64 + 1.0)),
        ),
        Prop31Variant::Third => (
            "prop31-third",
            m.sqrt() * r.powf(1.0 / 6.0) + m * r.powf(-1.0 / (k as f64 + 2.0)),
        ),
    };
    let observed = table.sum_at(params.alpha()).norm();
    Ok(BoundReport::assemble(
        formula,
        observed,
        bound,
        params.to_string(),
    ))
}

/// Where a bilinear factor size sits relative to the two workable windows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SumClass {
    /// Only the smooth-coefficient window applies.
    TypeI,
    /// Only the bounded-coefficient window applies.
    TypeII,
    /// Both windows apply.
    Both,
    /// Neither window applies.
    Neither,
}

/// The factor-size thresholds for bilinear decompositions at scale `x`
/// with frequency shifts `h` and exponents `gammas` (`k >= 3`).
///
/// With `r = sum_j |h_j| x^(gamma_j)`:
/// * `k = 3`:  `X_k = x^(1/48 - 1/2) r`, `X*_k = x^(1/2 + 49/144) r^(-1/3)`;
/// * `k >= 4`: `X_k = x^(w_k/2 - 1/2) r`, `X*_k = x^(1/2 + w_k)`,
///
/// where `w_k` is the admissibility slack for `k` exponents. An inner
/// range `N` is workable with bounded coefficients iff
/// `x^(1/6) <= N <= X_k`; its cofactor `M = x / N` is workable with
/// smooth coefficients iff `M <= X*_k`.
#[derive(Debug, Clone)]
pub struct TypeRangeClass {
    x: f64,
    k: usize,
    script_r: f64,
    x_k: f64,
    x_star_k: f64,
}

impl TypeRangeClass {
    pub fn new(x: f64, h: &[i64], gammas: &[RationalExponent]) -> Result<Self> {
        let k = gammas.len();
        if k < 3 {
            return Err(Error::KTooSmall { min: 3, got: k });
        }
        if h.len() != k {
            return Err(Error::MismatchedK(h.len(), k));
        }
        if h.iter().any(|x| *x == 0) {
            return Err(Error::Domain("frequency shifts h_j must be nonzero".into()));
        }
        super::validate_exponents(gammas)?;
        if !(x > 1.0) {
            return Err(Error::Domain(format!("scale x must exceed 1, got {x}")));
        }
        let script_r: f64 = h
            .iter()
            .zip(gammas)
            .map(|(hj, g)| (hj.abs() as f64) * x.powf(g.as_f64()))
            .sum();
        let (x_k, x_star_k) = if k == 3 {
            (
                x.powf(1.0 / 48.0 - 0.5) * script_r,
                x.powf(0.5 + 49.0 / 144.0) * script_r.powf(-1.0 / 3.0),
            )
        } else {
            let w = varpi(k)?.to_f64().expect("varpi is a small rational");
            (x.powf(w / 2.0 - 0.5) * script_r, x.powf(0.5 + w))
        };
        Ok(Self {
            x,
            k,
            script_r,
            x_k,
            x_star_k,
        })
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// `r = sum_j |h_j| x^(gamma_j)`.
    pub fn script_r(&self) -> f64 {
        self.script_r
    }

    /// Upper end of the bounded-coefficient window.
    pub fn x_k(&self) -> f64 {
        self.x_k
    }

    /// Upper end of the smooth-coefficient cofactor window.
    pub fn x_star_k(&self) -> f64 {
        self.x_star_k
    }

    /// Classifies an inner factor size `n`.
    pub fn classify(&self, n: f64) -> SumClass {
        let type_ii = n >= self.x.powf(1.0 / 6.0) && n <= self.x_k;
        let type_i = self.x / n <= self.x_star_k;
        match (type_i, type_ii) {
            (true, true) => SumClass::Both,
            (true, false) => SumClass::TypeI,
            (false, true) => SumClass::TypeII,
            (false, false) => SumClass::Neither,
        }
    }
}
