//! Direct evaluation of the one-dimensional and bilinear sums.

use num::complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::TAU;

use super::phase::{frac_mul_int, frac_mul_pow};
use super::{validate_exponents, ExpSumParams};
use crate::error::Error;
use crate::exact::{frac_pow, RationalExponent, MIN_FRAC_BITS};
use crate::reduce::{pairwise_sum, par_chunked_sum, DEFAULT_CHUNK};
use crate::Result;

/// `e(x) = exp(2 pi i x)`.
#[inline]
pub(crate) fn e(x: f64) -> Complex64 {
    let (s, c) = (TAU * x).sin_cos();
    Complex64::new(c, s)
}

/// The alpha-independent part of the phase, tabulated once per range.
///
/// `phi[i] = frac(sum_j a_j * (m + 1 + i)^(gamma_j))`, so evaluating the
/// sum at any `alpha` costs one exact `frac(alpha * m)` and one complex
/// exponential per point — the expensive certified powers are shared by
/// every grid point.
pub struct PhaseTable {
    m: u64,
    phi: Vec<f64>,
}

impl PhaseTable {
    pub fn build(params: &ExpSumParams) -> Result<Self> {
        let m = params.m();
        let coeffs = params.coeffs();
        let gammas = params.gammas();
        let phi = (1..=params.m1() - m)
            .into_par_iter()
            .map(|off| {
                let n = m + off;
                let mut acc = 0.0;
                for (a, g) in coeffs.iter().zip(gammas) {
                    let pw = frac_pow(n, g, MIN_FRAC_BITS)?;
                    acc += frac_mul_pow(*a, &pw);
                }
                Ok(acc)
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(Self { m, phi })
    }

    pub fn len(&self) -> usize {
        self.phi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phi.is_empty()
    }

    /// `sum_{m < n <= m1} e(alpha n + sum_j a_j n^(gamma_j))`.
    pub fn sum_at(&self, alpha: f64) -> Complex64 {
        par_chunked_sum(self.phi.len(), DEFAULT_CHUNK, |lo, hi| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (i, phi) in self.phi[lo..hi].iter().enumerate() {
                let n = self.m + 1 + (lo + i) as u64;
                acc += e(frac_mul_int(alpha, n) + phi);
            }
            acc
        })
    }
}

/// `S_k` evaluated directly: a [`PhaseTable`] build followed by one scan.
/// Callers probing an alpha grid should hold the table instead.
pub fn exp_sum_sk(params: &ExpSumParams) -> Result<Complex64> {
    Ok(PhaseTable::build(params)?.sum_at(params.alpha()))
}

fn validate_bilinear(
    m: u64,
    n: u64,
    a: &[Complex64],
    b: &[Complex64],
    h: &[i64],
    gammas: &[RationalExponent],
    alpha: f64,
) -> Result<()> {
    if m == 0 || n == 0 {
        return Err(Error::Domain("bilinear ranges start at m, n >= 1".into()));
    }
    if a.len() != m as usize || b.len() != n as usize {
        return Err(Error::Domain(format!(
            "coefficient arrays must cover (M, 2M] x (N, 2N]: got {} for M={m}, {} for N={n}",
            a.len(),
            b.len()
        )));
    }
    if h.is_empty() || h.len() != gammas.len() {
        return Err(Error::MismatchedK(h.len(), gammas.len()));
    }
    if h.iter().any(|x| *x == 0) {
        return Err(Error::Domain("frequency shifts h_j must be nonzero".into()));
    }
    validate_exponents(gammas)?;
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Domain(format!(
            "alpha must lie in [0, 1], got {alpha}"
        )));
    }
    let cap = 1.0 + 1e-9;
    if a.iter().chain(b).any(|c| c.norm() > cap) {
        return Err(Error::Domain(
            "bilinear coefficients must satisfy |a(m)|, |b(n)| <= 1".into(),
        ));
    }
    Ok(())
}

/// `S_II(M, N) = sum_{M<m<=2M} a(m) sum_{N<n<=2N} b(n)
/// e(alpha m n + sum_j h_j (m n)^(gamma_j))`.
///
/// `a[i]` is the coefficient of `m = M + 1 + i`, likewise `b`.
pub fn type_ii_sum(
    m: u64,
    n: u64,
    a: &[Complex64],
    b: &[Complex64],
    h: &[i64],
    gammas: &[RationalExponent],
    alpha: f64,
) -> Result<Complex64> {
    validate_bilinear(m, n, a, b, h, gammas, alpha)?;
    let rows = (0..m as usize)
        .into_par_iter()
        .map(|i| {
            let mm = m + 1 + i as u64;
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, bn) in b.iter().enumerate() {
                let nn = n + 1 + j as u64;
                let prod = mm * nn;
                let mut phase = frac_mul_int(alpha, prod);
                for (hj, g) in h.iter().zip(gammas) {
                    let pw = frac_pow(prod, g, MIN_FRAC_BITS)?;
                    phase += frac_mul_pow(*hj as f64, &pw);
                }
                acc += bn * e(phase);
            }
            Ok(a[i] * acc)
        })
        .collect::<Result<Vec<Complex64>>>()?;
    Ok(pairwise_sum(&rows))
}

/// `S_I(M, N)`: the type-II sum with smooth inner coefficients `b == 1`.
pub fn type_i_sum(
    m: u64,
    n: u64,
    a: &[Complex64],
    h: &[i64],
    gammas: &[RationalExponent],
    alpha: f64,
) -> Result<Complex64> {
    let ones = vec![Complex64::new(1.0, 0.0); n as usize];
    type_ii_sum(m, n, a, &ones, h, gammas, alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expsum::golden_alpha_grid;

    fn gam(n: u64, d: u64) -> RationalExponent {
        RationalExponent::new(n, d).unwrap()
    }

    #[test]
    fn tiny_coefficients_give_the_range_length() {
        // all phases ~ 0 => every term ~ 1
        let p = ExpSumParams::new(
            0.0,
            vec![1e-9, 1e-9],
            vec![gam(9, 10), gam(4, 5)],
            1000,
            2000,
        )
        .unwrap();
        let s = exp_sum_sk(&p).unwrap();
        assert!((s.re - 1000.0).abs() < 1e-2);
        assert!(s.im.abs() < 1e-2);
    }

    #[test]
    fn half_frequency_alternates() {
        // e(m/2) = (-1)^m; with a negligible gamma term the sum telescopes
        let p = ExpSumParams::new(0.5, vec![1e-9], vec![gam(9, 10)], 1000, 1999).unwrap();
        let s = exp_sum_sk(&p).unwrap();
        assert!(s.norm() <= 1.0 + 1e-3);
    }

    #[test]
    fn matches_direct_high_precision_oracle() {
        // Oracle: the same sum with phases assembled in one shot from the
        // certified fixed-point value at 192 bits, reduced mod 1 on the
        // integer side. Checks the 96-bit table path end to end.
        let alpha = f64::from_bits(0x3FDA_8279_99FC_EF34); // ~ sqrt(2)-1, 53-bit
        let p = ExpSumParams::new(alpha, vec![1.0], vec![gam(9, 10)], 10_000, 20_000).unwrap();
        let s = exp_sum_sk(&p).unwrap();

        let g = gam(9, 10);
        let mut oracle = Complex64::new(0.0, 0.0);
        for n in 10_001..=20_000u64 {
            let pw = frac_pow(n, &g, 192).unwrap();
            let phase = frac_mul_int(alpha, n) + frac_mul_pow(1.0, &pw);
            oracle += e(phase);
        }
        assert!(
            (s - oracle).norm() < 1e-6 * 10_000.0,
            "table sum {s} vs oracle {oracle}"
        );
    }

    #[test]
    fn phase_table_is_reused_across_alphas() {
        let p = ExpSumParams::new(0.25, vec![1.0], vec![gam(7, 10)], 512, 1024).unwrap();
        let table = PhaseTable::build(&p).unwrap();
        for alpha in golden_alpha_grid(8, 3) {
            let via_table = table.sum_at(alpha);
            let direct = exp_sum_sk(&p.with_alpha(alpha).unwrap()).unwrap();
            assert_eq!(via_table, direct, "bitwise agreement at alpha={alpha}");
        }
    }

    #[test]
    fn bilinear_separates_over_a_product_grid() {
        // a == b == 1: S_II equals the direct double loop, which is also
        // computed here as the brute-force oracle.
        let (m, n) = (24u64, 32u64);
        let h = vec![1i64, -2];
        let gs = vec![gam(9, 10), gam(7, 10)];
        let alpha = 0.3;
        let a = vec![Complex64::new(1.0, 0.0); m as usize];
        let b = vec![Complex64::new(1.0, 0.0); n as usize];
        let got = type_ii_sum(m, n, &a, &b, &h, &gs, alpha).unwrap();

        let mut want = Complex64::new(0.0, 0.0);
        for mm in m + 1..=2 * m {
            for nn in n + 1..=2 * n {
                let prod = mm * nn;
                let mut phase = frac_mul_int(alpha, prod);
                for (hj, g) in h.iter().zip(&gs) {
                    let pw = frac_pow(prod, g, 96).unwrap();
                    phase += frac_mul_pow(*hj as f64, &pw);
                }
                want += e(phase);
            }
        }
        assert!((got - want).norm() < 1e-9 * (m * n) as f64);
        // type I with the same inputs is the identical sum
        let ti = type_i_sum(m, n, &a, &h, &gs, alpha).unwrap();
        assert!((ti - got).norm() == 0.0);
    }

    #[test]
    fn bilinear_rejects_oversized_coefficients() {
        let a = vec![Complex64::new(1.5, 0.0); 4];
        let b = vec![Complex64::new(1.0, 0.0); 4];
        let err = type_ii_sum(
            4,
            4,
            &a,
            &b,
            &[1],
            &[gam(9, 10)],
            0.0,
        );
        assert!(err.is_err());
    }
}
