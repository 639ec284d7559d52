//! Both sides of the Weyl–van der Corput inequality, evaluated literally.

use num::complex::Complex64;

use crate::error::Error;
use crate::reduce::pairwise_sum;
use crate::Result;

/// For a sequence `z` on `(n_start, n_start + z.len()]` and a shift cap
/// `1 <= q_max <= n_start`, returns
///
/// * `lhs = |sum_n z(n)|^2`, and
/// * `rhs = (n_start / q_max) * sum_{|q| <= q_max} (1 - |q|/q_max)
///    * Re sum_n z(n) conj(z(n + q))`,
///
/// the inner sum running over the `n` with both indices in range. The
/// inequality `lhs <<= rhs` holds with an absolute implied constant;
/// callers assert the empirically established envelope `lhs <= 4 rhs`.
pub fn weyl_vdc_sides(z: &[Complex64], n_start: u64, q_max: usize) -> Result<(f64, f64)> {
    if z.is_empty() {
        return Err(Error::Domain("sequence must be nonempty".into()));
    }
    if q_max == 0 || q_max as u64 > n_start {
        return Err(Error::Domain(format!(
            "shift cap must satisfy 1 <= Q <= N = {n_start}, got {q_max}"
        )));
    }
    let total = pairwise_sum(z);
    let lhs = total.norm_sqr();

    let len = z.len() as i64;
    let q_f = q_max as f64;
    let mut corr = 0.0;
    for q in -(q_max as i64)..=q_max as i64 {
        let weight = 1.0 - (q.abs() as f64) / q_f;
        if weight == 0.0 {
            continue;
        }
        let mut inner = 0.0;
        for i in 0..len {
            let j = i + q;
            if j < 0 || j >= len {
                continue;
            }
            inner += (z[i as usize] * z[j as usize].conj()).re;
        }
        corr += weight * inner;
    }
    let rhs = (n_start as f64 / q_f) * corr;
    Ok((lhs, rhs))
}
