//! The ternary singular series with explicit truncation control.
//!
//! `S(n) = prod_{p | n} (1 - 1/(p-1)^2) * prod_{p not| n} (1 + 1/(p-1)^3)`,
//! truncating the second product at a finite prime `P`. Every prime
//! divisor of `n` contributes its factor regardless of size (so even `n`
//! gives exactly zero through the `p = 2` factor), and the reported tail
//! bound rigorously covers extending the truncation: the omitted factors
//! multiply the value by at most `exp(sum_{p > P} 1/(p-1)^3)`, and that
//! exponent is at most `int_P^inf dt/(t-1)^3 = 1/(2(P-1)^2)`.

use rayon::prelude::*;

use crate::sieve::PrimeTable;
use crate::{Error, Result};

/// Default truncation prime; tail relative error below `1e-10`.
pub const DEFAULT_TRUNCATION: u64 = 100_000;

/// Fixed chunk width for the parallel product. Chunk partials are
/// multiplied in chunk order, so the result never depends on how many
/// workers ran.
const PRODUCT_CHUNK: usize = 4096;

/// A truncated singular-series evaluation with its tail bound.
#[derive(Clone, Debug)]
pub struct SingularValue {
    pub n: u64,
    pub value: f64,
    pub truncation_prime: u64,
    /// Bound on `|S_P(n) - S_P'(n)|` for every `P' > P`.
    pub tail_bound: f64,
}

/// Evaluates the singular series at `n` truncated at `p_max`.
///
/// Requires `n >= 3` and `p_max >= 100`; the table must reach `p_max`
/// for the product sweep and `sqrt(n)` for exact factorization.
pub fn singular_series(n: u64, p_max: u64, table: &PrimeTable) -> Result<SingularValue> {
    if n < 3 {
        return Err(Error::Domain(format!("singular series needs n >= 3, got {n}")));
    }
    if p_max < 100 {
        return Err(Error::Domain(format!(
            "truncation prime must be at least 100, got {p_max}"
        )));
    }
    let value = partial_value(n, p_max, table)?;
    let tail_bound = value * (0.5 / ((p_max - 1) as f64).powi(2)).exp_m1();
    Ok(SingularValue { n, value, truncation_prime: p_max, tail_bound })
}

/// The truncated product itself, without the public precondition on
/// `p_max`; ternary main terms reuse this with whatever truncation the
/// available table supports.
pub(crate) fn partial_value(n: u64, p_max: u64, table: &PrimeTable) -> Result<f64> {
    if p_max > table.limit() {
        return Err(Error::TableRange { query: p_max, limit: table.limit() });
    }
    let factor_cap = table.limit().saturating_mul(table.limit());
    if n > factor_cap {
        return Err(Error::TableRange { query: n, limit: factor_cap });
    }
    if n % 2 == 0 {
        // p = 2 divides n and contributes 1 - 1/(2-1)^2 = 0.
        return Ok(0.0);
    }
    let divisors = distinct_prime_divisors(n, table);

    let primes = table.primes_up_to(p_max);
    let chunk_products: Vec<f64> = primes
        .par_chunks(PRODUCT_CHUNK)
        .map(|chunk| {
            chunk
                .iter()
                .map(|&p| {
                    let q = (p - 1) as f64;
                    if divisors.binary_search(&p).is_ok() {
                        1.0 - 1.0 / (q * q)
                    } else {
                        1.0 + 1.0 / (q * q * q)
                    }
                })
                .product::<f64>()
        })
        .collect();
    let mut value: f64 = chunk_products.iter().product();
    // Prime divisors beyond the truncation still contribute their factor.
    for &q in divisors.iter().filter(|&&q| q > p_max) {
        let qf = (q - 1) as f64;
        value *= 1.0 - 1.0 / (qf * qf);
    }
    Ok(value)
}

/// Sorted distinct prime divisors by trial division; any remainder above
/// the trial range is itself prime (callers guarantee `n <= limit^2`).
fn distinct_prime_divisors(n: u64, table: &PrimeTable) -> Vec<u64> {
    let mut rest = n;
    let mut out = Vec::new();
    for p in table.iter_primes() {
        if p * p > rest {
            break;
        }
        if rest % p == 0 {
            out.push(p);
            while rest % p == 0 {
                rest /= p;
            }
        }
    }
    if rest > 1 {
        out.push(rest);
    }
    out
}
