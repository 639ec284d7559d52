//! Exact decomposition of the von Mangoldt function into signed
//! convolution terms with truncated Möbius factors.
//!
//! Two evaluation routes: a literal per-integer enumeration
//! ([`hb_decompose`]) used for inspection and small-n oracles, and a
//! batch route ([`hb_residual_batch`]) that assembles the same identity
//! with integer Dirichlet-convolution arrays — the only way the
//! whole-range residual check is affordable.

use rayon::prelude::*;

use crate::error::Error;
use crate::sieve::ArithTables;
use crate::Result;

/// One term of the decomposition: a factorization `n = n_1 ... n_{2j}`
/// where slots `j+1 ..= 2j` carry Möbius factors and are truncated at
/// `z`. `coefficient` folds the binomial sign and the Möbius values;
/// `value = coefficient * ln(n_1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HbTerm {
    pub j: u32,
    pub tuple: Vec<u64>,
    pub coefficient: i64,
    pub value: f64,
}

fn binomial(n: u32, k: u32) -> i64 {
    let mut acc = 1i64;
    for i in 0..k {
        acc = acc * (n - i) as i64 / (i + 1) as i64;
    }
    acc
}

/// Möbius by trial division; the decompose path works on single small
/// integers and needs no table.
fn mu_trial(mut n: u64) -> i64 {
    let mut mu = 1i64;
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            mu = -mu;
        }
        p += 1;
    }
    if n > 1 {
        mu = -mu;
    }
    mu
}

/// `Lambda(n)` by trial division: `ln p` when `n` is a prime power.
fn von_mangoldt_trial(n: u64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    let mut m = n;
    let mut p = 2u64;
    while p * p <= m {
        if m % p == 0 {
            while m % p == 0 {
                m /= p;
            }
            return if m == 1 { (p as f64).ln() } else { 0.0 };
        }
        p += 1;
    }
    (m as f64).ln() // n itself prime
}

fn sorted_divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

/// Recursively fills slots `slot ..` of a `2j`-tuple with an ordered
/// factorization of `rest`, truncating Möbius slots at `z` and skipping
/// tuples whose Möbius product vanishes.
fn enumerate_tuples(
    rest: u64,
    slot: usize,
    j: usize,
    z: u64,
    tuple: &mut Vec<u64>,
    out: &mut Vec<(Vec<u64>, i64)>,
) {
    let slots = 2 * j;
    if slot == slots - 1 {
        // the last slot (always a Moebius slot: 2j - 1 >= j) takes the
        // remainder
        if rest > z || mu_trial(rest) == 0 {
            return;
        }
        tuple.push(rest);
        let mu_prod: i64 = tuple[j..].iter().map(|x| mu_trial(*x)).product();
        out.push((tuple.clone(), mu_prod));
        tuple.pop();
        return;
    }
    let is_mu_slot = slot >= j;
    for d in sorted_divisors(rest) {
        if is_mu_slot {
            if d > z {
                break;
            }
            if mu_trial(d) == 0 {
                continue;
            }
        }
        tuple.push(d);
        enumerate_tuples(rest / d, slot + 1, j, z, tuple, out);
        tuple.pop();
    }
}

/// Enumerates every nonvanishing term of the `nu`-fold identity for a
/// single `n <= 2 z^nu`.
pub fn hb_decompose(n: u64, nu: u32, z: u64) -> Result<Vec<HbTerm>> {
    if n == 0 || nu == 0 || z == 0 {
        return Err(Error::Domain("need n >= 1, nu >= 1, z >= 1".into()));
    }
    let cap = 2u64.saturating_mul(z.saturating_pow(nu));
    if n > cap {
        return Err(Error::Domain(format!(
            "identity requires n <= 2 z^nu = {cap}, got {n}"
        )));
    }
    let mut terms = Vec::new();
    for j in 1..=nu as usize {
        let sign = if j % 2 == 1 { 1i64 } else { -1 };
        let scale = sign * binomial(nu, j as u32);
        let mut tuples = Vec::new();
        enumerate_tuples(n, 0, j, z, &mut Vec::new(), &mut tuples);
        for (tuple, mu_prod) in tuples {
            let coefficient = scale * mu_prod;
            let value = coefficient as f64 * (tuple[0] as f64).ln();
            terms.push(HbTerm {
                j: j as u32,
                tuple,
                coefficient,
                value,
            });
        }
    }
    Ok(terms)
}

/// `|Lambda(n) - sum of terms|` for a single `n`.
pub fn hb_identity_residual(n: u64, nu: u32, z: u64) -> Result<f64> {
    let terms = hb_decompose(n, nu, z)?;
    let total: f64 = terms.iter().map(|t| t.value).sum();
    Ok((von_mangoldt_trial(n) - total).abs())
}

/// In-place Dirichlet convolution with the all-ones function:
/// `out[n] = sum_{d | n} a[d]`.
fn divisor_sum_transform(a: &[i64]) -> Vec<i64> {
    let n = a.len() - 1;
    let mut out = vec![0i64; n + 1];
    for d in 1..=n {
        if a[d] == 0 {
            continue;
        }
        let ad = a[d];
        for m in (d..=n).step_by(d) {
            out[m] += ad;
        }
    }
    out
}

/// Dirichlet convolution `out[n] = sum_{d e = n} a[d] b[e]`.
fn dirichlet_convolution(a: &[i64], b: &[i64]) -> Vec<i64> {
    let n = a.len() - 1;
    let mut out = vec![0i64; n + 1];
    for d in 1..=n {
        if a[d] == 0 {
            continue;
        }
        let ad = a[d];
        for (e, m) in (d..=n).step_by(d).enumerate() {
            let e = e + 1;
            if e > n {
                break;
            }
            out[m] += ad * b[e];
        }
    }
    out
}

/// Evaluates the identity for every `2 <= n <= limit` at once and
/// returns `(max residual, worst n)`.
///
/// The combinatorial weight `w = sum_j (-1)^(j-1) C(nu, j)
/// (1^(*(j-1)) * mu_z^(*j))` is assembled in exact `i64` arithmetic;
/// the only floating step is the final `Lambda_HB(n) = sum_{d|n} ln(d)
/// w(n/d)` against the sieve's exact `Lambda`.
pub fn hb_residual_batch(
    limit: u64,
    nu: u32,
    z: u64,
    tables: &ArithTables,
) -> Result<(f64, u64)> {
    if nu == 0 || z == 0 {
        return Err(Error::Domain("need nu >= 1, z >= 1".into()));
    }
    let cap = 2u64.saturating_mul(z.saturating_pow(nu));
    if limit > cap {
        return Err(Error::Domain(format!(
            "identity requires limit <= 2 z^nu = {cap}, got {limit}"
        )));
    }
    if limit > tables.limit() {
        return Err(Error::TableRange {
            query: limit,
            limit: tables.limit(),
        });
    }
    let n = limit as usize;

    let mut mu_z = vec![0i64; n + 1];
    for x in 1..=(z.min(limit)) as usize {
        mu_z[x] = tables.mu(x as u64)? as i64;
    }

    let mut w = vec![0i64; n + 1];
    // mu_z^(*j), built incrementally
    let mut mu_power = mu_z.clone();
    for j in 1..=nu {
        if j > 1 {
            mu_power = dirichlet_convolution(&mu_power, &mu_z);
        }
        let mut term = mu_power.clone();
        for _ in 1..j {
            term = divisor_sum_transform(&term);
        }
        let sign = if j % 2 == 1 { 1i64 } else { -1 };
        let scale = sign * binomial(nu, j);
        for (wi, ti) in w.iter_mut().zip(&term) {
            *wi += scale * ti;
        }
    }

    // Lambda_HB = ln * w
    let mut lambda_hb = vec![0.0f64; n + 1];
    for d in 2..=n {
        let ld = (d as f64).ln();
        for (e, m) in (d..=n).step_by(d).enumerate() {
            lambda_hb[m] += ld * w[e + 1] as f64;
        }
    }

    let worst = (2..=limit)
        .into_par_iter()
        .map(|x| {
            let exact = match tables.prime_power_parts(x).expect("x <= limit") {
                Some((p, _)) => (p as f64).ln(),
                None => 0.0,
            };
            ((exact - lambda_hb[x as usize]).abs(), x)
        })
        .reduce(
            || (0.0, 0),
            // max by residual; ties resolve to the smaller n (0 = identity)
            |a, b| {
                if b.0 > a.0 || (b.0 == a.0 && (a.1 == 0 || (b.1 != 0 && b.1 < a.1))) {
                    b
                } else {
                    a
                }
            },
        );
    Ok(worst)
}
