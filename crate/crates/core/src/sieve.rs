//! Prime sieving and linear multiplicative tables.
//!
//! [`PrimeTable`] is a segmented Eratosthenes sieve storing an
//! odd-composite bitset (one bit per odd number), with per-segment prime
//! counts for fast `pi(x)` queries and an optional binary cache file.
//! [`ArithTables`] is a linear sieve producing smallest prime factors,
//! Moebius values, divisor counts and prime-power data (for the von
//! Mangoldt function) in one pass.

use rayon::prelude::*;
use std::fs;
use std::io::Write;
use std::path::Path;

use crate::{Error, Result};

/// Default segment width in numbers (not bits). Chosen so one segment's
/// bitmap (width/16 bytes) stays cache-resident.
pub const DEFAULT_SEGMENT: u64 = 1 << 20;

/// Capacity guard for sieve construction.
pub const MAX_SIEVE_LIMIT: u64 = 1 << 32;

const CACHE_MAGIC: [u8; 8] = *b"PSSIEVE\x01";
const CACHE_VERSION: u32 = 1;

/// Segmented odd-composite sieve of Eratosthenes up to `limit` inclusive.
pub struct PrimeTable {
    limit: u64,
    segment: u64,
    /// Bit `n/2` set means odd `n` is composite (bit 0 covers `1`).
    words: Vec<u64>,
    /// `seg_counts[s]` = number of primes `<=` the end of segment `s`.
    seg_counts: Vec<u64>,
}

impl PrimeTable {
    /// Sieves `2..=limit` with the default segment width.
    pub fn sieve(limit: u64) -> Result<Self> {
        Self::sieve_with_segment(limit, DEFAULT_SEGMENT)
    }

    /// Sieves with an explicit segment width (rounded up to a multiple of
    /// 128 numbers so segments own whole bitset words).
    pub fn sieve_with_segment(limit: u64, segment: u64) -> Result<Self> {
        if limit < 2 {
            return Err(Error::Domain(format!("sieve limit {limit} < 2")));
        }
        if limit > MAX_SIEVE_LIMIT {
            return Err(Error::SieveCapacity {
                requested: limit,
                cap: MAX_SIEVE_LIMIT,
            });
        }
        let segment = segment.max(128).div_ceil(128) * 128;
        let n_bits = limit / 2 + 1; // bits for odd numbers 1..=limit
        let n_words = n_bits.div_ceil(64) as usize;
        let words_per_seg = (segment / 128) as usize;

        let base_primes = simple_odd_primes(isqrt(limit));

        let mut words = vec![0u64; n_words];
        words[0] |= 1; // 1 is not prime
        words
            .par_chunks_mut(words_per_seg)
            .enumerate()
            .for_each(|(si, chunk)| {
                // chunk covers odd numbers in [lo, hi)
                let lo = si as u64 * segment;
                let hi = (lo + segment).min(limit + 1);
                for &p in &base_primes {
                    let p2 = p * p;
                    if p2 >= hi {
                        break;
                    }
                    let mut m = p2.max(lo.div_ceil(p) * p);
                    if m % 2 == 0 {
                        m += p;
                    }
                    while m < hi {
                        let bit = m / 2 - lo / 2;
                        chunk[(bit / 64) as usize] |= 1u64 << (bit % 64);
                        m += 2 * p;
                    }
                }
            });

        let mut table = Self {
            limit,
            segment,
            words,
            seg_counts: Vec::new(),
        };
        table.rebuild_counts();
        Ok(table)
    }

    fn rebuild_counts(&mut self) {
        let words_per_seg = (self.segment / 128) as usize;
        let mut counts = Vec::with_capacity(self.words.len().div_ceil(words_per_seg));
        let mut acc = 1; // the prime 2
        for (si, chunk) in self.words.chunks(words_per_seg).enumerate() {
            let seg_start = si as u64 * self.segment;
            for (wi, w) in chunk.iter().enumerate() {
                let word_base = seg_start + 128 * wi as u64;
                let valid = valid_bits_in_word(word_base, self.limit);
                acc += valid - (w & mask_low(valid)).count_ones() as u64;
            }
            counts.push(acc);
        }
        self.seg_counts = counts;
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn segment(&self) -> u64 {
        self.segment
    }

    /// Primality query. Panics if `n` exceeds the sieved limit.
    pub fn is_prime(&self, n: u64) -> bool {
        assert!(n <= self.limit, "is_prime({n}) beyond sieve limit {}", self.limit);
        if n < 2 {
            return false;
        }
        if n == 2 {
            return true;
        }
        if n % 2 == 0 {
            return false;
        }
        let bit = n / 2;
        self.words[(bit / 64) as usize] & (1 << (bit % 64)) == 0
    }

    /// Number of primes `<= x` (requires `x <= limit`).
    pub fn prime_count(&self, x: u64) -> u64 {
        assert!(x <= self.limit, "prime_count({x}) beyond sieve limit {}", self.limit);
        if x < 2 {
            return 0;
        }
        if x == 2 {
            return 1;
        }
        // count odd primes <= x starting from the previous segment total
        let seg = x / self.segment;
        let mut acc = if seg == 0 {
            1
        } else {
            self.seg_counts[(seg - 1) as usize]
        };
        let seg_start_word = (seg * self.segment / 128) as usize;
        let last_bit = (x - 1) / 2; // largest k with 2k+1 <= x
        for wi in seg_start_word..self.words.len() {
            let first_bit = 64 * wi as u64;
            if first_bit > last_bit {
                break;
            }
            let take = (last_bit - first_bit + 1)
                .min(valid_bits_in_word(128 * wi as u64, self.limit))
                .min(64);
            acc += take - (self.words[wi] & mask_low(take)).count_ones() as u64;
        }
        acc
    }

    /// Iterator over all primes in ascending order.
    pub fn iter_primes(&self) -> impl Iterator<Item = u64> + '_ {
        std::iter::once(2)
            .chain(
                (0..self.words.len()).flat_map(move |wi| {
                    let w = self.words[wi];
                    let base = 128 * wi as u64;
                    (0..64u64).filter_map(move |b| {
                        if w & (1 << b) == 0 {
                            Some(base + 2 * b + 1)
                        } else {
                            None
                        }
                    })
                }),
            )
            .filter(move |&n| n <= self.limit)
            .filter(|&n| n != 1)
    }

    /// Collects the primes `<= x` into a vector.
    pub fn primes_up_to(&self, x: u64) -> Vec<u64> {
        assert!(x <= self.limit);
        self.iter_primes().take_while(|&p| p <= x).collect()
    }

    /// Serialises the sieve: fixed header plus the raw little-endian
    /// bitset. The byte stream is a pure function of `(limit, segment)`.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut buf = Vec::with_capacity(40 + self.words.len() * 8);
        buf.extend_from_slice(&CACHE_MAGIC);
        buf.extend_from_slice(&CACHE_VERSION.to_le_bytes());
        buf.extend_from_slice(&self.limit.to_le_bytes());
        buf.extend_from_slice(&self.segment.to_le_bytes());
        buf.extend_from_slice(&(self.words.len() as u64).to_le_bytes());
        for w in &self.words {
            buf.extend_from_slice(&w.to_le_bytes());
        }
        let mut f = fs::File::create(path)?;
        f.write_all(&buf)?;
        Ok(())
    }

    /// Loads and validates a cache file written by [`PrimeTable::save`].
    pub fn load(path: &Path) -> Result<Self> {
        let buf = fs::read(path)?;
        if buf.len() < 36 {
            return Err(Error::CacheFormat("truncated header".into()));
        }
        if buf[0..8] != CACHE_MAGIC {
            return Err(Error::CacheFormat("bad magic".into()));
        }
        let version = u32::from_le_bytes(buf[8..12].try_into().unwrap());
        if version != CACHE_VERSION {
            return Err(Error::CacheFormat(format!(
                "version {version}, expected {CACHE_VERSION}"
            )));
        }
        let limit = u64::from_le_bytes(buf[12..20].try_into().unwrap());
        let segment = u64::from_le_bytes(buf[20..28].try_into().unwrap());
        let n_words = u64::from_le_bytes(buf[28..36].try_into().unwrap()) as usize;
        if limit < 2 || limit > MAX_SIEVE_LIMIT || segment == 0 || segment % 128 != 0 {
            return Err(Error::CacheFormat("inconsistent header fields".into()));
        }
        if (limit / 2 + 1).div_ceil(64) as usize != n_words || buf.len() != 36 + 8 * n_words {
            return Err(Error::CacheFormat("payload length mismatch".into()));
        }
        let words: Vec<u64> = buf[36..]
            .chunks_exact(8)
            .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        let mut table = Self {
            limit,
            segment,
            words,
            seg_counts: Vec::new(),
        };
        table.rebuild_counts();
        Ok(table)
    }
}

fn mask_low(bits: u64) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

/// Number of bitset positions in the word starting at odd-number base
/// `word_base + 1` that correspond to numbers `<= limit`.
fn valid_bits_in_word(word_base: u64, limit: u64) -> u64 {
    // word covers odd numbers word_base+1, word_base+3, ..., word_base+127
    if word_base + 1 > limit {
        return 0;
    }
    (((limit - word_base - 1) / 2) + 1).min(64)
}

/// Plain odd-only sieve used for base primes.
fn simple_odd_primes(limit: u64) -> Vec<u64> {
    if limit < 3 {
        return Vec::new();
    }
    let n = ((limit - 1) / 2) as usize; // odd numbers 3,5,..,limit
    let mut comp = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 0..n {
        let p = 2 * i as u64 + 3;
        if p > limit {
            break;
        }
        if !comp[i] {
            primes.push(p);
            let mut m = p * p;
            while m <= limit {
                comp[((m - 3) / 2) as usize] = true;
                m += 2 * p;
            }
        }
    }
    primes
}

pub(crate) fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r.checked_mul(r).is_none_or(|s| s > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|s| s <= n) {
        r += 1;
    }
    r
}

/// Linear-sieve tables: smallest prime factor, Moebius, divisor count and
/// prime-power base (nonzero exactly on prime powers `p^a`, storing `p`).
pub struct ArithTables {
    limit: u64,
    spf: Vec<u32>,
    mu: Vec<i8>,
    d: Vec<u32>,
    pp: Vec<u32>,
}

impl ArithTables {
    pub fn build(limit: u64) -> Result<Self> {
        if limit < 1 {
            return Err(Error::Domain("arith tables need limit >= 1".into()));
        }
        if limit > u32::MAX as u64 {
            return Err(Error::SieveCapacity {
                requested: limit,
                cap: u32::MAX as u64,
            });
        }
        let n = limit as usize;
        let mut spf = vec![0u32; n + 1];
        let mut mu = vec![0i8; n + 1];
        let mut d = vec![0u32; n + 1];
        let mut pp = vec![0u32; n + 1];
        // exponent of spf(i) in i, used for the divisor-count recurrence
        let mut cnt = vec![0u8; n + 1];
        let mut primes: Vec<u32> = Vec::new();
        if n >= 1 {
            mu[1] = 1;
            d[1] = 1;
        }
        for i in 2..=n {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u32);
                mu[i] = -1;
                d[i] = 2;
                cnt[i] = 1;
                pp[i] = i as u32;
            }
            for &p in &primes {
                let p_us = p as usize;
                if p > spf[i] || p_us * i > n {
                    break;
                }
                let ip = p_us * i;
                spf[ip] = p;
                if p == spf[i] {
                    mu[ip] = 0;
                    cnt[ip] = cnt[i] + 1;
                    d[ip] = d[i] / (cnt[i] as u32 + 1) * (cnt[i] as u32 + 2);
                    pp[ip] = if pp[i] == p { p } else { 0 };
                    break;
                } else {
                    mu[ip] = -mu[i];
                    cnt[ip] = 1;
                    d[ip] = 2 * d[i];
                    pp[ip] = 0;
                }
            }
        }
        Ok(Self {
            limit,
            spf,
            mu,
            d,
            pp,
        })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    fn check(&self, n: u64) -> Result<usize> {
        if n == 0 || n > self.limit {
            return Err(Error::TableRange {
                query: n,
                limit: self.limit,
            });
        }
        Ok(n as usize)
    }

    /// Moebius function.
    pub fn mu(&self, n: u64) -> Result<i8> {
        Ok(self.mu[self.check(n)?])
    }

    /// Divisor-count function `d(n)`.
    pub fn divisor_count(&self, n: u64) -> Result<u32> {
        Ok(self.d[self.check(n)?])
    }

    /// Smallest prime factor (`None` for `n = 1`).
    pub fn smallest_prime_factor(&self, n: u64) -> Result<Option<u64>> {
        let i = self.check(n)?;
        Ok((self.spf[i] != 0).then_some(self.spf[i] as u64))
    }

    /// `(p, a)` when `n = p^a` is a prime power, else `None`.
    pub fn prime_power_parts(&self, n: u64) -> Result<Option<(u64, u32)>> {
        let i = self.check(n)?;
        if self.pp[i] == 0 {
            return Ok(None);
        }
        let p = self.pp[i] as u64;
        let mut a = 0u32;
        let mut m = n;
        while m > 1 {
            m /= p;
            a += 1;
        }
        Ok(Some((p, a)))
    }

    /// Von Mangoldt function evaluated on demand: `log p` on `p^a`, else 0.
    pub fn lambda(&self, n: u64) -> Result<f64> {
        let i = self.check(n)?;
        Ok(if self.pp[i] == 0 {
            0.0
        } else {
            (self.pp[i] as f64).ln()
        })
    }

    /// Prime factorisation with ascending primes.
    pub fn factorize(&self, n: u64) -> Result<Vec<(u64, u32)>> {
        self.check(n)?;
        let mut m = n;
        let mut out: Vec<(u64, u32)> = Vec::new();
        while m > 1 {
            let p = self.spf[m as usize] as u64;
            let mut a = 0;
            while m % p == 0 {
                m /= p;
                a += 1;
            }
            out.push((p, a));
        }
        Ok(out)
    }

    /// All divisors of `n`, ascending.
    pub fn divisors(&self, n: u64) -> Result<Vec<u64>> {
        let factors = self.factorize(n)?;
        let mut out = vec![1u64];
        for (p, a) in factors {
            let prev = out.clone();
            let mut pk = 1u64;
            for _ in 0..a {
                pk *= p;
                out.extend(prev.iter().map(|v| v * pk));
            }
        }
        out.sort_unstable();
        Ok(out)
    }
}
