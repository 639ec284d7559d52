//! Exact rational-exponent arithmetic.
//!
//! Everything here reduces to one primitive: the floor of `n^(u/v)` for a
//! positive integer `n` and a reduced fraction `u/v` in `(1/2, 1]`. The
//! floor is obtained from the exact integer `v`-th root of `n^u`, so no
//! floating rounding can ever flip a membership or floor decision.
//! Fractional parts are carried in fixed point (`frac / 2^bits`) together
//! with a certified error radius measured in units of the last place.

use num::bigint::BigUint;
use num::rational::BigRational;
use num::traits::{One, ToPrimitive, Zero};
use num::BigInt;
use std::fmt;
use std::str::FromStr;

use crate::{Error, Result};

mod bigfloat;
use bigfloat::DirFloat;

/// Smallest fractional-bit budget accepted by the public constructors.
pub const MIN_FRAC_BITS: u32 = 96;
/// Hard cap for precision escalation. Reaching it means the value sits
/// closer to an integer than `2^-4096`, which for the rational powers
/// handled here implies a bug rather than a hard instance.
pub const MAX_FRAC_BITS: u32 = 4096;
/// Capacity guard for exponent denominators (keeps `BigUint` powers and
/// root extraction inside a sane budget).
pub const MAX_EXPONENT_DEN: u64 = 1 << 20;

/// A reduced rational exponent `num/den` with `1/2 < num/den <= 1`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct RationalExponent {
    num: u64,
    den: u64,
}

impl RationalExponent {
    /// Builds a reduced exponent, rejecting values outside `(1/2, 1]`.
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if num == 0 || den == 0 {
            return Err(Error::MalformedRational(format!(
                "{num}/{den}: zero numerator or denominator"
            )));
        }
        let g = gcd(num, den);
        let (num, den) = (num / g, den / g);
        if den > MAX_EXPONENT_DEN {
            return Err(Error::MalformedRational(format!(
                "{num}/{den}: denominator exceeds capacity {MAX_EXPONENT_DEN}"
            )));
        }
        let in_window = (num as u128) * 2 > den as u128 && num <= den;
        if !in_window {
            return Err(Error::ExponentRange { num, den });
        }
        Ok(Self { num, den })
    }

    /// The degenerate exponent `1`.
    pub const fn one() -> Self {
        Self { num: 1, den: 1 }
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn is_one(&self) -> bool {
        self.num == self.den
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Exact value as a big rational.
    pub fn to_rational(&self) -> BigRational {
        BigRational::new(BigInt::from(self.num), BigInt::from(self.den))
    }

    /// Exact deficit `1 - num/den`.
    pub fn deficit(&self) -> BigRational {
        BigRational::one() - self.to_rational()
    }
}

impl PartialOrd for RationalExponent {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for RationalExponent {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        let lhs = self.num as u128 * other.den as u128;
        let rhs = other.num as u128 * self.den as u128;
        lhs.cmp(&rhs)
    }
}

impl fmt::Display for RationalExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            write!(f, "1")
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl FromStr for RationalExponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parse_part = |part: &str| -> Result<u64> {
            part.trim()
                .parse::<u64>()
                .map_err(|_| Error::MalformedRational(format!("cannot parse `{s}`")))
        };
        match s.split_once('/') {
            Some((n, d)) => Self::new(parse_part(n)?, parse_part(d)?),
            None => Self::new(parse_part(s)?, 1),
        }
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `floor(n^gamma)` computed exactly: the integer `den`-th root of `n^num`.
///
/// Monotone non-decreasing in `n`; equals `n` when `gamma = 1`.
pub fn floor_pow(n: u64, gamma: &RationalExponent) -> u64 {
    if n <= 1 || gamma.is_one() {
        return n;
    }
    let x = BigUint::from(n).pow(gamma.num as u32);
    let r = x.nth_root(gamma.den as u32);
    r.to_u64().expect("floor(n^gamma) <= n fits in u64")
}

/// `ceil(n^gamma)`, exact. Equals `floor_pow(n, gamma)` plus one except
/// when `n^gamma` is an integer, which for a reduced exponent happens
/// exactly when `n` is a perfect `den`-th power.
pub fn ceil_pow(n: u64, gamma: &RationalExponent) -> u64 {
    if n <= 1 || gamma.is_one() {
        return n;
    }
    let fl = floor_pow(n, gamma);
    if perfect_root(n, gamma.den).is_some() {
        fl
    } else {
        fl + 1
    }
}

/// Returns `w` with `w^k == n`, if such an integer exists.
pub fn perfect_root(n: u64, k: u64) -> Option<u64> {
    if k == 1 {
        return Some(n);
    }
    if n <= 1 {
        return Some(n);
    }
    if k >= 64 {
        // 2^64 > n for every n we accept, so only 0/1 have such roots.
        return None;
    }
    let guess = (n as f64).powf(1.0 / k as f64).round() as u64;
    for w in guess.saturating_sub(1)..=guess + 1 {
        if let Some(p) = checked_pow_u128(w, k) {
            if p == n as u128 {
                return Some(w);
            }
        }
    }
    None
}

fn checked_pow_u128(base: u64, exp: u64) -> Option<u128> {
    let mut acc: u128 = 1;
    let mut b = base as u128;
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc.checked_mul(b)?;
        }
        e >>= 1;
        if e > 0 {
            b = b.checked_mul(b)?;
        }
    }
    Some(acc)
}

/// Membership test for the floor-power set with exponent `1/gamma`:
/// `m` is a member exactly when some integer lies in `[m^gamma, (m+1)^gamma)`,
/// i.e. when `ceil((m+1)^gamma) - ceil(m^gamma) >= 1`. Both ceilings are
/// exact, so the decision is exact. Every `m` is a member when `gamma = 1`.
pub fn is_ps_member(m: u64, gamma: &RationalExponent) -> bool {
    if gamma.is_one() {
        return true;
    }
    if m == 0 {
        return false;
    }
    ceil_pow(m + 1, gamma) > ceil_pow(m, gamma)
}

/// A nonnegative real carried as `int_part + frac/2^bits` together with a
/// certified error radius `err_ulp/2^bits`. The represented interval is
/// `[value - err, value + err]`; all public constructors keep
/// `err_ulp <= 4`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertifiedFrac {
    int_part: BigUint,
    frac: BigUint,
    bits: u32,
    err_ulp: u32,
}

impl CertifiedFrac {
    /// Wraps an exact integer (zero error radius).
    pub fn exact_int(n: impl Into<BigUint>, bits: u32) -> Self {
        Self {
            int_part: n.into(),
            frac: BigUint::zero(),
            bits,
            err_ulp: 0,
        }
    }

    pub(crate) fn from_parts(int_part: BigUint, frac: BigUint, bits: u32, err_ulp: u32) -> Self {
        debug_assert!(frac.bits() as u32 <= bits);
        Self {
            int_part,
            frac,
            bits,
            err_ulp,
        }
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn err_ulp(&self) -> u32 {
        self.err_ulp
    }

    pub fn int_part(&self) -> &BigUint {
        &self.int_part
    }

    /// Raw fixed-point fractional bits (value `frac / 2^bits`).
    pub fn frac_raw(&self) -> &BigUint {
        &self.frac
    }

    /// Full fixed-point numerator `int_part * 2^bits + frac`.
    pub fn numerator(&self) -> BigUint {
        (&self.int_part << self.bits) + &self.frac
    }

    /// Fractional part rounded to `f64`.
    pub fn frac_f64(&self) -> f64 {
        big_ratio_to_f64(&self.frac, self.bits)
    }

    /// Whole value rounded to `f64`.
    pub fn to_f64(&self) -> f64 {
        self.int_part.to_f64().unwrap_or(f64::INFINITY) + self.frac_f64()
    }

    fn floor_is_ambiguous(&self) -> bool {
        if self.err_ulp == 0 {
            return false;
        }
        let err = BigUint::from(self.err_ulp);
        if self.frac < err {
            return true;
        }
        let ceiling = BigUint::one() << self.bits;
        &self.frac + &err > ceiling
    }

    /// Sawtooth `psi(t) = t - floor(t) - 1/2` of the represented value.
    ///
    /// Fails with [`Error::AmbiguousFloor`] when the certified interval
    /// straddles an integer; callers escalate `bits` and retry.
    pub fn psi(&self) -> Result<f64> {
        if self.floor_is_ambiguous() {
            return Err(Error::AmbiguousFloor { bits: self.bits });
        }
        Ok(self.frac_f64() - 0.5)
    }

    /// Sawtooth of the negated value, `psi(-t)`. For non-integer `t` this
    /// is `1/2 - frac(t)`; for exact integers it is `-1/2`.
    pub fn psi_neg(&self) -> Result<f64> {
        if self.floor_is_ambiguous() {
            return Err(Error::AmbiguousFloor { bits: self.bits });
        }
        if self.frac.is_zero() {
            // err_ulp == 0 here (otherwise ambiguous), so -t is an integer.
            Ok(-0.5)
        } else {
            Ok(0.5 - self.frac_f64())
        }
    }
}

fn big_ratio_to_f64(frac: &BigUint, bits: u32) -> f64 {
    if bits <= 64 {
        let v = frac.to_u64().expect("frac < 2^bits <= 2^64");
        return v as f64 / 2f64.powi(bits as i32);
    }
    let top = (frac >> (bits - 64)).to_u64().expect("top word fits");
    top as f64 / 2f64.powi(64)
}

/// `n^gamma` in certified fixed point with `bits >= 96` fractional bits.
///
/// The full numerator `floor(n^gamma * 2^bits)` is the exact integer
/// `den`-th root of `n^num * 2^(den*bits)`, so the error radius is at most
/// one unit in the last place and the integer part agrees with
/// [`floor_pow`] exactly. Perfect powers are detected and returned with a
/// zero radius.
pub fn frac_pow(n: u64, gamma: &RationalExponent, bits: u32) -> Result<CertifiedFrac> {
    if !(MIN_FRAC_BITS..=MAX_FRAC_BITS).contains(&bits) {
        return Err(Error::PrecisionRange {
            bits,
            min: MIN_FRAC_BITS,
            max: MAX_FRAC_BITS,
        });
    }
    Ok(frac_pow_unchecked(n, gamma, bits))
}

/// Same as [`frac_pow`] without the precision-floor guard; used by tests
/// that exercise the escalation path with deliberately tiny budgets.
pub(crate) fn frac_pow_unchecked(n: u64, gamma: &RationalExponent, bits: u32) -> CertifiedFrac {
    if n <= 1 || gamma.is_one() {
        return CertifiedFrac::exact_int(n, bits);
    }
    if let Some(w) = perfect_root(n, gamma.den) {
        // gcd(num, den) = 1, so n^num is a perfect den-th power iff n is.
        let int = BigUint::from(w).pow(gamma.num as u32);
        return CertifiedFrac::exact_int(int, bits);
    }
    let r = if gamma.den > FLOAT_ROUTE_MIN_DEN {
        certified_floor_scaled(n, gamma, bits)
    } else {
        scaled_root(n, gamma, bits)
    };
    let int_part = &r >> bits;
    let frac = r - (&int_part << bits);
    CertifiedFrac::from_parts(int_part, frac, bits, 1)
}

/// Denominator threshold above which the scaled integer root becomes too
/// expensive (`den * bits` radicand bits) and the certified float route
/// takes over.
const FLOAT_ROUTE_MIN_DEN: u64 = 64;

/// `floor(n^gamma * 2^bits)` via the exact integer `den`-th root of
/// `n^num * 2^(den*bits)`.
fn scaled_root(n: u64, gamma: &RationalExponent, bits: u32) -> BigUint {
    let x = BigUint::from(n).pow(gamma.num as u32) << (gamma.den * bits as u64);
    x.nth_root(gamma.den as u32)
}

/// `floor(n^gamma * 2^bits)` for large denominators.
///
/// A plain Newton iteration in directed-rounding big floats proposes a
/// candidate `R`; the placement `theta * 2^bits` in `[R, R+1)` is then
/// *proven* by two one-sided power comparisons (`(R 2^-b)^v <= n^u` and
/// `((R+1) 2^-b)^v > n^u`), so the result never depends on the accuracy
/// of the iteration itself. If certification fails the working precision
/// doubles; as a last resort the exact scaled root decides.
fn certified_floor_scaled(n: u64, gamma: &RationalExponent, bits: u32) -> BigUint {
    let (u, v) = (gamma.num, gamma.den);
    let mut w = bits + 64;
    let cap = bits + 2048;
    loop {
        if let Some(r) = float_floor_candidate(n, u, v, bits, w) {
            return r;
        }
        if w >= cap {
            return scaled_root(n, gamma, bits);
        }
        w *= 2;
    }
}

fn float_floor_candidate(n: u64, u: u64, v: u64, bits: u32, w: u32) -> Option<BigUint> {
    let base = DirFloat::from_u64(n);
    let a_lo = base.pow(u, w, false);
    let a_hi = base.pow(u, w, true);

    // Newton for y = (n^u)^(1/v); seed from f64, midpoint rounding.
    let mut y = DirFloat::from_f64((n as f64).powf(u as f64 / v as f64));
    let v_minus_one = DirFloat::from_u64(v - 1);
    let v_den = DirFloat::from_u64(v);
    // Per step the correct-bit count b goes to 2b - log2(v); start at a
    // conservative 40 and demand bits + 46 with one extra step of margin.
    let needed = bits as f64 + 46.0;
    let lg_v = (v as f64).log2();
    let mut correct = 40.0;
    let mut iters = 1u32;
    for _ in 0..64 {
        if correct >= needed {
            break;
        }
        correct = 2.0 * correct - lg_v;
        iters += 1;
    }
    for _ in 0..iters {
        let t = y.pow(v, w, false);
        let q = a_lo.div(&t, w, false);
        let s = q.add(&v_minus_one, w, false);
        y = y.mul(&s, w, false).div(&v_den, w, false);
    }

    let r = y.floor_scaled(bits as i64);
    let one = BigUint::one();
    let mut candidates = vec![r.clone(), &r + &one];
    if r > one {
        candidates.push(&r - &one);
    }
    candidates
        .into_iter()
        .find(|cand| certify_floor(cand, &a_lo, &a_hi, v, bits, w))
}

/// Proves `cand <= n^(u/v) * 2^bits < cand + 1` by directed power bounds.
fn certify_floor(cand: &BigUint, a_lo: &DirFloat, a_hi: &DirFloat, v: u64, bits: u32, w: u32) -> bool {
    use std::cmp::Ordering;
    let scale = -(bits as i64);
    // lower: (cand * 2^-bits)^v <= A, via an upper bound on the power
    if !cand.is_zero() {
        let x = DirFloat {
            mant: cand.clone(),
            exp: scale,
        };
        if x.pow(v, w, true).cmp_value(a_lo) == Ordering::Greater {
            return false;
        }
    }
    // upper: ((cand+1) * 2^-bits)^v > A, via a lower bound on the power
    let x1 = DirFloat {
        mant: cand + BigUint::one(),
        exp: scale,
    };
    x1.pow(v, w, false).cmp_value(a_hi) == Ordering::Greater
}

/// `psi(-(n^gamma))` with automatic precision escalation: starts at
/// `start_bits` and doubles until the floor is decided, failing with
/// [`Error::PrecisionCap`] only past [`MAX_FRAC_BITS`].
pub fn psi_neg_pow(n: u64, gamma: &RationalExponent, start_bits: u32) -> Result<f64> {
    let mut bits = start_bits.max(MIN_FRAC_BITS);
    loop {
        match frac_pow_unchecked(n, gamma, bits).psi_neg() {
            Ok(v) => return Ok(v),
            Err(Error::AmbiguousFloor { .. }) => {
                if bits >= MAX_FRAC_BITS {
                    return Err(Error::PrecisionCap { cap: MAX_FRAC_BITS });
                }
                bits = (bits * 2).min(MAX_FRAC_BITS);
            }
            Err(e) => return Err(e),
        }
    }
}

/// `psi(n^gamma)` with the same escalation strategy as [`psi_neg_pow`].
pub fn psi_pow(n: u64, gamma: &RationalExponent, start_bits: u32) -> Result<f64> {
    let mut bits = start_bits.max(MIN_FRAC_BITS);
    loop {
        match frac_pow_unchecked(n, gamma, bits).psi() {
            Ok(v) => return Ok(v),
            Err(Error::AmbiguousFloor { .. }) => {
                if bits >= MAX_FRAC_BITS {
                    return Err(Error::PrecisionCap { cap: MAX_FRAC_BITS });
                }
                bits = (bits * 2).min(MAX_FRAC_BITS);
            }
            Err(e) => return Err(e),
        }
    }
}

/// Sawtooth on plain floats, `psi(x) = x - floor(x) - 1/2`.
pub fn psi_f64(x: f64) -> f64 {
    x - x.floor() - 0.5
}

/// Exact parity helper used by escalation tests: certified value with the
/// floor forced ambiguous (fraction smaller than the error radius).
#[cfg(test)]
pub(crate) fn ambiguous_for_tests(bits: u32) -> CertifiedFrac {
    CertifiedFrac::from_parts(BigUint::from(3u32), BigUint::zero(), bits, 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gam(n: u64, d: u64) -> RationalExponent {
        RationalExponent::new(n, d).unwrap()
    }

    #[test]
    fn exponent_window_is_enforced() {
        assert!(RationalExponent::new(1, 2).is_err()); // exactly 1/2
        assert!(RationalExponent::new(1, 3).is_err());
        assert!(RationalExponent::new(3, 2).is_err()); // > 1
        assert!(RationalExponent::new(0, 5).is_err());
        assert!(RationalExponent::new(5, 0).is_err());
        assert!(RationalExponent::new(2, 3).is_ok());
        assert!(RationalExponent::new(1, 1).is_ok());
        // reduction happens before the window check
        let g = gam(4, 6);
        assert_eq!((g.num(), g.den()), (2, 3));
    }

    #[test]
    fn exponent_parse_display_round_trip() {
        for s in ["2/3", "7/10", "9/10", "19/20", "1", "49/50"] {
            let g: RationalExponent = s.parse().unwrap();
            assert_eq!(g.to_string(), s);
        }
        assert!("0/3".parse::<RationalExponent>().is_err());
        assert!("abc".parse::<RationalExponent>().is_err());
        assert!("1/2".parse::<RationalExponent>().is_err());
    }

    #[test]
    fn floor_pow_matches_hand_cases() {
        // floor(2^(2/3)) = floor(cbrt 4) = 1
        assert_eq!(floor_pow(2, &gam(2, 3)), 1);
        // perfect cube: floor(8^(2/3)) = 4
        assert_eq!(floor_pow(8, &gam(2, 3)), 4);
        // gamma = 1 is the identity
        for n in [0u64, 1, 2, 17, 1_000_000] {
            assert_eq!(floor_pow(n, &RationalExponent::one()), n);
        }
    }

    #[test]
    fn floor_pow_satisfies_the_root_contract() {
        // Independent check straight from the definition: r^den <= n^num
        // and (r+1)^den > n^num, using only big-integer powers.
        let gammas = [gam(2, 3), gam(7, 10), gam(9, 10), gam(19, 20), gam(49, 50)];
        for g in &gammas {
            for n in (1u64..2000).chain([10_000, 123_456, 999_983, 1_000_000]) {
                let r = floor_pow(n, g);
                let x = BigUint::from(n).pow(g.num() as u32);
                let lo = BigUint::from(r).pow(g.den() as u32);
                let hi = BigUint::from(r + 1).pow(g.den() as u32);
                assert!(lo <= x, "r^v > n^u for n={n} gamma={g}");
                assert!(hi > x, "(r+1)^v <= n^u for n={n} gamma={g}");
            }
        }
    }

    #[test]
    fn ceil_pow_handles_exact_powers() {
        let g = gam(2, 3);
        assert_eq!(ceil_pow(8, &g), 4); // 8^(2/3) = 4 exactly
        assert_eq!(ceil_pow(9, &g), 5); // 9^(2/3) = 4.326...
        assert_eq!(ceil_pow(2, &g), 2);
        assert_eq!(ceil_pow(1, &g), 1);
    }

    #[test]
    fn membership_matches_forward_enumeration() {
        // Oracle: enumerate floor(n^(1/gamma)) directly and compare sets.
        let x = 10_000u64;
        for g in [gam(2, 3), gam(7, 10), gam(9, 10)] {
            let mut oracle = vec![false; (x + 1) as usize];
            let mut n = 1u64;
            loop {
                // floor(n^(den/num)) = floor((n^den)^(1/num))
                let v = BigUint::from(n)
                    .pow(g.den() as u32)
                    .nth_root(g.num() as u32)
                    .to_u64()
                    .unwrap();
                if v > x {
                    break;
                }
                oracle[v as usize] = true;
                n += 1;
            }
            for m in 1..=x {
                assert_eq!(
                    is_ps_member(m, &g),
                    oracle[m as usize],
                    "membership mismatch at m={m}, gamma={g}"
                );
            }
        }
    }

    #[test]
    fn membership_small_prefix_for_two_thirds() {
        // floor(n^(3/2)) for n = 1.. starts 1, 2, 5, 8, 11, ...
        let g = gam(2, 3);
        let members: Vec<u64> = (1..=10).filter(|&m| is_ps_member(m, &g)).collect();
        assert_eq!(members, vec![1, 2, 5, 8]);
        assert!(!is_ps_member(3, &g));
        assert!(is_ps_member(5, &g));
    }

    #[test]
    fn membership_is_total_for_gamma_one() {
        for m in 1..200 {
            assert!(is_ps_member(m, &RationalExponent::one()));
        }
    }

    #[test]
    fn frac_pow_agrees_with_float_reference() {
        // 2^(2/3) = cbrt(4); f64 cbrt is far more accurate than the 1e-12
        // window used here, so it serves as an independent reference.
        let t = frac_pow(2, &gam(2, 3), 96).unwrap();
        assert!((t.to_f64() - 4f64.cbrt()).abs() < 1e-12);
        assert_eq!(t.int_part().to_u64().unwrap(), floor_pow(2, &gam(2, 3)));
        assert_eq!(t.err_ulp(), 1);
        let psi = t.psi().unwrap();
        assert!((psi - (4f64.cbrt() - 1.0 - 0.5)).abs() < 1e-12);
    }

    #[test]
    fn frac_pow_detects_exact_powers() {
        let t = frac_pow(8, &gam(2, 3), 96).unwrap();
        assert_eq!(t.err_ulp(), 0);
        assert!(t.frac_raw().is_zero());
        assert_eq!(t.int_part().to_u64().unwrap(), 4);
        assert_eq!(t.psi().unwrap(), -0.5);
        assert_eq!(t.psi_neg().unwrap(), -0.5);
    }

    #[test]
    fn frac_pow_rejects_out_of_range_precision() {
        assert!(matches!(
            frac_pow(2, &gam(2, 3), 32),
            Err(Error::PrecisionRange { .. })
        ));
        assert!(matches!(
            frac_pow(2, &gam(2, 3), MAX_FRAC_BITS + 1),
            Err(Error::PrecisionRange { .. })
        ));
    }

    #[test]
    fn psi_of_plain_integers() {
        let t = CertifiedFrac::exact_int(3u32, 96);
        assert_eq!(t.psi().unwrap(), -0.5);
        assert_eq!(t.psi_neg().unwrap(), -0.5);
    }

    #[test]
    fn ambiguous_floor_signals_and_escalation_resolves() {
        // A forced-ambiguous value must signal.
        let bad = ambiguous_for_tests(96);
        assert!(matches!(bad.psi(), Err(Error::AmbiguousFloor { .. })));
        assert!(matches!(bad.psi_neg(), Err(Error::AmbiguousFloor { .. })));

        // Natural near-integer case: (200^3 + 1)^(2/3) = 40000 + ~1/300.
        // At 8 fractional bits the fraction collapses to zero and the
        // floor is undecidable; doubling the budget resolves it.
        let n = 200u64 * 200 * 200 + 1;
        let g = gam(2, 3);
        let coarse = frac_pow_unchecked(n, &g, 8);
        assert!(matches!(coarse.psi_neg(), Err(Error::AmbiguousFloor { .. })));
        let v = psi_neg_pow(n, &g, 8).unwrap();
        // psi(-(40000 + eps)) = 1/2 - eps with eps ~ 2/(3*200^3) * 200^2
        let eps = (n as f64).powf(2.0 / 3.0) - 40_000.0;
        assert!((v - (0.5 - eps)).abs() < 1e-9, "v={v} eps={eps}");

        // positive convention on the same input: psi(40000 + eps) escalates
        // identically and lands at eps - 1/2
        let w = psi_pow(n, &g, 8).unwrap();
        assert!((w - (eps - 0.5)).abs() < 1e-9, "w={w} eps={eps}");
        // and at an exact power both conventions sit at -1/2
        assert_eq!(psi_pow(8, &g, 96).unwrap(), -0.5);
        assert_eq!(psi_neg_pow(8, &g, 96).unwrap(), -0.5);
    }

    #[test]
    fn precision_cap_reports_cleanly() {
        // frac = 0 with err = 1 at every budget can only come from a bug,
        // but the cap path must still be reachable and typed.
        let r = (|| -> Result<f64> {
            let mut bits = MAX_FRAC_BITS;
            loop {
                let t = CertifiedFrac::from_parts(
                    BigUint::from(3u32),
                    BigUint::zero(),
                    bits,
                    1,
                );
                match t.psi_neg() {
                    Ok(v) => return Ok(v),
                    Err(Error::AmbiguousFloor { .. }) if bits < MAX_FRAC_BITS => bits *= 2,
                    Err(Error::AmbiguousFloor { .. }) => {
                        return Err(Error::PrecisionCap { cap: MAX_FRAC_BITS })
                    }
                    Err(e) => return Err(e),
                }
            }
        })();
        assert!(matches!(r, Err(Error::PrecisionCap { .. })));
    }

    #[test]
    fn float_route_matches_exact_root_route() {
        // The certified-float path must place every floor on exactly the
        // same 2^-96 grid point as the scaled integer root.
        for (u, v) in [(2u64, 3u64), (7, 10), (19, 20), (49, 50), (53, 60)] {
            let g = gam(u, v);
            for n in [2u64, 3, 17, 101, 4096, 65_537, 999_983] {
                if perfect_root(n, g.den()).is_some() {
                    continue;
                }
                let exact = scaled_root(n, &g, 96);
                let float = certified_floor_scaled(n, &g, 96);
                assert_eq!(exact, float, "n={n} gamma={g}");
            }
        }
    }

    #[test]
    fn large_denominator_powers_agree_with_f64() {
        // Coarse independent reference: f64 powf is good to ~1e-11 at
        // these magnitudes, far looser than the certified radius.
        for (u, v) in [(599u64, 600u64), (299, 300), (199, 200)] {
            let g = gam(u, v);
            for n in [5u64, 1_000_003, 2_000_003] {
                let t = frac_pow(n, &g, 96).unwrap();
                let reference = (n as f64).powf(u as f64 / v as f64);
                assert!(
                    (t.to_f64() - reference).abs() / reference < 1e-11,
                    "n={n} gamma={g}"
                );
                assert_eq!(
                    t.int_part().to_u64().unwrap(),
                    floor_pow(n, &g),
                    "integer part must agree with floor_pow"
                );
            }
        }
    }

    #[test]
    fn perfect_root_edges() {
        assert_eq!(perfect_root(27, 3), Some(3));
        assert_eq!(perfect_root(28, 3), None);
        assert_eq!(perfect_root(1, 50), Some(1));
        assert_eq!(perfect_root(u64::MAX, 2), None);
        assert_eq!(perfect_root(1 << 62, 2), Some(1 << 31));
    }

    proptest! {
        #[test]
        fn floor_pow_contract_holds(n in 1u64..5_000_000, which in 0usize..6) {
            let pool = [gam(2, 3), gam(7, 10), gam(4, 5), gam(9, 10), gam(19, 20), gam(49, 50)];
            let g = pool[which];
            let r = floor_pow(n, &g);
            let x = BigUint::from(n).pow(g.num() as u32);
            prop_assert!(BigUint::from(r).pow(g.den() as u32) <= x);
            prop_assert!(BigUint::from(r + 1).pow(g.den() as u32) > x);
        }

        #[test]
        fn floor_pow_is_monotone(n in 1u64..1_000_000, which in 0usize..4) {
            let pool = [gam(2, 3), gam(7, 10), gam(9, 10), gam(19, 20)];
            let g = pool[which];
            prop_assert!(floor_pow(n, &g) <= floor_pow(n + 1, &g));
        }

        #[test]
        fn frac_pow_is_stable_under_precision_doubling(n in 2u64..2_000_000, which in 0usize..4) {
            let pool = [gam(2, 3), gam(7, 10), gam(9, 10), gam(19, 20)];
            let g = pool[which];
            let a = frac_pow(n, &g, 96).unwrap();
            let b = frac_pow(n, &g, 192).unwrap();
            prop_assert_eq!(a.int_part(), b.int_part());
            prop_assert!((a.frac_f64() - b.frac_f64()).abs() < 2f64.powi(-90));
        }

        #[test]
        fn psi_pairs_are_antisymmetric_off_integers(n in 2u64..2_000_000, which in 0usize..4) {
            let pool = [gam(2, 3), gam(7, 10), gam(9, 10), gam(19, 20)];
            let g = pool[which];
            let t = frac_pow(n, &g, 96).unwrap();
            if t.err_ulp() == 0 {
                // exact integer: both sides sit at -1/2
                prop_assert_eq!(t.psi().unwrap(), -0.5);
                prop_assert_eq!(t.psi_neg().unwrap(), -0.5);
            } else if let (Ok(p), Ok(q)) = (t.psi(), t.psi_neg()) {
                prop_assert!((p + q).abs() < 2f64.powi(-52));
            }
        }
    }
}
