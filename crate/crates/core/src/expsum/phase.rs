//! Exact mod-1 reduction of phase terms.
//!
//! A term like `a * m^gamma` needs roughly `53 + log2(a * m^gamma)`
//! correct bits before reduction mod 1 leaves 53 meaningful ones; plain
//! doubles are ~10 bits short already near 2^50. Both factors here are
//! exact dyadic rationals — an `f64` is `±mant * 2^e`, a certified power
//! is `numerator * 2^-bits` — so the fractional part of the product is
//! computed on integers and rounded to `f64` exactly once.

use num::bigint::BigUint;
use num::traits::{One, ToPrimitive, Zero};

use crate::exact::{CertifiedFrac, MIN_FRAC_BITS};

/// Decomposes a finite `f64` into `(mant, exp, negative)` with
/// `value = ±mant * 2^exp` exactly.
fn decode(a: f64) -> (u64, i64, bool) {
    let bits = a.to_bits();
    let negative = bits >> 63 == 1;
    let biased = ((bits >> 52) & 0x7ff) as i64;
    let mant = bits & ((1u64 << 52) - 1);
    if biased == 0 {
        (mant, -1074, negative) // subnormal (or zero)
    } else {
        (mant | (1 << 52), biased - 1075, negative)
    }
}

/// `f / 2^d` rounded to `f64`, valid for any magnitudes.
fn shifted_to_f64(f: &BigUint, d: i64) -> f64 {
    if f.is_zero() {
        return 0.0;
    }
    let nb = f.bits() as i64;
    if nb <= 53 {
        f.to_f64().expect("fits") * 2f64.powi((-d) as i32)
    } else {
        let top = (f >> ((nb - 53) as u64)).to_f64().expect("53 bits fit");
        top * 2f64.powi((nb - 53 - d) as i32)
    }
}

/// Fractional part of `a * v` for a certified fixed-point `v`, in
/// `[0, 1)`. Exact on the certificate's dyadic value; the only rounding
/// is the final conversion to `f64`.
pub fn frac_mul_pow(a: f64, v: &CertifiedFrac) -> f64 {
    debug_assert!(a.is_finite());
    let (mant, exp, negative) = decode(a);
    if mant == 0 {
        return 0.0;
    }
    // a * v = mant * numerator * 2^(exp - bits); d fractional bits remain.
    let d = v.bits() as i64 - exp;
    if d <= 0 {
        return 0.0; // the product is an integer
    }
    let p = v.numerator() * mant;
    let mask = (BigUint::one() << d as u64) - BigUint::one();
    let mut f = p & mask;
    if f.is_zero() {
        return 0.0;
    }
    if negative {
        f = (BigUint::one() << d as u64) - f;
    }
    shifted_to_f64(&f, d)
}

/// Fractional part of `a * m` for an integer `m`, in `[0, 1)`.
pub fn frac_mul_int(a: f64, m: u64) -> f64 {
    frac_mul_pow(a, &CertifiedFrac::exact_int(m, MIN_FRAC_BITS))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{frac_pow, RationalExponent};
    use num::rational::BigRational;
    use num::BigInt;
    use proptest::prelude::*;

    fn exact_frac_oracle(a: f64, m: u64) -> f64 {
        // BigRational model: frac(a * m) with a as an exact rational.
        let ar = BigRational::from_float(a).unwrap();
        let prod = ar * BigRational::from_integer(BigInt::from(m));
        let fr = &prod - prod.floor();
        let num = fr.numer().to_f64().unwrap();
        let den = fr.denom().to_f64().unwrap();
        num / den
    }

    #[test]
    fn dyadic_cases_are_exact() {
        assert_eq!(frac_mul_int(0.25, 7), 0.75);
        assert_eq!(frac_mul_int(0.5, 4), 0.0);
        assert_eq!(frac_mul_int(1.0, 123_456), 0.0);
        assert_eq!(frac_mul_int(-0.25, 7), 0.25);
        assert_eq!(frac_mul_int(0.0, 99), 0.0);
        // 2^-60 * 2^60 = 1 exactly
        assert_eq!(frac_mul_int(2f64.powi(-60), 1u64 << 60), 0.0);
    }

    #[test]
    fn identity_multiplier_returns_the_fraction_itself() {
        let g = RationalExponent::new(9, 10).unwrap();
        let v = frac_pow(999_983, &g, 96).unwrap();
        let direct = v.frac_f64();
        let via_phase = frac_mul_pow(1.0, &v);
        assert!((direct - via_phase).abs() < 2f64.powi(-50));
    }

    #[test]
    fn negation_complements_the_fraction() {
        let g = RationalExponent::new(7, 10).unwrap();
        let v = frac_pow(12_345, &g, 96).unwrap();
        let plus = frac_mul_pow(3.5, &v);
        let minus = frac_mul_pow(-3.5, &v);
        assert!((plus + minus - 1.0).abs() < 2f64.powi(-50));
    }

    proptest! {
        #[test]
        fn matches_rational_oracle_on_integers(
            mant in 1u64..(1u64 << 50),
            shift in 0i32..40,
            m in 1u64..1_000_000_000u64,
            neg in proptest::bool::ANY,
        ) {
            let a = {
                let base = mant as f64 * 2f64.powi(-shift - 20);
                if neg { -base } else { base }
            };
            let got = frac_mul_int(a, m);
            let want = exact_frac_oracle(a, m);
            // both are exact computations of the same rational; the only
            // slack is the final rounding of each representation
            prop_assert!((got - want).abs() < 1e-12 || (got - want).abs() > 1.0 - 1e-12);
            prop_assert!((0.0..1.0).contains(&got));
        }

        #[test]
        fn fraction_always_in_unit_interval(
            a in -1e9f64..1e9f64,
            n in 2u64..100_000u64,
        ) {
            let g = RationalExponent::new(9, 10).unwrap();
            let v = frac_pow(n, &g, 96).unwrap();
            let f = frac_mul_pow(a, &v);
            prop_assert!((0.0..1.0).contains(&f));
        }
    }
}
