//! Directed-rounding big floats.
//!
//! A tiny positive-only floating type `mant * 2^exp` used to evaluate
//! `n^(u/v)` when the exponent denominator is too large for the direct
//! integer-root route (the scaled radicand grows like `v * bits`, so a
//! denominator of several hundred turns microseconds into milliseconds).
//!
//! Every operation takes an explicit mantissa budget `w` and a rounding
//! direction; rounding down always truncates, rounding up bumps the last
//! place whenever truncation dropped bits. Products, quotients and powers
//! of positive values are monotone in their operands, so chaining steps
//! with one direction produces a genuine one-sided bound — enough to
//! *prove* floor placements, not just estimate them.

use num::bigint::BigUint;
use num::traits::{One, Zero};
use std::cmp::Ordering;

#[derive(Clone, Debug)]
pub(crate) struct DirFloat {
    pub mant: BigUint,
    pub exp: i64,
}

impl DirFloat {
    pub fn from_u64(n: u64) -> Self {
        Self {
            mant: BigUint::from(n),
            exp: 0,
        }
    }

    /// Exact dyadic decomposition of a positive finite float.
    pub fn from_f64(x: f64) -> Self {
        assert!(x > 0.0 && x.is_finite());
        let bits = x.to_bits();
        let raw_exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (mant, exp) = if raw_exp == 0 {
            (frac, -1074) // subnormal
        } else {
            (frac | (1u64 << 52), raw_exp - 1075)
        };
        Self {
            mant: BigUint::from(mant),
            exp,
        }
    }

    #[cfg(test)]
    pub fn to_f64(&self) -> f64 {
        use num::traits::ToPrimitive;
        let nbits = self.mant.bits();
        if nbits == 0 {
            return 0.0;
        }
        let (top, shift) = if nbits > 53 {
            let s = nbits - 53;
            ((&self.mant >> s).to_u64().unwrap(), s as i64)
        } else {
            (self.mant.to_u64().unwrap(), 0)
        };
        top as f64 * 2f64.powi((self.exp + shift).clamp(i32::MIN as i64, i32::MAX as i64) as i32)
    }

    fn trunc(mut self, w: u32, up: bool) -> Self {
        let nbits = self.mant.bits();
        if nbits <= w as u64 {
            return self;
        }
        let s = nbits - w as u64;
        let dropped = {
            let mask = (BigUint::one() << s) - BigUint::one();
            !(&self.mant & mask).is_zero()
        };
        self.mant >>= s;
        self.exp += s as i64;
        if up && dropped {
            self.mant += BigUint::one();
            // a carry past w bits keeps the value exact, no re-truncation needed
        }
        self
    }

    pub fn mul(&self, other: &Self, w: u32, up: bool) -> Self {
        Self {
            mant: &self.mant * &other.mant,
            exp: self.exp + other.exp,
        }
        .trunc(w, up)
    }

    /// `self / other` to `w` mantissa bits with directed rounding.
    pub fn div(&self, other: &Self, w: u32, up: bool) -> Self {
        assert!(!other.mant.is_zero());
        let shift = w as u64 + 2;
        let num = &self.mant << shift;
        let mut q = &num / &other.mant;
        if up && (&q * &other.mant) != num {
            q += BigUint::one();
        }
        Self {
            mant: q,
            exp: self.exp - other.exp - shift as i64,
        }
        .trunc(w, up)
    }

    /// Sum of two positive values. When the exponent gap exceeds the
    /// budget the smaller operand degenerates to one unit in the last
    /// place (up) or is dropped (down), which keeps the bound one-sided.
    pub fn add(&self, other: &Self, w: u32, up: bool) -> Self {
        if self.mant.is_zero() {
            return other.clone().trunc(w, up);
        }
        if other.mant.is_zero() {
            return self.clone().trunc(w, up);
        }
        let (hi, lo) = if self.magnitude_exp() >= other.magnitude_exp() {
            (self, other)
        } else {
            (other, self)
        };
        let gap = hi.exp - lo.exp;
        if gap > (w as i64 + 8) + hi.mant.bits() as i64 {
            let base = hi.clone().trunc(w, up);
            if up {
                return Self {
                    mant: base.mant + BigUint::one(),
                    exp: base.exp,
                }
                .trunc(w, up);
            }
            return base;
        }
        // align to the smaller exponent (gap is bounded by the branch above)
        let mant = (&hi.mant << gap as u64) + &lo.mant;
        Self { mant, exp: lo.exp }.trunc(w, up)
    }

    /// `self^e` by binary exponentiation, every step rounded one way.
    pub fn pow(&self, e: u64, w: u32, up: bool) -> Self {
        assert!(e >= 1);
        let mut base = self.clone().trunc(w, up);
        let mut acc: Option<DirFloat> = None;
        let mut rem = e;
        while rem > 0 {
            if rem & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => a.mul(&base, w, up),
                });
            }
            rem >>= 1;
            if rem > 0 {
                base = base.mul(&base, w, up);
            }
        }
        acc.unwrap()
    }

    /// Exact comparison of represented values.
    pub fn cmp_value(&self, other: &Self) -> Ordering {
        if self.mant.is_zero() || other.mant.is_zero() {
            return self.mant.cmp(&other.mant);
        }
        let ma = self.magnitude_exp();
        let mb = other.magnitude_exp();
        if ma != mb {
            return ma.cmp(&mb);
        }
        if self.exp >= other.exp {
            (&self.mant << (self.exp - other.exp) as u64).cmp(&other.mant)
        } else {
            self.mant.cmp(&(&other.mant << (other.exp - self.exp) as u64))
        }
    }

    /// `floor(value * 2^scale)`.
    pub fn floor_scaled(&self, scale: i64) -> BigUint {
        let e = self.exp + scale;
        if e >= 0 {
            &self.mant << e as u64
        } else {
            &self.mant >> (-e) as u64
        }
    }

    /// Exponent of the leading bit (position of the value's magnitude).
    fn magnitude_exp(&self) -> i64 {
        self.exp + self.mant.bits() as i64
    }
}
