//! Number types the engines run on.
//!
//! `f64` is the working type. [`Dyadic`] is an exact binary rational
//! (`mantissa * 2^exp`); every finite `f64`, and therefore every sampled
//! weight, is one, so runs in this mode involve no rounding at all.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub trait Scalar: Clone + PartialEq + PartialOrd + fmt::Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    /// Conversion from `f64`; exact for every exact type in this crate.
    fn from_f64(x: f64) -> Self;
    fn to_f64(&self) -> f64;
    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;

    fn abs_diff_f64(&self, other: &Self) -> f64 {
        let d = self.minus(other).to_f64();
        d.abs()
    }
}

impl Scalar for f64 {
    #[inline]
    fn zero() -> Self {
        0.0
    }
    #[inline]
    fn one() -> Self {
        1.0
    }
    #[inline]
    fn from_f64(x: f64) -> Self {
        x
    }
    #[inline]
    fn to_f64(&self) -> f64 {
        *self
    }
    #[inline]
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    #[inline]
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    #[inline]
    fn times(&self, other: &Self) -> Self {
        self * other
    }
}

/// Exact value `mantissa * 2^exp`, kept normalized (odd mantissa, or zero
/// with `exp == 0`) so that structural equality is numeric equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mantissa: BigInt,
    exp: i64,
}

impl Dyadic {
    pub fn new(mantissa: BigInt, exp: i64) -> Self {
        let mut d = Dyadic { mantissa, exp };
        d.normalize();
        d
    }

    pub fn from_int(v: i64) -> Self {
        Dyadic::new(BigInt::from(v), 0)
    }

    fn normalize(&mut self) {
        if self.mantissa.is_zero() {
            self.exp = 0;
            return;
        }
        if let Some(tz) = self.mantissa.trailing_zeros() {
            if tz > 0 {
                self.mantissa >>= tz;
                self.exp += tz as i64;
            }
        }
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn is_negative(&self) -> bool {
        self.mantissa.is_negative()
    }

    /// Brings both operands to the smaller exponent.
    fn aligned(&self, other: &Self) -> (BigInt, BigInt, i64) {
        match self.exp.cmp(&other.exp) {
            Ordering::Equal => (self.mantissa.clone(), other.mantissa.clone(), self.exp),
            Ordering::Less => {
                let shift = (other.exp - self.exp) as usize;
                (self.mantissa.clone(), &other.mantissa << shift, self.exp)
            }
            Ordering::Greater => {
                let shift = (self.exp - other.exp) as usize;
                (&self.mantissa << shift, other.mantissa.clone(), other.exp)
            }
        }
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*2^{}", self.mantissa, self.exp)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b, _) = self.aligned(other);
        a.cmp(&b)
    }
}

impl Scalar for Dyadic {
    fn zero() -> Self {
        Dyadic { mantissa: BigInt::zero(), exp: 0 }
    }

    fn one() -> Self {
        Dyadic { mantissa: BigInt::one(), exp: 0 }
    }

    /// Panics on NaN or infinity.
    fn from_f64(x: f64) -> Self {
        assert!(x.is_finite(), "cannot represent {x} exactly");
        if x == 0.0 {
            return Self::zero();
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 0 { 1i64 } else { -1i64 };
        let raw_exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (mant, exp) = if raw_exp == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), raw_exp - 1075)
        };
        Dyadic::new(BigInt::from(mant) * sign, exp)
    }

    fn to_f64(&self) -> f64 {
        if self.mantissa.is_zero() {
            return 0.0;
        }
        let magnitude = self.mantissa.magnitude();
        let bits = magnitude.bits() as i64;
        let (top, exp) = if bits <= 64 {
            (magnitude.to_u64().unwrap_or(0), self.exp)
        } else {
            // Keep 64 leading bits plus a sticky bit so the final rounding to
            // 53 bits is correct.
            let shift = (bits - 64) as u64;
            let top = (magnitude >> shift).to_u64().unwrap_or(0);
            let sticky = magnitude.trailing_zeros().unwrap_or(0) < shift;
            (top | sticky as u64, self.exp + shift as i64)
        };
        let value = ldexp(top as f64, exp);
        if self.mantissa.is_negative() {
            -value
        } else {
            value
        }
    }

    fn plus(&self, other: &Self) -> Self {
        let (a, b, exp) = self.aligned(other);
        Dyadic::new(a + b, exp)
    }

    fn minus(&self, other: &Self) -> Self {
        let (a, b, exp) = self.aligned(other);
        Dyadic::new(a - b, exp)
    }

    fn times(&self, other: &Self) -> Self {
        Dyadic::new(&self.mantissa * &other.mantissa, self.exp + other.exp)
    }
}

fn ldexp(mut x: f64, mut exp: i64) -> f64 {
    while exp > 1000 {
        x *= 2f64.powi(1000);
        exp -= 1000;
    }
    while exp < -1000 {
        x *= 2f64.powi(-1000);
        exp += 1000;
    }
    x * 2f64.powi(exp as i32)
}
