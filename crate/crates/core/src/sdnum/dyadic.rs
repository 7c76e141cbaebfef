//! Exact rationals whose denominator is a power of two.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

/// An exact value `numer / 2^exp`.
///
/// Kept in lowest terms: either `exp == 0` or the numerator is odd, so the
/// derived equality and hashing are value equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    numer: BigInt,
    exp: u32,
}

impl Dyadic {
    pub fn zero() -> Self {
        Self { numer: BigInt::zero(), exp: 0 }
    }

    pub fn from_int(v: i64) -> Self {
        Self { numer: BigInt::from(v), exp: 0 }
    }

    /// `numer / 2^exp`, reduced.
    pub fn new(numer: impl Into<BigInt>, exp: u32) -> Self {
        let mut d = Self { numer: numer.into(), exp };
        d.reduce();
        d
    }

    fn reduce(&mut self) {
        if self.numer.is_zero() {
            self.exp = 0;
            return;
        }
        let tz = self.numer.trailing_zeros().unwrap_or(0);
        let shift = tz.min(u64::from(self.exp)) as u32;
        if shift > 0 {
            self.numer >>= shift;
            self.exp -= shift;
        }
    }

    pub fn numer(&self) -> &BigInt {
        &self.numer
    }

    /// Exponent of the (reduced) power-of-two denominator.
    pub fn denom_exp(&self) -> u32 {
        self.exp
    }

    /// `self * 2^k` for any integer `k`.
    pub fn mul_pow2(&self, k: i32) -> Self {
        if k >= 0 {
            let k = k as u32;
            let drop = k.min(self.exp);
            Self::new(&self.numer << (k - drop), self.exp - drop)
        } else {
            Self::new(self.numer.clone(), self.exp + k.unsigned_abs())
        }
    }

    pub fn is_zero(&self) -> bool {
        self.numer.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.numer.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.numer.is_positive()
    }

    pub fn abs(&self) -> Self {
        Self { numer: self.numer.abs(), exp: self.exp }
    }

    /// `max(self, 0)`.
    pub fn relu(&self) -> Self {
        if self.is_negative() {
            Self::zero()
        } else {
            self.clone()
        }
    }

    /// True when `self` is an integer multiple of `2^-bits`.
    pub fn fits_fraction_bits(&self, bits: u32) -> bool {
        self.exp <= bits
    }

    /// Numerator of `self` over the common denominator `2^bits`, if exact.
    pub fn scaled_numer(&self, bits: u32) -> Option<BigInt> {
        if self.exp <= bits {
            Some(&self.numer << (bits - self.exp))
        } else {
            None
        }
    }

    /// Lossy conversion for reporting only.
    pub fn to_f64(&self) -> f64 {
        let n = self.numer.to_f64().unwrap_or(f64::NAN);
        n / 2f64.powi(self.exp as i32)
    }

    fn aligned(&self, other: &Self) -> (BigInt, BigInt, u32) {
        let exp = self.exp.max(other.exp);
        (&self.numer << (exp - self.exp), &other.numer << (exp - other.exp), exp)
    }
}

impl Default for Dyadic {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<i64> for Dyadic {
    fn from(v: i64) -> Self {
        Self::from_int(v)
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b, _) = self.aligned(other);
        a.cmp(&b)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add<&Dyadic> for &Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &Dyadic) -> Dyadic {
        let (a, b, exp) = self.aligned(rhs);
        Dyadic::new(a + b, exp)
    }
}

impl Sub<&Dyadic> for &Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: &Dyadic) -> Dyadic {
        let (a, b, exp) = self.aligned(rhs);
        Dyadic::new(a - b, exp)
    }
}

impl Mul<&Dyadic> for &Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: &Dyadic) -> Dyadic {
        Dyadic::new(&self.numer * &rhs.numer, self.exp + rhs.exp)
    }
}

impl Neg for &Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic { numer: -&self.numer, exp: self.exp }
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<Dyadic> for Dyadic {
            type Output = Dyadic;
            fn $m(self, rhs: Dyadic) -> Dyadic { (&self).$m(&rhs) }
        }
        impl $tr<&Dyadic> for Dyadic {
            type Output = Dyadic;
            fn $m(self, rhs: &Dyadic) -> Dyadic { (&self).$m(rhs) }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        -&self
    }
}

impl std::iter::Sum for Dyadic {
    fn sum<I: Iterator<Item = Dyadic>>(iter: I) -> Self {
        iter.fold(Dyadic::zero(), |acc, x| acc + x)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.numer)
        } else {
            write!(f, "{}/{}", self.numer, BigInt::from(1) << self.exp)
        }
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dyadic({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduces_to_lowest_terms() {
        let d = Dyadic::new(12, 4);
        assert_eq!(d.numer(), &BigInt::from(3));
        assert_eq!(d.denom_exp(), 2);
        assert_eq!(Dyadic::new(0, 9).denom_exp(), 0);
        assert_eq!(Dyadic::new(8, 2), Dyadic::from_int(2));
    }

    #[test]
    fn arithmetic_and_order() {
        let half = Dyadic::new(1, 1);
        let quarter = Dyadic::new(1, 2);
        assert_eq!(&half - &quarter, quarter);
        assert_eq!(&half * &half, quarter);
        assert_eq!(&half + &quarter, Dyadic::new(3, 2));
        assert!(-&half < quarter);
        assert_eq!(half.mul_pow2(1), Dyadic::from_int(1));
        assert_eq!(Dyadic::new(5, 3).mul_pow2(2), Dyadic::new(5, 1));
        assert_eq!(Dyadic::from_int(3).mul_pow2(-2), Dyadic::new(3, 2));
    }

    #[test]
    fn display() {
        assert_eq!(Dyadic::new(5, 1).to_string(), "5/2");
        assert_eq!(Dyadic::new(-3, 3).to_string(), "-3/8");
        assert_eq!(Dyadic::from_int(7).to_string(), "7");
    }

    #[test]
    fn scaled_numer() {
        assert_eq!(Dyadic::new(3, 2).scaled_numer(4), Some(BigInt::from(12)));
        assert_eq!(Dyadic::new(1, 5).scaled_numer(4), None);
    }
}
