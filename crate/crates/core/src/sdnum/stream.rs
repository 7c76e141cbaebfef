use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::{Dyadic, SdError, SignedDigit};

/// An MSDF digit sequence with a power-of-two scale.
///
/// `digits[0]` has weight `2^-1`. The stream's value is
/// `(sum d_i 2^-i) * 2^scale_exp`; the unscaled sum (the raw value) lies in
/// `(-1, 1)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DigitStream {
    digits: Vec<SignedDigit>,
    scale_exp: i32,
}

impl DigitStream {
    pub fn new(digits: Vec<SignedDigit>, scale_exp: i32) -> Self {
        Self { digits, scale_exp }
    }

    pub fn zeros(len: usize) -> Self {
        Self::new(vec![SignedDigit::ZERO; len], 0)
    }

    /// Builds a stream from integer digit values in `{-1, 0, 1}`.
    pub fn from_values(values: &[i8], scale_exp: i32) -> Result<Self, SdError> {
        let digits = values.iter().map(|&v| SignedDigit::from_value(v)).collect::<Result<Vec<_>, _>>()?;
        Ok(Self::new(digits, scale_exp))
    }

    pub fn digits(&self) -> &[SignedDigit] {
        &self.digits
    }

    pub fn values(&self) -> Vec<i8> {
        self.digits.iter().map(|d| d.value()).collect()
    }

    pub fn scale_exp(&self) -> i32 {
        self.scale_exp
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// Digit at zero-based position `i`; positions past the end read as 0.
    pub fn digit_or_zero(&self, i: usize) -> SignedDigit {
        self.digits.get(i).copied().unwrap_or(SignedDigit::ZERO)
    }

    pub fn push(&mut self, d: SignedDigit) {
        self.digits.push(d);
    }

    /// The first `j` digits (or the whole stream if shorter), same scale.
    pub fn prefix(&self, j: usize) -> Self {
        Self::new(self.digits[..j.min(self.len())].to_vec(), self.scale_exp)
    }

    /// `sum d_i 2^-i`, without the scale factor.
    pub fn raw_value(&self) -> Dyadic {
        let n = self.digits.len() as u32;
        let mut acc = BigInt::zero();
        for d in &self.digits {
            acc <<= 1;
            acc += d.value();
        }
        Dyadic::new(acc, n)
    }

    /// The exact value `raw_value * 2^scale_exp`.
    pub fn value(&self) -> Dyadic {
        self.raw_value().mul_pow2(self.scale_exp)
    }

    /// Non-redundant stream with `n_digits` digits and value `v`.
    ///
    /// Requires `|v| < 1` and `v` a multiple of `2^-n_digits`. Negative
    /// values are emitted as the negated digits of `|v|`.
    pub fn from_dyadic(v: &Dyadic, n_digits: u32) -> Result<Self, SdError> {
        if v.abs() >= Dyadic::from_int(1) {
            return Err(SdError::OutOfRange(v.to_string()));
        }
        let scaled = v
            .scaled_numer(n_digits)
            .ok_or_else(|| SdError::NotRepresentable { value: v.to_string(), digits: n_digits })?;
        let negative = scaled.is_negative();
        let mag = scaled.abs();
        let digits = (0..n_digits)
            .rev()
            .map(|bit| {
                if mag.bit(u64::from(bit)) {
                    if negative {
                        SignedDigit::NEG_ONE
                    } else {
                        SignedDigit::ONE
                    }
                } else {
                    SignedDigit::ZERO
                }
            })
            .collect();
        Ok(Self::new(digits, 0))
    }
}

impl FromIterator<SignedDigit> for DigitStream {
    fn from_iter<I: IntoIterator<Item = SignedDigit>>(iter: I) -> Self {
        Self::new(iter.into_iter().collect(), 0)
    }
}
