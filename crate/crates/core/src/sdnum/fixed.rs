use serde::{Deserialize, Serialize};

use super::{DigitStream, Dyadic, SdError, SignedDigit};

/// Fractional bits of a [`Fixed8`].
pub const FIXED8_FRAC_BITS: u32 = 7;
/// Fractional bits of a [`Pixel`].
pub const PIXEL_FRAC_BITS: u32 = 8;

/// How a conventional operand is turned into a digit stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StreamMode {
    /// Magnitude bits MSB-first as digits in `{0, 1}`; operand must be non-negative.
    NonnegBits,
    /// Two's-complement recoding: the sign bit becomes a leading `-1` digit.
    SignedDigit,
}

/// 8-bit two's-complement fraction, value `raw / 2^7` in `[-1, 1 - 2^-7]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Fixed8(i8);

impl Fixed8 {
    pub const ZERO: Self = Self(0);

    pub const fn from_raw(raw: i8) -> Self {
        Self(raw)
    }

    /// Accepts any integer in `[-128, 127]`.
    pub fn try_from_int(raw: i64) -> Result<Self, SdError> {
        i8::try_from(raw).map(Self).map_err(|_| SdError::OutOfRange(raw.to_string()))
    }

    pub const fn raw(self) -> i8 {
        self.0
    }

    pub fn value(self) -> Dyadic {
        Dyadic::new(i64::from(self.0), FIXED8_FRAC_BITS)
    }

    /// Seven magnitude digits (nonneg mode), or eight recoded digits with
    /// `scale_exp = 1` (signed-digit mode, leading digit has weight `2^0`).
    pub fn to_stream(self, mode: StreamMode) -> Result<DigitStream, SdError> {
        let bits = self.0 as u8;
        match mode {
            StreamMode::NonnegBits => {
                if self.0 < 0 {
                    return Err(SdError::NegativeInNonnegMode(self.0));
                }
                Ok((0..7).rev().map(|b| bit_digit(bits, b)).collect())
            }
            StreamMode::SignedDigit => {
                let lead = if bits & 0x80 != 0 { SignedDigit::NEG_ONE } else { SignedDigit::ZERO };
                let digits = std::iter::once(lead).chain((0..7).rev().map(|b| bit_digit(bits, b))).collect();
                Ok(DigitStream::new(digits, 1))
            }
        }
    }
}

/// Unsigned 8-bit input sample, value `raw / 2^8` in `[0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Pixel(pub u8);

impl Pixel {
    pub fn value(self) -> Dyadic {
        Dyadic::new(i64::from(self.0), PIXEL_FRAC_BITS)
    }

    /// Eight digits in `{0, 1}`, MSB first.
    pub fn to_stream(self) -> DigitStream {
        (0..8).rev().map(|b| bit_digit(self.0, b)).collect()
    }
}

fn bit_digit(bits: u8, b: u32) -> SignedDigit {
    if (bits >> b) & 1 == 1 {
        SignedDigit::ONE
    } else {
        SignedDigit::ZERO
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nonneg_examples() {
        let z = Fixed8::from_raw(0).to_stream(StreamMode::NonnegBits).unwrap();
        assert_eq!(z.values(), vec![0; 7]);
        let half = Fixed8::from_raw(64).to_stream(StreamMode::NonnegBits).unwrap();
        assert_eq!(half.values(), vec![1, 0, 0, 0, 0, 0, 0]);
        assert_eq!(half.value(), Dyadic::new(1, 1));
    }

    #[test]
    fn nonneg_rejects_negative() {
        assert_eq!(Fixed8::from_raw(-1).to_stream(StreamMode::NonnegBits), Err(SdError::NegativeInNonnegMode(-1)));
    }

    #[test]
    fn signed_digit_negative_half() {
        let st = Fixed8::from_raw(-64).to_stream(StreamMode::SignedDigit).unwrap();
        assert_eq!(st.value(), Dyadic::new(-1, 1));
    }

    #[test]
    fn exhaustive_round_trip() {
        for raw in i8::MIN..=i8::MAX {
            let x = Fixed8::from_raw(raw);
            assert_eq!(x.to_stream(StreamMode::SignedDigit).unwrap().value(), x.value(), "raw {raw}");
            if raw >= 0 {
                assert_eq!(x.to_stream(StreamMode::NonnegBits).unwrap().value(), x.value(), "raw {raw}");
            }
        }
    }

    #[test]
    fn value_range() {
        assert_eq!(Fixed8::from_raw(i8::MIN).value(), Dyadic::from_int(-1));
        assert_eq!(Fixed8::from_raw(i8::MAX).value(), Dyadic::new(127, 7));
        assert!(Fixed8::try_from_int(128).is_err());
        assert_eq!(Fixed8::try_from_int(-128).unwrap().raw(), -128);
    }

    #[test]
    fn pixel_streams() {
        assert_eq!(Pixel(0).value(), Dyadic::zero());
        assert_eq!(Pixel(128).value(), Dyadic::new(1, 1));
        for p in 0..=255u8 {
            assert_eq!(Pixel(p).to_stream().value(), Pixel(p).value());
        }
    }
}
