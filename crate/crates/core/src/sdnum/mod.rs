//! Radix-2 signed-digit numerals and their exact values.
//!
//! Every digit is a `(plus, minus)` bit pair with value `plus - minus`. A
//! [`DigitStream`] is read most significant digit first, the first digit
//! carrying weight `2^-1`. Values are compared exactly through [`Dyadic`];
//! two streams with different digits may well be equal.

mod digit;
mod dyadic;
mod fixed;
mod stream;

pub use digit::SignedDigit;
pub use dyadic::Dyadic;
pub use fixed::{Fixed8, Pixel, StreamMode, FIXED8_FRAC_BITS, PIXEL_FRAC_BITS};
pub use stream::DigitStream;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SdError {
    #[error("digit encoding (1, 1) is not canonical")]
    NonCanonicalDigit,
    #[error("digit value {0} outside {{-1, 0, 1}}")]
    DigitOutOfRange(i8),
    #[error("operand {0} is negative; nonneg-bits mode needs x >= 0")]
    NegativeInNonnegMode(i8),
    #[error("value {0} out of range")]
    OutOfRange(String),
    #[error("value {value} is not a multiple of 2^-{digits}")]
    NotRepresentable { value: String, digits: u32 },
}

/// `digit_value`: the integer value of a digit.
pub fn digit_value(d: SignedDigit) -> i8 {
    d.value()
}

/// `stream_value`: the exact value of a stream including its scale.
pub fn stream_value(s: &DigitStream) -> Dyadic {
    s.value()
}

/// `fixed_to_stream`: feed a conventional operand into an MSDF unit.
pub fn fixed_to_stream(x: Fixed8, mode: StreamMode) -> Result<DigitStream, SdError> {
    x.to_stream(mode)
}

/// `stream_from_rational`: a stream of `n_digits` digits with value `v`.
pub fn stream_from_rational(v: &Dyadic, n_digits: u32) -> Result<DigitStream, SdError> {
    DigitStream::from_dyadic(v, n_digits)
}
