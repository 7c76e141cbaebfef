use std::fmt;

use super::SdError;

/// A radix-2 signed digit held as a `(plus, minus)` bit pair.
///
/// The digit's value is `plus - minus`. The pair `(1, 1)` is never stored.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct SignedDigit {
    plus: bool,
    minus: bool,
}

impl SignedDigit {
    pub const ZERO: Self = Self { plus: false, minus: false };
    pub const ONE: Self = Self { plus: true, minus: false };
    pub const NEG_ONE: Self = Self { plus: false, minus: true };

    /// Strict constructor: rejects the `(1, 1)` encoding.
    pub fn from_bits(plus: bool, minus: bool) -> Result<Self, SdError> {
        if plus && minus {
            Err(SdError::NonCanonicalDigit)
        } else {
            Ok(Self { plus, minus })
        }
    }

    /// Maps `(1, 1)` to `(0, 0)`; other pairs unchanged.
    pub fn canonical(plus: bool, minus: bool) -> Self {
        if plus && minus {
            Self::ZERO
        } else {
            Self { plus, minus }
        }
    }

    pub fn from_value(v: i8) -> Result<Self, SdError> {
        match v {
            -1 => Ok(Self::NEG_ONE),
            0 => Ok(Self::ZERO),
            1 => Ok(Self::ONE),
            other => Err(SdError::DigitOutOfRange(other)),
        }
    }

    /// `plus - minus`.
    pub fn value(self) -> i8 {
        self.plus as i8 - self.minus as i8
    }

    pub fn plus(self) -> bool {
        self.plus
    }

    pub fn minus(self) -> bool {
        self.minus
    }

    pub fn is_zero(self) -> bool {
        !self.plus && !self.minus
    }
}

impl TryFrom<i8> for SignedDigit {
    type Error = SdError;
    fn try_from(v: i8) -> Result<Self, SdError> {
        Self::from_value(v)
    }
}

impl From<SignedDigit> for i8 {
    fn from(d: SignedDigit) -> i8 {
        d.value()
    }
}

impl fmt::Debug for SignedDigit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.value() {
            -1 => f.write_str("-1"),
            v => write!(f, "{v}"),
        }
    }
}
