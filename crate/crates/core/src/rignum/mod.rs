//! Extended-range, directed-rounded real arithmetic.
//!
//! [`XReal`] stores a sign and the natural log of the magnitude, so values
//! such as `exp(2.8e109)` are ordinary citizens. [`XInterval`] pairs a
//! down-rounded and an up-rounded endpoint and is what the bound formulas
//! are written against.

mod consts;
mod interval;
mod xreal;

pub use consts::{euler_gamma_literal, Constants};
pub use interval::{Compare, XInterval};
pub use xreal::{Rounding, XReal};

use serde::{Deserialize, Serialize};

/// Working precision in bits of the log-magnitude mantissa.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Precision(u32);

impl Precision {
    pub const DEFAULT_DIGITS: u32 = 40;

    /// Bits needed for `digits` significant decimal digits, plus headroom
    /// for the integer part of log magnitudes up to about 1e300.
    pub fn from_digits(digits: u32) -> Self {
        let bits = (f64::from(digits) * std::f64::consts::LOG2_10).ceil() as u32 + 16;
        Precision(bits)
    }

    pub fn from_bits(bits: u32) -> Self {
        Precision(bits.max(rug::float::prec_min()))
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    /// Decimal digits carried by this precision (inverse of `from_digits`).
    pub fn digits(self) -> u32 {
        ((f64::from(self.0.saturating_sub(16))) / std::f64::consts::LOG2_10).floor() as u32
    }

    pub fn doubled(self) -> Self {
        Precision(self.0.saturating_mul(2))
    }
}

impl Default for Precision {
    fn default() -> Self {
        Precision::from_digits(Self::DEFAULT_DIGITS)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NumError {
    #[error("operands carry different rounding modes")]
    ModeMismatch,
    #[error("division by zero")]
    DivisionByZero,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("value does not fit in the requested representation")]
    Overflow,
    #[error("non-finite input")]
    NonFinite,
    #[error("cannot parse number {0:?}")]
    Parse(String),
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forty_digits_is_about_149_bits() {
        let p = Precision::from_digits(40);
        assert_eq!(p.bits(), 149);
        assert_eq!(p.digits(), 40);
    }
}
