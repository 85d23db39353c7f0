use rug::float::{Constant, Round};
use rug::Float;

use super::{Precision, XInterval};

const EULER_GAMMA_100: &str = "0.5772156649015328606065120900824024310421593359399235988057672348848677267776646709369470632917467495";

/// Euler's constant to 100 decimal places, independent of MPFR.
pub fn euler_gamma_literal() -> &'static str {
    EULER_GAMMA_100
}

/// Enclosures of the mathematical constants at a fixed precision.
#[derive(Clone, Debug)]
pub struct Constants {
    pub prec: Precision,
    pub pi: XInterval,
    pub e: XInterval,
    pub gamma: XInterval,
    pub ln2: XInterval,
}

fn enclose(c: Constant, prec: Precision) -> XInterval {
    let bits = prec.bits() + 32;
    let (lo, _) = Float::with_val_round(bits, c, Round::Down);
    let (hi, _) = Float::with_val_round(bits, c, Round::Up);
    XInterval::from_float_bounds(&lo, &hi, prec).expect("finite constant")
}

impl Constants {
    pub fn new(prec: Precision) -> Self {
        Constants {
            prec,
            pi: enclose(Constant::Pi, prec),
            e: XInterval::from_ln_float(&Float::with_val(prec.bits(), 1), prec),
            gamma: enclose(Constant::Euler, prec),
            ln2: enclose(Constant::Log2, prec),
        }
    }

    pub fn int(&self, n: i64) -> XInterval {
        XInterval::from_int(n, self.prec)
    }

    pub fn ratio(&self, n: i64, d: i64) -> XInterval {
        XInterval::from_ratio(n, d, self.prec)
    }

    /// Decimal literal enclosed outward.
    pub fn lit(&self, s: &str) -> XInterval {
        XInterval::parse(s, self.prec).expect("valid literal")
    }

    /// `n!` as an enclosure, i.e. Gamma(n + 1).
    pub fn factorial(&self, n: u32) -> XInterval {
        let f = rug::Integer::from(rug::Integer::factorial(n));
        XInterval::from_integer(&f, self.prec)
    }
}
