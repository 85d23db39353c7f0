//! Signed extended-range reals stored as a natural-log magnitude.
//!
//! A value is `sign * exp(logmag)`. Because the representation is exact
//! (every `XReal` denotes one specific real number), multiplication and
//! division reduce to a single rounded addition of log magnitudes, and
//! reciprocals, square roots and negation are exact.

use std::cmp::Ordering;

use rug::float::Round;
use rug::ops::NegAssign;
use rug::{Float, Integer, Rational};
use serde::{Deserialize, Serialize};

use super::{NumError, Precision};

/// Largest log magnitude whose value still fits in an MPFR float.
const MAX_VALUE_LOGMAG: f64 = 7.0e8;

/// Extra bits carried through the log-sum-exp intermediates.
const GUARD_BITS: u32 = 32;

/// Rounding direction attached to an [`XReal`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rounding {
    Up,
    Down,
    Nearest,
}

impl Rounding {
    pub fn flip(self) -> Self {
        match self {
            Rounding::Up => Rounding::Down,
            Rounding::Down => Rounding::Up,
            Rounding::Nearest => Rounding::Nearest,
        }
    }

    fn rug(self) -> Round {
        match self {
            Rounding::Up => Round::Up,
            Rounding::Down => Round::Down,
            Rounding::Nearest => Round::Nearest,
        }
    }
}

fn opposite(r: Round) -> Round {
    match r {
        Round::Up => Round::Down,
        Round::Down => Round::Up,
        other => other,
    }
}

/// Direction in which the log magnitude must be rounded so that the signed
/// value moves in direction `mode`.
fn mag_round(mode: Rounding, sign: i8) -> Round {
    match (mode, sign >= 0) {
        (Rounding::Nearest, _) => Round::Nearest,
        (Rounding::Up, true) | (Rounding::Down, false) => Round::Up,
        (Rounding::Up, false) | (Rounding::Down, true) => Round::Down,
    }
}

/// Extended-range real with a directed-rounding tag.
#[derive(Clone, Debug)]
pub struct XReal {
    sign: i8,
    logmag: Float,
    mode: Rounding,
}

impl PartialEq for XReal {
    fn eq(&self, other: &Self) -> bool {
        self.sign == other.sign
            && self.mode == other.mode
            && (self.sign == 0 || self.logmag == other.logmag)
    }
}

impl XReal {
    pub fn zero(prec: Precision, mode: Rounding) -> Self {
        XReal {
            sign: 0,
            logmag: Float::new(prec.bits()),
            mode,
        }
    }

    pub fn one(prec: Precision, mode: Rounding) -> Self {
        XReal {
            sign: 1,
            logmag: Float::new(prec.bits()),
            mode,
        }
    }

    /// Builds the value `sign * exp(logmag)` exactly.
    pub fn from_parts(sign: i8, logmag: Float, mode: Rounding) -> Self {
        XReal {
            sign: sign.signum(),
            logmag,
            mode,
        }
    }

    /// Rounds a finite float into log form in direction `mode`.
    pub fn from_float(v: &Float, prec: Precision, mode: Rounding) -> Result<Self, NumError> {
        if v.is_nan() || v.is_infinite() {
            return Err(NumError::NonFinite);
        }
        if v.is_zero() {
            return Ok(XReal::zero(prec, mode));
        }
        let sign: i8 = if v.is_sign_negative() { -1 } else { 1 };
        let r = mag_round(mode, sign);
        let abs = Float::with_val(v.prec(), v.abs_ref());
        let (logmag, _) = Float::with_val_round(prec.bits(), abs.ln_ref(), r);
        Ok(XReal { sign, logmag, mode })
    }

    pub fn from_f64(v: f64, prec: Precision, mode: Rounding) -> Result<Self, NumError> {
        XReal::from_float(&Float::with_val(64, v), prec, mode)
    }

    pub fn from_integer(v: &Integer, prec: Precision, mode: Rounding) -> Self {
        let bits = v.significant_bits().max(64);
        let f = Float::with_val(bits, v);
        XReal::from_float(&f, prec, mode).expect("integers are finite")
    }

    pub fn from_rational(q: &Rational, prec: Precision, mode: Rounding) -> Self {
        if *q.numer() == 0 {
            return XReal::zero(prec, mode);
        }
        let sign: i8 = if *q.numer() < 0 { -1 } else { 1 };
        let r = mag_round(mode, sign);
        let wp = prec.bits() + GUARD_BITS;
        let abs = Rational::from(q.abs_ref());
        let (f, _) = Float::with_val_round(wp, &abs, r);
        let (logmag, _) = Float::with_val_round(prec.bits(), f.ln_ref(), r);
        XReal { sign, logmag, mode }
    }

    /// Parses a decimal literal such as `"2.52"` or `"-1.5e38"`.
    pub fn parse_decimal(s: &str, prec: Precision, mode: Rounding) -> Result<Self, NumError> {
        let parsed = Float::parse(s).map_err(|_| NumError::Parse(s.to_string()))?;
        let r = mode.rug();
        let (v, _) = Float::with_val_round(prec.bits() + GUARD_BITS, parsed, r);
        XReal::from_float(&v, prec, mode)
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn mode(&self) -> Rounding {
        self.mode
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    /// Natural log of the magnitude. Meaningless for zero.
    pub fn logmag(&self) -> &Float {
        &self.logmag
    }

    pub fn precision(&self) -> Precision {
        Precision::from_bits(self.logmag.prec())
    }

    pub fn with_mode(&self, mode: Rounding) -> Self {
        XReal {
            sign: self.sign,
            logmag: self.logmag.clone(),
            mode,
        }
    }

    fn check_mode(&self, other: &XReal) -> Result<(), NumError> {
        if self.mode != other.mode {
            return Err(NumError::ModeMismatch);
        }
        Ok(())
    }

    fn out_prec(&self, other: &XReal) -> Precision {
        Precision::from_bits(self.logmag.prec().max(other.logmag.prec()))
    }

    /// Exact ordering of the two represented values.
    pub fn cmp_value(&self, other: &XReal) -> Ordering {
        match self.sign.cmp(&other.sign) {
            Ordering::Equal => {}
            o => return o,
        }
        match self.sign {
            0 => Ordering::Equal,
            1 => self
                .logmag
                .partial_cmp(&other.logmag)
                .unwrap_or(Ordering::Equal),
            _ => other
                .logmag
                .partial_cmp(&self.logmag)
                .unwrap_or(Ordering::Equal),
        }
    }

    pub fn neg(&self) -> XReal {
        XReal {
            sign: -self.sign,
            logmag: self.logmag.clone(),
            mode: self.mode.flip(),
        }
    }

    pub fn abs(&self) -> XReal {
        XReal {
            sign: self.sign.abs(),
            logmag: self.logmag.clone(),
            mode: self.mode,
        }
    }

    /// Value as a float rounded in direction `mode`.
    pub fn to_float(&self, prec: u32, mode: Rounding) -> Result<Float, NumError> {
        if self.sign == 0 {
            return Ok(Float::new(prec));
        }
        if self.logmag > MAX_VALUE_LOGMAG {
            return Err(NumError::Overflow);
        }
        let r = mag_round(mode, self.sign);
        let (mut v, _) = Float::with_val_round(prec, self.logmag.exp_ref(), r);
        if v.is_infinite() {
            return Err(NumError::Overflow);
        }
        if self.sign < 0 {
            v.neg_assign();
        }
        Ok(v)
    }

    /// Nearest f64 of the value; may be infinite or zero outside f64 range.
    pub fn to_f64(&self) -> f64 {
        if self.sign == 0 {
            return 0.0;
        }
        let l = self.logmag.to_f64();
        f64::from(self.sign) * l.exp()
    }

    /// log10 of the magnitude, rounded per the value's own mode.
    pub fn log10_magnitude(&self) -> Float {
        let prec = self.logmag.prec();
        let r = mag_round(self.mode, self.sign);
        let (ln10, _) = Float::with_val_round(prec + GUARD_BITS, 10, Round::Nearest);
        let (ln10, _) = Float::with_val_round(prec + GUARD_BITS, ln10.ln_ref(), opposite(r));
        let (v, _) = Float::with_val_round(prec, &self.logmag / &ln10, r);
        v
    }

    // ---- directed primitives (mode is the target direction) ----

    pub(crate) fn add_dir(a: &XReal, b: &XReal, mode: Rounding, prec: Precision) -> XReal {
        if a.sign == 0 {
            return b.round_to(mode, prec);
        }
        if b.sign == 0 {
            return a.round_to(mode, prec);
        }
        let (big, small) = if a.logmag >= b.logmag { (a, b) } else { (b, a) };
        let wp = prec.bits() + GUARD_BITS;
        let r = mag_round(mode, big.sign);
        if big.sign == small.sign {
            // log(1 + e^{-d}) decreases with d.
            let (d, _) = Float::with_val_round(wp, &big.logmag - &small.logmag, opposite(r));
            let (t, _) = Float::with_val_round(wp, (-d).exp_ref(), r);
            let (l1p, _) = Float::with_val_round(wp, t.ln_1p_ref(), r);
            let (logmag, _) = Float::with_val_round(prec.bits(), &big.logmag + &l1p, r);
            XReal {
                sign: big.sign,
                logmag,
                mode,
            }
        } else {
            // |result| = e^{big} (1 - e^{-d}), increasing in d.
            let (d, _) = Float::with_val_round(wp, &big.logmag - &small.logmag, r);
            if d.is_zero() {
                return XReal::zero(prec, mode);
            }
            let corr = if d > 1 {
                let (t, _) = Float::with_val_round(wp, (-d).exp_ref(), opposite(r));
                let (c, _) = Float::with_val_round(wp, (-t).ln_1p_ref(), r);
                c
            } else {
                let (em, _) = Float::with_val_round(wp, (-d).exp_m1_ref(), opposite(r));
                let om = -em;
                if om <= 0 {
                    return XReal::zero(prec, mode);
                }
                let (c, _) = Float::with_val_round(wp, om.ln_ref(), r);
                c
            };
            if corr.is_infinite() {
                return XReal::zero(prec, mode);
            }
            let (logmag, _) = Float::with_val_round(prec.bits(), &big.logmag + &corr, r);
            XReal {
                sign: big.sign,
                logmag,
                mode,
            }
        }
    }

    pub(crate) fn mul_dir(a: &XReal, b: &XReal, mode: Rounding, prec: Precision) -> XReal {
        let sign = a.sign * b.sign;
        if sign == 0 {
            return XReal::zero(prec, mode);
        }
        let r = mag_round(mode, sign);
        let (logmag, _) = Float::with_val_round(prec.bits(), &a.logmag + &b.logmag, r);
        XReal { sign, logmag, mode }
    }

    pub(crate) fn div_dir(a: &XReal, b: &XReal, mode: Rounding, prec: Precision) -> Result<XReal, NumError> {
        if b.sign == 0 {
            return Err(NumError::DivisionByZero);
        }
        let sign = a.sign * b.sign;
        if sign == 0 {
            return Ok(XReal::zero(prec, mode));
        }
        let r = mag_round(mode, sign);
        let (logmag, _) = Float::with_val_round(prec.bits(), &a.logmag - &b.logmag, r);
        Ok(XReal { sign, logmag, mode })
    }

    pub(crate) fn exp_dir(a: &XReal, mode: Rounding, prec: Precision) -> Result<XReal, NumError> {
        // exp(v) has log magnitude v itself.
        let v = a.to_float(prec.bits(), mode)?;
        Ok(XReal {
            sign: 1,
            logmag: v,
            mode,
        })
    }

    pub(crate) fn ln_dir(a: &XReal, mode: Rounding, prec: Precision) -> Result<XReal, NumError> {
        if a.sign <= 0 {
            return Err(NumError::Domain("log of a non-positive value".into()));
        }
        XReal::from_float(&a.logmag, prec, mode)
    }

    /// `ln(1 + a)` for `a > -1`, accurate when `a` is tiny.
    pub(crate) fn ln_1p_dir(a: &XReal, mode: Rounding, prec: Precision) -> Result<XReal, NumError> {
        if a.sign > 0 && a.logmag > 1 {
            let s = XReal::add_dir(a, &XReal::one(prec, mode), mode, prec);
            return XReal::ln_dir(&s, mode, prec);
        }
        let wp = prec.bits() + GUARD_BITS;
        let v = a.to_float(wp, mode)?;
        if v <= -1 {
            return Err(NumError::Domain("ln(1 + x) with x <= -1".into()));
        }
        let (r, _) = Float::with_val_round(wp, v.ln_1p_ref(), mode.rug());
        XReal::from_float(&r, prec, mode)
    }

    /// `exp(a) - 1`, accurate when `a` is tiny.
    pub(crate) fn exp_m1_dir(a: &XReal, mode: Rounding, prec: Precision) -> Result<XReal, NumError> {
        if a.sign > 0 && a.logmag > 0 {
            let e = XReal::exp_dir(a, mode, prec)?;
            let m1 = XReal::one(prec, mode).neg();
            return Ok(XReal::add_dir(&e, &m1, mode, prec));
        }
        let wp = prec.bits() + GUARD_BITS;
        let v = a.to_float(wp, mode)?;
        let (r, _) = Float::with_val_round(wp, v.exp_m1_ref(), mode.rug());
        XReal::from_float(&r, prec, mode)
    }

    pub(crate) fn powi_dir(a: &XReal, n: i64, mode: Rounding, prec: Precision) -> XReal {
        if n == 0 {
            return XReal::one(prec, mode);
        }
        if a.sign == 0 {
            return XReal::zero(prec, mode);
        }
        let sign = if a.sign < 0 && n % 2 != 0 { -1 } else { 1 };
        let r = mag_round(mode, sign);
        let (logmag, _) = Float::with_val_round(prec.bits(), &a.logmag * n, r);
        XReal { sign, logmag, mode }
    }

    pub(crate) fn recip_exact(a: &XReal) -> Result<XReal, NumError> {
        if a.sign == 0 {
            return Err(NumError::DivisionByZero);
        }
        Ok(XReal {
            sign: a.sign,
            logmag: Float::with_val(a.logmag.prec(), -&a.logmag),
            mode: a.mode.flip(),
        })
    }

    pub(crate) fn sqrt_exact(a: &XReal) -> Result<XReal, NumError> {
        if a.sign < 0 {
            return Err(NumError::Domain("square root of a negative value".into()));
        }
        let mut logmag = a.logmag.clone();
        logmag >>= 1;
        Ok(XReal {
            sign: a.sign,
            logmag,
            mode: a.mode,
        })
    }

    fn round_to(&self, mode: Rounding, prec: Precision) -> XReal {
        if self.sign == 0 {
            return XReal::zero(prec, mode);
        }
        let r = mag_round(mode, self.sign);
        let (logmag, _) = Float::with_val_round(prec.bits(), &self.logmag, r);
        XReal {
            sign: self.sign,
            logmag,
            mode,
        }
    }

    // ---- public directed API (operands must share a rounding mode) ----

    pub fn add(&self, other: &XReal) -> Result<XReal, NumError> {
        self.check_mode(other)?;
        Ok(XReal::add_dir(self, other, self.mode, self.out_prec(other)))
    }

    pub fn sub(&self, other: &XReal) -> Result<XReal, NumError> {
        self.check_mode(other)?;
        let neg = XReal {
            sign: -other.sign,
            logmag: other.logmag.clone(),
            mode: other.mode,
        };
        Ok(XReal::add_dir(self, &neg, self.mode, self.out_prec(other)))
    }

    pub fn mul(&self, other: &XReal) -> Result<XReal, NumError> {
        self.check_mode(other)?;
        Ok(XReal::mul_dir(self, other, self.mode, self.out_prec(other)))
    }

    pub fn div(&self, other: &XReal) -> Result<XReal, NumError> {
        self.check_mode(other)?;
        XReal::div_dir(self, other, self.mode, self.out_prec(other))
    }

    pub fn exp(&self) -> Result<XReal, NumError> {
        XReal::exp_dir(self, self.mode, self.precision())
    }

    pub fn ln(&self) -> Result<XReal, NumError> {
        XReal::ln_dir(self, self.mode, self.precision())
    }

    /// `self^y = exp(y ln self)` for positive `self`.
    pub fn pow(&self, y: &XReal) -> Result<XReal, NumError> {
        self.check_mode(y)?;
        let prec = self.out_prec(y);
        // For the product y*ln(self) to be rounded toward `mode`, ln(self)
        // must move with the sign of y.
        let ln_mode = if y.sign >= 0 { self.mode } else { self.mode.flip() };
        let l = XReal::ln_dir(self, ln_mode, prec)?;
        let prod = XReal::mul_dir(&l, y, self.mode, prec);
        XReal::exp_dir(&prod, self.mode, prec)
    }

    pub fn max(&self, other: &XReal) -> Result<XReal, NumError> {
        self.check_mode(other)?;
        Ok(if self.cmp_value(other) == Ordering::Less {
            other.clone()
        } else {
            self.clone()
        })
    }

    pub fn min(&self, other: &XReal) -> Result<XReal, NumError> {
        self.check_mode(other)?;
        Ok(if self.cmp_value(other) == Ordering::Greater {
            other.clone()
        } else {
            self.clone()
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Precision {
        Precision::from_digits(40)
    }

    #[test]
    fn thirds_round_outward() {
        let up = XReal::from_rational(&Rational::from((1, 3)), p(), Rounding::Up);
        let s = up.add(&up).unwrap().add(&up).unwrap();
        assert_ne!(s.cmp_value(&XReal::one(p(), Rounding::Up)), Ordering::Less);

        let down = XReal::from_rational(&Rational::from((1, 3)), p(), Rounding::Down);
        let s = down.add(&down).unwrap().add(&down).unwrap();
        assert_ne!(s.cmp_value(&XReal::one(p(), Rounding::Down)), Ordering::Greater);
    }

    #[test]
    fn squaring_in_log_space_doubles_the_log() {
        let l = Float::with_val(p().bits(), Float::parse("1.5e38").unwrap());
        let x = XReal::from_parts(1, l, Rounding::Up);
        let sq = x.mul(&x).unwrap();
        let expected = Float::with_val(p().bits(), Float::parse("3.0e38").unwrap());
        assert_eq!(*sq.logmag(), expected);
    }

    #[test]
    fn exp_ln_round_trip() {
        let x = XReal::from_f64(7.25, p(), Rounding::Nearest).unwrap();
        let back = x.ln().unwrap().exp().unwrap();
        let diff = (back.to_f64() - 7.25).abs();
        assert!(diff < 1e-30);
    }

    #[test]
    fn mode_mismatch_is_an_error() {
        let a = XReal::one(p(), Rounding::Up);
        let b = XReal::one(p(), Rounding::Down);
        assert!(matches!(a.add(&b), Err(NumError::ModeMismatch)));
    }

    #[test]
    fn cancellation_to_zero_is_exact() {
        let a = XReal::from_f64(2.5, p(), Rounding::Up).unwrap();
        let z = a.sub(&a).unwrap();
        assert!(z.is_zero());
    }

    #[test]
    fn huge_exponents_compare_in_log_space() {
        let a = XReal::from_parts(1, Float::with_val(128, 1e9), Rounding::Nearest);
        let b = XReal::from_parts(1, Float::with_val(128, 1e9 + 1.0), Rounding::Nearest);
        assert_eq!(a.cmp_value(&b), Ordering::Less);
        assert_eq!(a.cmp_value(&a), Ordering::Equal);
    }

    #[test]
    fn negative_values_round_in_the_right_direction() {
        // -(1/3) rounded up must be >= -1/3.
        let q = Rational::from((-1, 3));
        let up = XReal::from_rational(&q, p(), Rounding::Up);
        let down = XReal::from_rational(&q, p(), Rounding::Down);
        assert_eq!(down.cmp_value(&up), Ordering::Less);
        let f_up = up.to_float(200, Rounding::Up).unwrap();
        let f_down = down.to_float(200, Rounding::Down).unwrap();
        let third = Float::with_val(400, &q);
        assert!(f_down <= third && third <= f_up);
    }
}
