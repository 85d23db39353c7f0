use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rug::float::Round;
use rug::{Float, Integer, Rational};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{NumError, Precision, Rounding, XReal};

/// Result of comparing two enclosures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Compare {
    Less,
    Equal,
    Greater,
    Indeterminate,
}

impl Compare {
    pub fn is_reliable(self) -> bool {
        self != Compare::Indeterminate
    }
}

/// Closed enclosure `[lo, hi]` of an exact real.
#[derive(Clone, Debug, PartialEq)]
pub struct XInterval {
    lo: XReal,
    hi: XReal,
}

fn prec2(a: &XInterval, b: &XInterval) -> Precision {
    a.precision().max(b.precision())
}

impl XInterval {
    pub fn new(lo: XReal, hi: XReal) -> Result<Self, NumError> {
        if lo.cmp_value(&hi) == Ordering::Greater {
            return Err(NumError::Domain("interval with lo > hi".into()));
        }
        Ok(XInterval {
            lo: lo.with_mode(Rounding::Down),
            hi: hi.with_mode(Rounding::Up),
        })
    }

    /// Degenerate interval around a value known exactly.
    pub fn exact(x: &XReal) -> Self {
        XInterval {
            lo: x.with_mode(Rounding::Down),
            hi: x.with_mode(Rounding::Up),
        }
    }

    pub fn zero(prec: Precision) -> Self {
        XInterval::exact(&XReal::zero(prec, Rounding::Nearest))
    }

    pub fn one(prec: Precision) -> Self {
        XInterval::exact(&XReal::one(prec, Rounding::Nearest))
    }

    pub fn from_int(n: i64, prec: Precision) -> Self {
        XInterval::from_integer(&Integer::from(n), prec)
    }

    pub fn from_integer(n: &Integer, prec: Precision) -> Self {
        XInterval {
            lo: XReal::from_integer(n, prec, Rounding::Down),
            hi: XReal::from_integer(n, prec, Rounding::Up),
        }
    }

    pub fn from_rational(q: &Rational, prec: Precision) -> Self {
        XInterval {
            lo: XReal::from_rational(q, prec, Rounding::Down),
            hi: XReal::from_rational(q, prec, Rounding::Up),
        }
    }

    pub fn from_ratio(num: i64, den: i64, prec: Precision) -> Self {
        XInterval::from_rational(&Rational::from((num, den)), prec)
    }

    /// Enclosure of a decimal literal.
    pub fn parse(s: &str, prec: Precision) -> Result<Self, NumError> {
        Ok(XInterval {
            lo: XReal::parse_decimal(s, prec, Rounding::Down)?,
            hi: XReal::parse_decimal(s, prec, Rounding::Up)?,
        })
    }

    /// Enclosure of a finite float, which is itself exact.
    pub fn from_float(v: &Float, prec: Precision) -> Result<Self, NumError> {
        Ok(XInterval {
            lo: XReal::from_float(v, prec, Rounding::Down)?,
            hi: XReal::from_float(v, prec, Rounding::Up)?,
        })
    }

    /// Enclosure from two floats known to bracket the value.
    pub fn from_float_bounds(lo: &Float, hi: &Float, prec: Precision) -> Result<Self, NumError> {
        XInterval::new(
            XReal::from_float(lo, prec, Rounding::Down)?,
            XReal::from_float(hi, prec, Rounding::Up)?,
        )
    }

    pub fn from_f64(v: f64, prec: Precision) -> Result<Self, NumError> {
        XInterval::from_float(&Float::with_val(64, v), prec)
    }

    /// `exp(l)` for an exactly known float `l`, i.e. a value given by its log.
    pub fn from_ln_float(l: &Float, prec: Precision) -> Self {
        XInterval {
            lo: XReal::from_parts(1, Float::with_val_round(prec.bits(), l, Round::Down).0, Rounding::Down),
            hi: XReal::from_parts(1, Float::with_val_round(prec.bits(), l, Round::Up).0, Rounding::Up),
        }
    }

    pub fn lo(&self) -> &XReal {
        &self.lo
    }

    pub fn hi(&self) -> &XReal {
        &self.hi
    }

    pub fn precision(&self) -> Precision {
        self.lo.precision().max(self.hi.precision())
    }

    /// Recomputes endpoints at a different precision, rounding outward.
    pub fn with_precision(&self, prec: Precision) -> Self {
        let z = XInterval::zero(prec);
        let lo = XReal::add_dir(&self.lo, z.lo(), Rounding::Down, prec);
        let hi = XReal::add_dir(&self.hi, z.hi(), Rounding::Up, prec);
        XInterval { lo, hi }
    }

    pub fn is_positive(&self) -> bool {
        self.lo.sign() > 0
    }

    pub fn is_nonnegative(&self) -> bool {
        self.lo.sign() >= 0
    }

    pub fn contains_zero(&self) -> bool {
        self.lo.sign() <= 0 && self.hi.sign() >= 0
    }

    pub fn contains_rational(&self, q: &Rational) -> bool {
        let bits = self.precision().bits() * 2 + 64;
        let lo = match self.lo.to_float(bits, Rounding::Down) {
            Ok(v) => v,
            Err(_) => return false,
        };
        let hi = match self.hi.to_float(bits, Rounding::Up) {
            Ok(v) => v,
            Err(_) => return false,
        };
        lo <= *q && *q <= hi
    }

    pub fn neg_interval(&self) -> XInterval {
        XInterval {
            lo: self.hi.neg(),
            hi: self.lo.neg(),
        }
    }

    pub fn add_interval(&self, o: &XInterval) -> XInterval {
        let p = prec2(self, o);
        XInterval {
            lo: XReal::add_dir(&self.lo, &o.lo, Rounding::Down, p),
            hi: XReal::add_dir(&self.hi, &o.hi, Rounding::Up, p),
        }
    }

    pub fn sub_interval(&self, o: &XInterval) -> XInterval {
        self.add_interval(&o.neg_interval())
    }

    pub fn mul_interval(&self, o: &XInterval) -> XInterval {
        let p = prec2(self, o);
        if self.is_nonnegative() && o.is_nonnegative() {
            return XInterval {
                lo: XReal::mul_dir(&self.lo, &o.lo, Rounding::Down, p),
                hi: XReal::mul_dir(&self.hi, &o.hi, Rounding::Up, p),
            };
        }
        let pairs = [
            (&self.lo, &o.lo),
            (&self.lo, &o.hi),
            (&self.hi, &o.lo),
            (&self.hi, &o.hi),
        ];
        let lo = pairs
            .iter()
            .map(|(a, b)| XReal::mul_dir(a, b, Rounding::Down, p))
            .min_by(|a, b| a.cmp_value(b))
            .expect("four candidates");
        let hi = pairs
            .iter()
            .map(|(a, b)| XReal::mul_dir(a, b, Rounding::Up, p))
            .max_by(|a, b| a.cmp_value(b))
            .expect("four candidates");
        XInterval { lo, hi }
    }

    pub fn recip(&self) -> Result<XInterval, NumError> {
        if self.contains_zero() {
            return Err(NumError::DivisionByZero);
        }
        // 1/x is decreasing on each half-line and exact in log form.
        Ok(XInterval {
            lo: XReal::recip_exact(&self.hi)?,
            hi: XReal::recip_exact(&self.lo)?,
        })
    }

    pub fn div(&self, o: &XInterval) -> Result<XInterval, NumError> {
        if self.is_nonnegative() && o.is_positive() {
            let p = prec2(self, o);
            return Ok(XInterval {
                lo: XReal::div_dir(&self.lo, &o.hi, Rounding::Down, p)?,
                hi: XReal::div_dir(&self.hi, &o.lo, Rounding::Up, p)?,
            });
        }
        Ok(self.mul_interval(&o.recip()?))
    }

    pub fn exp(&self) -> Result<XInterval, NumError> {
        let p = self.precision();
        Ok(XInterval {
            lo: XReal::exp_dir(&self.lo, Rounding::Down, p)?,
            hi: XReal::exp_dir(&self.hi, Rounding::Up, p)?,
        })
    }

    pub fn ln(&self) -> Result<XInterval, NumError> {
        if !self.is_positive() {
            return Err(NumError::Domain("log of an interval reaching zero or below".into()));
        }
        let p = self.precision();
        Ok(XInterval {
            lo: XReal::ln_dir(&self.lo, Rounding::Down, p)?,
            hi: XReal::ln_dir(&self.hi, Rounding::Up, p)?,
        })
    }

    /// `ln(1 + x)` without cancellation for tiny `x`.
    pub fn ln_1p(&self) -> Result<XInterval, NumError> {
        let p = self.precision();
        Ok(XInterval {
            lo: XReal::ln_1p_dir(&self.lo, Rounding::Down, p)?,
            hi: XReal::ln_1p_dir(&self.hi, Rounding::Up, p)?,
        })
    }

    /// `exp(x) - 1` without cancellation for tiny `x`.
    pub fn exp_m1(&self) -> Result<XInterval, NumError> {
        let p = self.precision();
        Ok(XInterval {
            lo: XReal::exp_m1_dir(&self.lo, Rounding::Down, p)?,
            hi: XReal::exp_m1_dir(&self.hi, Rounding::Up, p)?,
        })
    }

    pub fn sqrt(&self) -> Result<XInterval, NumError> {
        if self.hi.sign() < 0 {
            return Err(NumError::Domain("square root of a negative interval".into()));
        }
        let lo = if self.lo.sign() < 0 {
            XReal::zero(self.precision(), Rounding::Down)
        } else {
            XReal::sqrt_exact(&self.lo)?
        };
        Ok(XInterval {
            lo,
            hi: XReal::sqrt_exact(&self.hi)?,
        })
    }

    /// `self^y` for a positive base.
    pub fn pow(&self, y: &XInterval) -> Result<XInterval, NumError> {
        self.ln()?.mul_interval(y).exp()
    }

    pub fn powi(&self, n: i64) -> Result<XInterval, NumError> {
        if n < 0 {
            return self.powi(-n)?.recip();
        }
        let p = self.precision();
        if n % 2 == 1 || self.is_nonnegative() {
            return Ok(XInterval {
                lo: XReal::powi_dir(&self.lo, n, Rounding::Down, p),
                hi: XReal::powi_dir(&self.hi, n, Rounding::Up, p),
            });
        }
        if self.hi.sign() <= 0 {
            return Ok(XInterval {
                lo: XReal::powi_dir(&self.hi, n, Rounding::Down, p),
                hi: XReal::powi_dir(&self.lo, n, Rounding::Up, p),
            });
        }
        let far = if self.lo.abs().cmp_value(&self.hi) == Ordering::Greater {
            self.lo.abs()
        } else {
            self.hi.clone()
        };
        Ok(XInterval {
            lo: XReal::zero(p, Rounding::Down),
            hi: XReal::powi_dir(&far, n, Rounding::Up, p),
        })
    }

    pub fn max(&self, o: &XInterval) -> XInterval {
        let pick = |a: &XReal, b: &XReal| {
            if a.cmp_value(b) == Ordering::Less {
                b.clone()
            } else {
                a.clone()
            }
        };
        XInterval {
            lo: pick(&self.lo, &o.lo),
            hi: pick(&self.hi, &o.hi),
        }
    }

    pub fn min(&self, o: &XInterval) -> XInterval {
        let pick = |a: &XReal, b: &XReal| {
            if a.cmp_value(b) == Ordering::Greater {
                b.clone()
            } else {
                a.clone()
            }
        };
        XInterval {
            lo: pick(&self.lo, &o.lo),
            hi: pick(&self.hi, &o.hi),
        }
    }

    /// Hull of two enclosures.
    pub fn hull(&self, o: &XInterval) -> XInterval {
        let lo = if self.lo.cmp_value(&o.lo) == Ordering::Greater {
            o.lo.clone()
        } else {
            self.lo.clone()
        };
        let hi = if self.hi.cmp_value(&o.hi) == Ordering::Less {
            o.hi.clone()
        } else {
            self.hi.clone()
        };
        XInterval { lo, hi }
    }

    pub fn compare(&self, o: &XInterval) -> Compare {
        if self.hi.cmp_value(&o.lo) == Ordering::Less {
            return Compare::Less;
        }
        if self.lo.cmp_value(&o.hi) == Ordering::Greater {
            return Compare::Greater;
        }
        // Identical enclosures are taken to denote the same value.
        if self.lo.cmp_value(&o.lo) == Ordering::Equal && self.hi.cmp_value(&o.hi) == Ordering::Equal {
            return Compare::Equal;
        }
        Compare::Indeterminate
    }

    /// True only when `self < o` is certain.
    pub fn certainly_lt(&self, o: &XInterval) -> bool {
        self.compare(o) == Compare::Less
    }

    pub fn certainly_gt(&self, o: &XInterval) -> bool {
        self.compare(o) == Compare::Greater
    }

    /// Midpoint of the log magnitudes as f64 (for display and seeding searches).
    pub fn ln_mid_f64(&self) -> f64 {
        0.5 * (self.lo.logmag().to_f64() + self.hi.logmag().to_f64())
    }

    pub fn to_f64(&self) -> f64 {
        0.5 * (self.lo.to_f64() + self.hi.to_f64())
    }

    /// Upper endpoint as an up-rounded float.
    pub fn upper_float(&self, bits: u32) -> Result<Float, NumError> {
        self.hi.to_float(bits, Rounding::Up)
    }

    pub fn lower_float(&self, bits: u32) -> Result<Float, NumError> {
        self.lo.to_float(bits, Rounding::Down)
    }

    /// Relative width `hi/lo - 1` measured through log magnitudes, for
    /// same-signed nonzero intervals.
    pub fn log_width(&self) -> Option<f64> {
        if self.lo.sign() != self.hi.sign() || self.lo.sign() == 0 {
            return None;
        }
        let d = Float::with_val(self.precision().bits() + 8, self.hi.logmag() - self.lo.logmag());
        Some(d.to_f64().abs())
    }

    /// Upper endpoint as a human readable decimal in scientific form.
    pub fn display_upper(&self, digits: usize) -> String {
        format_xreal(&self.hi, digits)
    }

    pub fn display_lower(&self, digits: usize) -> String {
        format_xreal(&self.lo, digits)
    }
}

/// Scientific notation for an `XReal`, computed from the log magnitude so
/// that astronomically large values print without overflow. The last digit
/// is rounded in the direction of the value's mode, except that a mantissa
/// within the log representation's own error of an integer is printed as
/// that integer.
pub fn format_xreal(x: &XReal, digits: usize) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    let digits = digits.max(1);
    let l10 = x.log10_magnitude();
    let bits = l10.prec().max(64) + 4 * digits as u32;
    let e = l10.clone().floor();
    let frac = Float::with_val(bits, &l10 - &e);
    let mut exp = e.to_integer().expect("finite exponent");
    // Mantissa scaled to an integer with `digits` significant digits.
    let shift = Float::with_val(bits, &frac + (digits - 1) as u32);
    let ten = Float::with_val(bits, 10);
    let scaled = Float::with_val(bits, rug::ops::Pow::pow(&ten, &shift));
    let round_up = match (x.mode(), x.sign() > 0) {
        (Rounding::Nearest, _) => None,
        (Rounding::Up, true) | (Rounding::Down, false) => Some(true),
        _ => Some(false),
    };
    let nearest = Float::with_val(bits, scaled.round_ref());
    let slack = Float::with_val(bits, &scaled >> (l10.prec().saturating_sub(40) as i32));
    let snapped = Float::with_val(bits, &scaled - &nearest).abs() <= slack;
    let mut m = match round_up {
        _ if snapped => nearest,
        None => scaled.round(),
        Some(true) => scaled.ceil(),
        Some(false) => scaled.floor(),
    }
    .to_integer()
    .expect("finite mantissa");
    if m >= Integer::from(Integer::u_pow_u(10, digits as u32)) {
        m /= 10;
        exp += 1;
    }
    let ds = m.to_string();
    let sign = if x.sign() < 0 { "-" } else { "" };
    if (-4..16).contains(&exp) {
        let e = exp.to_i32().unwrap_or(0);
        let body = if e >= 0 {
            let point = (e + 1) as usize;
            if ds.len() > point {
                format!("{}.{}", &ds[..point], &ds[point..])
            } else {
                format!("{}{}", ds, "0".repeat(point - ds.len()))
            }
        } else {
            format!("0.{}{}", "0".repeat((-e - 1) as usize), ds)
        };
        return format!("{sign}{}", trim_zeros(body));
    }
    let body = if ds.len() > 1 { format!("{}.{}", &ds[..1], &ds[1..]) } else { ds };
    format!("{sign}{}e{}", trim_zeros(body), exp)
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

impl fmt::Display for XInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.display_lower(8), self.display_upper(8))
    }
}

impl Add for &XInterval {
    type Output = XInterval;
    fn add(self, o: &XInterval) -> XInterval {
        self.add_interval(o)
    }
}

impl Sub for &XInterval {
    type Output = XInterval;
    fn sub(self, o: &XInterval) -> XInterval {
        self.sub_interval(o)
    }
}

impl Mul for &XInterval {
    type Output = XInterval;
    fn mul(self, o: &XInterval) -> XInterval {
        self.mul_interval(o)
    }
}

impl Neg for &XInterval {
    type Output = XInterval;
    fn neg(self) -> XInterval {
        self.neg_interval()
    }
}

#[derive(Serialize, Deserialize)]
struct XRealRepr {
    sign: i8,
    log10_magnitude: String,
    ln_magnitude: String,
    bits: u32,
    mode: Rounding,
}

impl Serialize for XReal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let digits = (self.precision().digits() as usize).max(10);
        let repr = XRealRepr {
            sign: self.sign(),
            log10_magnitude: if self.is_zero() {
                "-inf".into()
            } else {
                self.log10_magnitude().to_string_radix(10, Some(digits))
            },
            ln_magnitude: self.logmag().to_string_radix(10, None),
            bits: self.precision().bits(),
            mode: self.mode(),
        };
        repr.serialize(s)
    }
}

impl<'de> Deserialize<'de> for XReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = XRealRepr::deserialize(d)?;
        let parsed = Float::parse(&repr.ln_magnitude).map_err(D::Error::custom)?;
        let logmag = Float::with_val(repr.bits, parsed);
        Ok(XReal::from_parts(repr.sign, logmag, repr.mode))
    }
}

#[derive(Serialize, Deserialize)]
struct XIntervalRepr {
    lo: XReal,
    hi: XReal,
}

impl Serialize for XInterval {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        XIntervalRepr {
            lo: self.lo.clone(),
            hi: self.hi.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for XInterval {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = XIntervalRepr::deserialize(d)?;
        XInterval::new(r.lo, r.hi).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p() -> Precision {
        Precision::default()
    }

    #[test]
    fn thirds_enclose_one() {
        let t = XInterval::from_ratio(1, 3, p());
        let s = &(&t + &t) + &t;
        assert!(s.contains_rational(&Rational::from(1)));
        assert_ne!(s.compare(&XInterval::one(p())), Compare::Less);
    }

    #[test]
    fn compare_identical_points_is_equal() {
        let x = XInterval::from_int(5, p());
        assert_eq!(x.compare(&x), Compare::Equal);
        let a = XInterval::from_ln_float(&Float::with_val(128, 1e9), p());
        let b = XInterval::from_ln_float(&Float::with_val(128, 1e9 + 1.0), p());
        assert_eq!(a.compare(&b), Compare::Less);
    }

    #[test]
    fn sign_straddling_product() {
        let a = XInterval::new(
            XReal::from_f64(-2.0, p(), Rounding::Down).unwrap(),
            XReal::from_f64(3.0, p(), Rounding::Up).unwrap(),
        )
        .unwrap();
        let b = XInterval::from_int(-4, p());
        let c = &a * &b;
        assert!(c.contains_rational(&Rational::from(-12)));
        assert!(c.contains_rational(&Rational::from(8)));
        assert!(!c.contains_rational(&Rational::from(9)));
    }

    #[test]
    fn serde_round_trip_is_exact() {
        let x = XInterval::from_ratio(22, 7, p()).exp().unwrap();
        let json = serde_json::to_string(&x).unwrap();
        let back: XInterval = serde_json::from_str(&json).unwrap();
        assert_eq!(x, back);
        assert!(json.contains("log10_magnitude"));
    }

    #[test]
    fn formats_huge_values() {
        let x = XInterval::from_ln_float(&Float::with_val(200, 1000), p());
        assert_eq!(x.display_upper(3), "1.98e434");
        assert_eq!(x.display_lower(3), "1.97e434");
        assert_eq!(XInterval::from_int(1234, p()).display_upper(4), "1234");
    }

    #[test]
    fn log_sum_exp_matches_rational_addition() {
        let a = Rational::from((123_456_789, 1000));
        let b = Rational::from((-98_765, 7));
        let sum = XInterval::from_rational(&a, p()) + XInterval::from_rational(&b, p());
        assert!(sum.contains_rational(&(a + b)));
    }

    impl Add for XInterval {
        type Output = XInterval;
        fn add(self, o: XInterval) -> XInterval {
            self.add_interval(&o)
        }
    }

    #[derive(Clone, Debug)]
    enum Expr {
        Lit(i64, i64),
        Add(Box<Expr>, Box<Expr>),
        Sub(Box<Expr>, Box<Expr>),
        Mul(Box<Expr>, Box<Expr>),
        Div(Box<Expr>, Box<Expr>),
    }

    fn expr() -> impl Strategy<Value = Expr> {
        let leaf = (-50i64..50, 1i64..20).prop_map(|(n, d)| Expr::Lit(n, d));
        leaf.prop_recursive(4, 24, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Add(a.into(), b.into())),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Sub(a.into(), b.into())),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Mul(a.into(), b.into())),
                (inner.clone(), inner).prop_map(|(a, b)| Expr::Div(a.into(), b.into())),
            ]
        })
    }

    fn eval(e: &Expr, prec: Precision) -> Option<(Rational, XInterval)> {
        Some(match e {
            Expr::Lit(n, d) => (Rational::from((*n, *d)), XInterval::from_ratio(*n, *d, prec)),
            Expr::Add(a, b) => {
                let (qa, ia) = eval(a, prec)?;
                let (qb, ib) = eval(b, prec)?;
                (qa + qb, &ia + &ib)
            }
            Expr::Sub(a, b) => {
                let (qa, ia) = eval(a, prec)?;
                let (qb, ib) = eval(b, prec)?;
                (qa - qb, &ia - &ib)
            }
            Expr::Mul(a, b) => {
                let (qa, ia) = eval(a, prec)?;
                let (qb, ib) = eval(b, prec)?;
                (qa * qb, &ia * &ib)
            }
            Expr::Div(a, b) => {
                let (qa, ia) = eval(a, prec)?;
                let (qb, ib) = eval(b, prec)?;
                if qb == 0 || ib.contains_zero() {
                    return None;
                }
                (qa / qb, ia.div(&ib).ok()?)
            }
        })
    }

    #[test]
    fn ln_1p_and_exp_m1_keep_tiny_arguments() {
        let t = XInterval::from_ln_float(&Float::with_val(200, -500), p());
        let l = t.ln_1p().unwrap();
        assert!((l.ln_mid_f64() + 500.0).abs() < 1e-12);
        let e = t.exp_m1().unwrap();
        assert!((e.ln_mid_f64() + 500.0).abs() < 1e-12);
        let big = XInterval::from_int(3, p()).exp_m1().unwrap();
        assert!((big.to_f64() - (3f64.exp() - 1.0)).abs() < 1e-12);
        let neg = XInterval::from_ratio(-1, 2, p()).ln_1p().unwrap();
        assert!(!neg.contains_rational(&Rational::new()));
        assert!((neg.to_f64() - 0.5f64.ln()).abs() < 1e-15);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(256))]

        #[test]
        fn random_expressions_are_enclosed(e in expr()) {
            if let Some((q, iv)) = eval(&e, Precision::from_digits(20)) {
                prop_assert!(iv.contains_rational(&q), "{:?} -> {} not in {}", e, q, iv);
            }
        }

        #[test]
        fn wider_precision_never_widens(n in 1i64..10_000, d in 1i64..10_000) {
            let lo = XInterval::from_ratio(n, d, Precision::from_digits(15)).exp().unwrap().ln().unwrap();
            let hi = XInterval::from_ratio(n, d, Precision::from_digits(40)).exp().unwrap().ln().unwrap();
            prop_assert!(hi.log_width().unwrap() <= lo.log_width().unwrap());
        }
    }
}
