//! Mertens-type prime sums `sum_{p <= x} log p / p` and the product
//! `V(z) = prod_{p < z} (1 - 1/p)`.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use rug::float::Round;
use rug::{Float, Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modarith::PrimeStream;
use crate::par::Execution;
use crate::rignum::{Precision, XInterval};

/// Largest cutoff accepted for direct summation.
pub const DIRECT_LIMIT: u64 = 10_000_000_000;

/// Largest `z` for which `V(z)` is kept as an exact fraction.
pub const EXACT_V_LIMIT: u64 = 1_000_000;

const SEGMENT: u64 = 1 << 16;

/// Outward-rounded enclosure of `sum_{p <= n} log p / p`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MertensValue {
    pub cutoff: u64,
    pub value: XInterval,
}

/// Enclosures keyed by cutoff and precision bits.
type Cache = Mutex<HashMap<(u64, u32), (Float, Float)>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn segment_sum(primes: &[u64], bits: u32) -> (Float, Float) {
    let mut lo = Float::new(bits);
    let mut hi = Float::new(bits);
    for &p in primes {
        let pf = Float::with_val(64, p);
        let (l_lo, ord) = Float::with_val_round(bits, pf.ln_ref(), Round::Down);
        let l_hi = if ord == std::cmp::Ordering::Equal {
            l_lo.clone()
        } else {
            let mut u = l_lo.clone();
            u.next_up();
            u
        };
        let (t_lo, _) = Float::with_val_round(bits, &l_lo / &pf, Round::Down);
        let (t_hi, _) = Float::with_val_round(bits, &l_hi / &pf, Round::Up);
        lo.add_assign_round(&t_lo, Round::Down);
        hi.add_assign_round(&t_hi, Round::Up);
    }
    (lo, hi)
}

/// `sum_{p <= n} log p / p`, rounded outward.
pub fn mertens_bar_int(n: u64, prec: Precision, exec: Execution) -> Result<MertensValue> {
    if n > DIRECT_LIMIT {
        return Err(Error::Limit(format!(
            "prime sum cutoff {n} exceeds the direct summation limit {DIRECT_LIMIT}"
        )));
    }
    let bits = prec.bits() + 16;
    if let Some((lo, hi)) = cache().lock().expect("cache lock").get(&(n, bits)).cloned() {
        return Ok(MertensValue {
            cutoff: n,
            value: XInterval::from_float_bounds(&lo, &hi, prec)?,
        });
    }
    let parts = PrimeStream::with_segment(n, SEGMENT).map_segments(exec, |ps| segment_sum(ps, bits));
    let mut lo = Float::new(bits);
    let mut hi = Float::new(bits);
    for (a, b) in parts {
        lo.add_assign_round(&a, Round::Down);
        hi.add_assign_round(&b, Round::Up);
    }
    cache()
        .lock()
        .expect("cache lock")
        .insert((n, bits), (lo.clone(), hi.clone()));
    Ok(MertensValue {
        cutoff: n,
        value: XInterval::from_float_bounds(&lo, &hi, prec)?,
    })
}

/// `sum_{p <= x}` for a real cutoff `x >= 0`.
pub fn mertens_bar(x: f64, prec: Precision, exec: Execution) -> Result<MertensValue> {
    if x.is_nan() || x < 0.0 || !x.is_finite() {
        return Err(Error::Invalid(format!("invalid cutoff {x}")));
    }
    mertens_bar_int(x.floor() as u64, prec, exec)
}

/// `sum_{p <= sqrt(n)}` with the cutoff `floor(sqrt(n))` computed exactly.
pub fn mertens_bar_sqrt(n: &Integer, prec: Precision, exec: Execution) -> Result<MertensValue> {
    let r = Integer::from(n.sqrt_ref());
    let r = r
        .to_u64()
        .ok_or_else(|| Error::Limit("square-root cutoff does not fit in 64 bits".into()))?;
    mertens_bar_int(r, prec, exec)
}

/// `prod_{p < z} (1 - 1/p)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VProduct {
    Exact {
        #[serde(with = "rat_str")]
        value: Rational,
    },
    /// Directed enclosure used once the exact fraction grows too large.
    Enclosure { value: XInterval },
}

impl VProduct {
    pub fn enclosure(&self, prec: Precision) -> XInterval {
        match self {
            VProduct::Exact { value } => XInterval::from_rational(value, prec),
            VProduct::Enclosure { value } => value.clone(),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, VProduct::Exact { .. })
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            VProduct::Exact { value } => value.to_f64(),
            VProduct::Enclosure { value } => value.to_f64(),
        }
    }
}

mod rat_str {
    use rug::Rational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        Rational::from_str_radix(&s, 10).map_err(serde::de::Error::custom)
    }
}

fn product_tree(mut v: Vec<Integer>) -> Integer {
    if v.is_empty() {
        return Integer::from(1);
    }
    while v.len() > 1 {
        let mut next = Vec::with_capacity(v.len() / 2 + 1);
        let mut it = v.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(a * b),
                None => next.push(a),
            }
        }
        v = next;
    }
    v.pop().expect("nonempty")
}

/// `V(z)` for real `z`; the product runs over primes strictly below `z`.
pub fn v_product(z: f64, prec: Precision) -> Result<VProduct> {
    if !z.is_finite() || z < 0.0 {
        return Err(Error::Invalid(format!("invalid z {z}")));
    }
    let top = if z.fract() == 0.0 { z as u64 - 1 } else { z.floor() as u64 };
    let top = if z < 1.0 { 0 } else { top };
    let primes: Vec<u64> = PrimeStream::new(top).collect();
    if top <= EXACT_V_LIMIT {
        let num = product_tree(primes.iter().map(|&p| Integer::from(p - 1)).collect());
        let den = product_tree(primes.iter().map(|&p| Integer::from(p)).collect());
        return Ok(VProduct::Exact {
            value: Rational::from((num, den)),
        });
    }
    // log V = sum log(1 - 1/p), each term enclosed from both sides.
    let bits = prec.bits() + 32;
    let mut lo = Float::new(bits);
    let mut hi = Float::new(bits);
    for &p in &primes {
        let q = Rational::from((p as i64 - 1, p as i64));
        let (a, _) = Float::with_val_round(bits, &q, Round::Down);
        let (b, _) = Float::with_val_round(bits, &q, Round::Up);
        let (la, _) = Float::with_val_round(bits, a.ln_ref(), Round::Down);
        let (lb, _) = Float::with_val_round(bits, b.ln_ref(), Round::Up);
        lo.add_assign_round(&la, Round::Down);
        hi.add_assign_round(&lb, Round::Up);
    }
    let log_iv = XInterval::from_float_bounds(&lo, &hi, prec)?;
    Ok(VProduct::Enclosure {
        value: log_iv.exp()?,
    })
}

trait AddRound {
    fn add_assign_round(&mut self, o: &Float, r: Round);
}

impl AddRound for Float {
    fn add_assign_round(&mut self, o: &Float, r: Round) {
        let (v, _) = Float::with_val_round(self.prec(), &*self + o, r);
        *self = v;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Precision {
        Precision::default()
    }

    #[test]
    fn small_sums() {
        let z = mertens_bar(1.0, p(), Execution::Sequential).unwrap();
        assert!(z.value.contains_rational(&Rational::new()));
        let two = mertens_bar(2.0, p(), Execution::Sequential).unwrap();
        let v = two.value.to_f64();
        assert!((v - 2f64.ln() / 2.0).abs() < 1e-15);
        let d12 = mertens_bar_sqrt(&Integer::from(12), p(), Execution::Sequential).unwrap();
        assert_eq!(d12.cutoff, 3);
        assert!((d12.value.to_f64() - 0.712778).abs() < 1e-6);
    }

    #[test]
    fn sum_matches_f64_and_is_monotone() {
        let exact: f64 = PrimeStream::new(100_000).map(|p| (p as f64).ln() / p as f64).sum();
        let a = mertens_bar_int(100_000, p(), Execution::Parallel).unwrap();
        let b = mertens_bar_int(100_000, p(), Execution::Sequential).unwrap();
        assert_eq!(a.value, b.value);
        assert!((a.value.to_f64() - exact).abs() < 1e-9);
        let c = mertens_bar_int(100_003, p(), Execution::Sequential).unwrap();
        assert!(!c.value.certainly_lt(&a.value));
        let w = a.value.log_width().unwrap();
        assert!(w < 1e-30, "{w}");
    }

    #[test]
    #[allow(clippy::cmp_owned)]
    fn v_product_examples() {
        let v3 = v_product(3.0, p()).unwrap();
        assert!(matches!(&v3, VProduct::Exact { value } if *value == Rational::from((1, 2))));
        let v2 = v_product(2.0, p()).unwrap();
        assert!(matches!(&v2, VProduct::Exact { value } if *value == 1));
        let v10 = v_product(10.0, p()).unwrap();
        assert!(matches!(&v10, VProduct::Exact { value } if *value == Rational::from((8, 35))));
        let v11 = v_product(11.0, p()).unwrap();
        assert!(matches!(&v11, VProduct::Exact { value } if *value == Rational::from((8, 35))));
    }

    #[test]
    fn enclosure_mode_brackets_exact_value() {
        let z = EXACT_V_LIMIT as f64 + 1.5;
        let exact = v_product(EXACT_V_LIMIT as f64 + 0.0, p()).unwrap();
        let approx = v_product(z, p()).unwrap();
        assert!(!approx.is_exact());
        // No primes lie in [limit, limit + 1.5).
        let VProduct::Exact { value } = exact else { panic!() };
        let e = approx.enclosure(p());
        assert!(e.contains_rational(&value), "{} {}", e, value.to_f64());
    }

    #[test]
    fn mertens_envelope_on_v() {
        let gamma = 0.577_215_664_901_532_9_f64;
        for z in [285.0, 1000.0, 12_345.5, 100_000.0] {
            let v = v_product(z, p()).unwrap().to_f64();
            let l = f64::ln(z);
            assert!((v * gamma.exp() * l - 1.0).abs() <= 1.0 / (l * l), "z = {z}");
        }
    }
}
