//! Singular-series Euler products `prod_p (1 - rho(p)/p) (1 - 1/p)^(-kappa)`
//! and the accelerated twin-prime-type constant.

use rug::float::Round;
use rug::{Float, Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modarith::{primes_up_to, rho, PrimeStream};
use crate::paperconst::{lf, PolySystem, Regime};
use crate::rignum::{Precision, XInterval};
use crate::sievebounds::SieveParams;
use crate::Ctx;

/// Largest cutoff accepted by [`singular_series`].
pub const MAX_CUTOFF: u64 = 1_000_000_000;

/// How the primes above the cutoff were accounted for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailMethod {
    /// `rho(p) = kappa` for every `p` above the cutoff, so each remaining
    /// factor is `1 + O(1/p^2)`.
    ConstantDensity,
    /// Partial summation against the density condition with constants
    /// `A2 = L = L_F`; rigorous but wide.
    PartialSummation,
    /// Prime-zeta acceleration with explicit series tails.
    Accelerated,
}

/// Enclosure of an infinite Euler product.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProductInterval {
    pub value: XInterval,
    pub cutoff: u64,
    pub method: TailMethod,
    /// Product over `p <= cutoff` only.
    pub truncated: XInterval,
    /// Bound on `|log(value / truncated)|`.
    pub tail_bound: XInterval,
    /// Narrow enclosure that assumes the first-order terms of the tail
    /// cancel; informational when `method` is `PartialSummation`.
    pub heuristic: Option<XInterval>,
    pub regime: Option<Regime>,
}

impl ProductInterval {
    /// `hi / lo - 1`.
    pub fn relative_width(&self) -> f64 {
        self.value.log_width().map(f64::exp_m1).unwrap_or(f64::INFINITY)
    }

    pub fn heuristic_or_value(&self) -> &XInterval {
        self.heuristic.as_ref().unwrap_or(&self.value)
    }
}

fn symmetric(t: &XInterval) -> XInterval {
    t.neg_interval().hull(t)
}

/// Directed enclosure of `sum_{p in primes} log(1 - w(p)/p) - kappa log(1 - 1/p)`.
fn log_sum(primes: &[u64], w: impl Fn(u64) -> u64, kappa: u32, bits: u32) -> std::result::Result<(Float, Float), u64> {
    let mut lo = Float::new(bits);
    let mut hi = Float::new(bits);
    for &p in primes {
        let wp = w(p);
        if wp >= p {
            return Err(p);
        }
        for (acc, r) in [(&mut lo, Round::Down), (&mut hi, Round::Up)] {
            let a = Rational::from((p - wp, p));
            let b = Rational::from((p - 1, p));
            // log(1 - w/p) rounded toward r; -kappa log(1 - 1/p) also toward r.
            let (fa, _) = Float::with_val_round(bits, &a, r);
            let (la, _) = Float::with_val_round(bits, fa.ln_ref(), r);
            let opp = if r == Round::Down { Round::Up } else { Round::Down };
            let (fb, _) = Float::with_val_round(bits, &b, opp);
            let (lb, _) = Float::with_val_round(bits, fb.ln_ref(), opp);
            let (kb, _) = Float::with_val_round(bits, &lb * kappa, opp);
            let (t, _) = Float::with_val_round(bits, &la - &kb, r);
            let (s, _) = Float::with_val_round(bits, &*acc + &t, r);
            *acc = s;
        }
    }
    Ok((lo, hi))
}

/// The singular series of `system` with `omega = rho` of its product.
/// For the shifted problem pass the system that already contains `k`.
pub fn singular_series(
    system: &PolySystem,
    kappa: u32,
    cutoff: u64,
    regime: Regime,
    ctx: &Ctx,
) -> Result<ProductInterval> {
    if cutoff > MAX_CUTOFF {
        return Err(Error::Limit(format!("Euler product cutoff {cutoff} exceeds {MAX_CUTOFF}")));
    }
    if cutoff < 3 {
        return Err(Error::Invalid("Euler product cutoff must be at least 3".into()));
    }
    if kappa != system.g() {
        return Err(Error::Invalid(format!(
            "kappa = {kappa} differs from the number of factors {}; the product would diverge",
            system.g()
        )));
    }
    let prec = ctx.prec;
    let bits = prec.bits() + 32;
    let f = &system.product;
    let parts = PrimeStream::new(cutoff).map_segments(ctx.exec, |ps| log_sum(ps, |p| rho(f, p), kappa, bits));
    let mut lo = Float::new(bits);
    let mut hi = Float::new(bits);
    for part in parts {
        let (a, b) = part.map_err(|p| Error::FixedDivisor(format!("rho({p}) = {p} for {f}")))?;
        lo = Float::with_val_round(bits, &lo + &a, Round::Down).0;
        hi = Float::with_val_round(bits, &hi + &b, Round::Up).0;
    }
    let log_trunc = XInterval::from_float_bounds(&lo, &hi, prec)?;
    let truncated = log_trunc.exp()?;

    let k = |n: i64| XInterval::from_int(n, prec);
    let d = system.degree() as i64;
    let pc = k(cutoff as i64);
    // sum_{p > P} 1/p^2 < 1/P; second-order remainder of each log factor.
    let second = k(d * d + kappa as i64).div(&(&k(2) * &(&pc - &k(d))))?;

    let lead_disc = f.leading().clone().abs() * &system.product_disc.abs_disc;
    let all_linear = system.factors.iter().all(|g| g.degree() == 1);
    let (method, tail) = if all_linear && lead_disc < cutoff {
        (TailMethod::ConstantDensity, second.clone())
    } else {
        // |sum_{P < p <= t} (kappa - rho(p)) log p / p| <= B for all t, so
        // partial summation bounds the first-order tail by B / log P.
        let rep = lf(system, regime, ctx)?;
        let log_p = pc.ln()?;
        let b = &k(kappa as i64).div(&log_p)? + &rep.value;
        (TailMethod::PartialSummation, &b.div(&log_p)? + &second)
    };
    let value = (&log_trunc + &symmetric(&tail)).exp()?;
    let heuristic = if method == TailMethod::PartialSummation {
        let dk = d + kappa as i64;
        let h = k(dk * dk).div(&k(cutoff as i64 - 1))?;
        Some((&log_trunc + &symmetric(&h)).exp()?)
    } else {
        None
    };
    Ok(ProductInterval {
        value,
        cutoff,
        method,
        truncated,
        tail_bound: tail,
        heuristic,
        regime: (method == TailMethod::PartialSummation).then_some(regime),
    })
}

/// `exp(-A1 A2 (1 + kappa + A2))`, a lower bound for every singular series
/// satisfying the density conditions.
pub fn product_lower_bound(p: &SieveParams) -> Result<XInterval> {
    let prec = p.precision();
    let one = XInterval::one(prec);
    let kappa = XInterval::from_int(p.kappa as i64, prec);
    let e = &p.a1a2() * &(&(&one + &kappa) + &p.a2);
    let v = e.neg_interval().exp()?;
    // Only the lower endpoint is meaningful as a bound.
    Ok(XInterval::exact(v.lo()))
}

/// Bernoulli numbers `B_0..=B_n` as exact rationals.
pub fn bernoulli(n: usize) -> Vec<Rational> {
    let mut b: Vec<Rational> = Vec::with_capacity(n + 1);
    b.push(Rational::from(1));
    for m in 1..=n {
        let mut s = Rational::new();
        let mut binom = Integer::from(1);
        for (j, bj) in b.iter().enumerate() {
            s += Rational::from(&binom * bj.numer()) / bj.denom();
            binom = binom * (m + 1 - j) as u64 / (j + 1) as u64;
        }
        b.push(-s / (m as u64 + 1));
    }
    b
}

/// `zeta(s)` for an integer `s >= 2` as an exact-rational enclosure from
/// Euler-Maclaurin summation; returns `(center, radius)`.
pub fn zeta_em(s: u32, bern: &[Rational]) -> (Rational, Rational) {
    assert!(s >= 2);
    let terms = (bern.len() - 1) / 2 - 1;
    let n = Integer::from(s as u64 + 2 * terms as u64);
    let mut sum = Rational::new();
    let mut i = Integer::from(1);
    while i < n {
        sum += Rational::from((Integer::from(1), i.pow_ref_u(s)));
        i += 1;
    }
    let ns = n.pow_ref_u(s);
    sum += Rational::from((n.clone(), ns.clone() * (s - 1)));
    sum += Rational::from((Integer::from(1), ns.clone() * 2u32));
    // s (s+1) ... (s + 2j - 2) N^{-s-2j+1} B_{2j} / (2j)!
    let mut rising = Integer::from(s);
    let mut npow = Integer::from(&ns * &n);
    let mut fact = Integer::from(2);
    for j in 1..=terms {
        sum += em_term(&bern[2 * j], &rising, &fact, &npow);
        rising *= (s + 2 * j as u32 - 1) as u64;
        rising *= (s + 2 * j as u32) as u64;
        npow *= &n;
        npow *= &n;
        fact *= (2 * j + 1) as u64;
        fact *= (2 * j + 2) as u64;
    }
    let j = terms + 1;
    let rad = em_term(&bern[2 * j], &rising, &fact, &npow).abs();
    (sum, rad)
}

fn em_term(b: &Rational, rising: &Integer, fact: &Integer, npow: &Integer) -> Rational {
    let num = Integer::from(b.numer() * rising);
    let den = Integer::from(b.denom() * fact) * npow;
    Rational::from((num, den))
}

trait PowRefU {
    fn pow_ref_u(&self, e: u32) -> Integer;
}

impl PowRefU for Integer {
    fn pow_ref_u(&self, e: u32) -> Integer {
        Integer::from(rug::ops::Pow::pow(self, e))
    }
}

fn mobius(n: u64) -> i32 {
    let mut m = n;
    let mut res = 1;
    let mut q = 2;
    while q * q <= m {
        if m.is_multiple_of(q) {
            m /= q;
            if m.is_multiple_of(q) {
                return 0;
            }
            res = -res;
        }
        q += 1;
    }
    if m > 1 {
        res = -res;
    }
    res
}

/// Enclosure of `sum_{p > n0} p^(-s)`-free zeta: `zeta(s) prod_{p <= n0} (1 - p^-s) - 1`.
fn zeta_n_minus_one(s: u32, small: &[u64], bern: &[Rational]) -> (Rational, Rational) {
    let (c, r) = zeta_em(s, bern);
    let mut pr = Rational::from(1);
    for &p in small {
        let ps = Integer::from(p).pow_ref_u(s);
        pr *= Rational::from((ps.clone() - 1u32, ps));
    }
    let lo = Rational::from(&c - &r) * &pr - 1u32;
    let hi = Rational::from(&c + &r) * &pr - 1u32;
    (lo, hi)
}

fn interval_from(lo: &Rational, hi: &Rational, prec: Precision) -> XInterval {
    XInterval::from_rational(lo, prec).hull(&XInterval::from_rational(hi, prec))
}

/// `prod_{p > 2} (1 - 1/(p-1)^2)`, enclosed to width about `10^-digits`.
///
/// Primes up to `N = 50` are handled directly. Above that,
/// `log(1 - 1/(p-1)^2) = -sum_k (2^k - 2)/k p^-k` and
/// `sum_{p > N} p^-s = sum_n mu(n)/n log zeta_N(n s)`.
pub fn twin_constant_accelerated(digits: u32) -> Result<ProductInterval> {
    if digits > 30 {
        return Err(Error::Limit(format!("at most 30 digits are implemented, asked for {digits}")));
    }
    let n0: u64 = 50;
    let prec = Precision::from_digits(digits + 25);
    let eps = Rational::from((Integer::from(1), Integer::from(10u32).pow_ref_u(digits + 4)));
    let small = primes_up_to(n0);
    let bern = bernoulli(64);

    let mut direct = Rational::from(1);
    for &p in small.iter().filter(|&&p| p > 2) {
        direct *= Rational::from((p * (p - 2), (p - 1) * (p - 1)));
    }
    let log_direct = XInterval::from_rational(&direct, prec).ln()?;

    // Tail over k: 0 <= P_N(k) <= N^(1-k)/(k-1), so
    // sum_{k > K} (2^k - 2)/k P_N(k) <= N (2/N)^(K+1) / (1 - 2/N).
    let ratio = Rational::from((2, n0));
    let geo = Rational::from((n0, n0 - 2)) * n0;
    let mut big_k = 2u32;
    while (&geo * ratio.clone().pow_ref_r(big_k + 1)) > eps {
        big_k += 1;
    }
    let k_tail = &geo * ratio.clone().pow_ref_r(big_k + 1);

    let mut acc = XInterval::zero(prec);
    let mut n_tail_total = Rational::new();
    for k in 2..=big_k {
        let coef = Rational::from(((Integer::from(1) << k) - 2u32, Integer::from(k)));
        // Truncate the Moebius sum once N^(1-(n+1)k) / (1 - N^-k) is below eps 2^-k / K.
        let target = Rational::from(&eps / &coef) / big_k;
        let mut pk = XInterval::zero(prec);
        let mut n = 1u64;
        loop {
            let mu = mobius(n);
            if mu != 0 {
                let (lo, hi) = zeta_n_minus_one(k * n as u32, &small, &bern);
                let lz = interval_from(&lo, &hi, prec).ln_1p()?;
                let w = lz.div(&XInterval::from_int(n as i64, prec))?;
                pk = if mu > 0 { &pk + &w } else { &pk - &w };
            }
            let s_next = (n as u32 + 1) * k;
            let nn = Integer::from(n0);
            let bound = Rational::from((nn.clone(), nn.pow_ref_u(s_next))) * Rational::from((nn.pow_ref_u(k), nn.pow_ref_u(k) - 1u32));
            if bound < target {
                n_tail_total += Rational::from(&bound * &coef);
                break;
            }
            n += 1;
        }
        acc = &acc + &(&XInterval::from_rational(&coef, prec) * &pk);
    }
    let n_tail = XInterval::from_rational(&n_tail_total, prec);
    let k_tail_iv = XInterval::from_rational(&k_tail, prec);
    let log_c = &(&log_direct - &acc) + &symmetric(&n_tail);
    // The k-tail only lowers the logarithm.
    let log_c = log_c.hull(&(&log_c - &k_tail_iv));
    let value = log_c.exp()?;
    Ok(ProductInterval {
        value,
        cutoff: n0,
        method: TailMethod::Accelerated,
        truncated: XInterval::from_rational(&direct, prec),
        tail_bound: &n_tail + &k_tail_iv,
        heuristic: None,
        regime: None,
    })
}

trait PowRefR {
    fn pow_ref_r(self, e: u32) -> Rational;
}

impl PowRefR for Rational {
    fn pow_ref_r(self, e: u32) -> Rational {
        rug::ops::Pow::pow(self, e)
    }
}

/// Direct product `prod_{2 < p <= P} (1 - 1/(p-1)^2)` with its rigorous
/// tail, used to cross-check the accelerated value.
pub fn twin_constant_direct(cutoff: u64, ctx: &Ctx) -> Result<ProductInterval> {
    let prec = ctx.prec;
    let bits = prec.bits() + 32;
    let parts = PrimeStream::new(cutoff).map_segments(ctx.exec, |ps| {
        let odd: Vec<u64> = ps.iter().copied().filter(|&p| p > 2).collect();
        log_sum(&odd, |_| 2, 2, bits)
    });
    let mut lo = Float::new(bits);
    let mut hi = Float::new(bits);
    for part in parts {
        let (a, b) = part.map_err(|p| Error::FixedDivisor(p.to_string()))?;
        lo = Float::with_val_round(bits, &lo + &a, Round::Down).0;
        hi = Float::with_val_round(bits, &hi + &b, Round::Up).0;
    }
    let log_trunc = XInterval::from_float_bounds(&lo, &hi, prec)?;
    // |log(1 - 1/(p-1)^2)| <= 2/p^2 for p >= 3, and sum_{p > P} 1/p^2 < 1/P.
    let tail = XInterval::from_ratio(2, cutoff as i64, prec);
    let value = log_trunc.hull(&(&log_trunc - &tail)).exp()?;
    Ok(ProductInterval {
        value,
        cutoff,
        method: TailMethod::ConstantDensity,
        truncated: log_trunc.exp()?,
        tail_bound: tail,
        heuristic: None,
        regime: None,
    })
}
