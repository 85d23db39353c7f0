//! Numerical checks of the prime-sum inequalities that feed the sieve
//! constants, and of the bounds on `W(z)` and `1/G(z)` on small `z`.
//!
//! Left sides are double-precision prefix sums carried with an a-priori
//! rounding bound; right sides are interval enclosures. A case passes only
//! when the whole left enclosure sits strictly inside the bound.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rug::Rational;
use serde::{Deserialize, Serialize};

use super::sift::{g_exact, w_exact};
use crate::error::{Error, Result};
use crate::eulerprod::singular_series;
use crate::modarith::{factorize, RhoTable};
use crate::paperconst::{PolySystem, Regime};
use crate::par::Execution;
use crate::rignum::{Constants, XInterval};
use crate::sievebounds::{conditions_at, z_constants, ParamSource, SieveParams, DEFAULT_K0};
use crate::Ctx;

pub const MAX_PRIME_LIMIT: u64 = 10_000_000;
pub const MAX_TOY_Z: u64 = 1_000;

/// Primes below `limit` with `omega(p) = rho_F(p)` of the product.
#[derive(Clone, Debug)]
pub struct PrimeTable {
    pub limit: u64,
    pub primes: Vec<u64>,
    pub omega: Vec<u64>,
}

impl PrimeTable {
    pub fn build(system: &PolySystem, limit: u64, exec: Execution) -> Result<Self> {
        if !(3..=MAX_PRIME_LIMIT).contains(&limit) {
            return Err(Error::Limit(format!("prime table limit must lie in 3..={MAX_PRIME_LIMIT}")));
        }
        let table = RhoTable::build(&system.product, limit - 1, exec);
        let (primes, omega) = table.entries.into_iter().unzip();
        Ok(PrimeTable { limit, primes, omega })
    }

    /// Index of the first prime `>= t`.
    fn at_least(&self, t: f64) -> usize {
        self.primes.partition_point(|&p| (p as f64) < t)
    }

    /// Index of the first prime `> t`.
    fn above(&self, t: f64) -> usize {
        self.primes.partition_point(|&p| (p as f64) <= t)
    }

    fn g(&self, i: usize) -> f64 {
        let (p, w) = (self.primes[i] as f64, self.omega[i] as f64);
        w / (p - w)
    }
}

/// `[lo, hi]` around a double-precision quantity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Enclosure {
    pub lo: f64,
    pub hi: f64,
}

impl Enclosure {
    fn around(v: f64, err: f64) -> Self {
        // Doubling the radius covers the rounding of `v +- err` itself.
        let r = 2.0 * err + f64::MIN_POSITIVE;
        Enclosure { lo: v - r, hi: v + r }
    }

    fn shift(self, c: f64, err: f64) -> Self {
        let r = 2.0 * err + f64::EPSILON * c.abs();
        Enclosure { lo: self.lo + c - r, hi: self.hi + c + r }
    }

    fn abs(self) -> Self {
        if self.lo >= 0.0 {
            self
        } else if self.hi <= 0.0 {
            Enclosure { lo: -self.hi, hi: -self.lo }
        } else {
            Enclosure { lo: 0.0, hi: self.hi.max(-self.lo) }
        }
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

/// Running sums of a per-prime term, with the absolute sums for the error bound.
struct Prefix {
    sum: Vec<f64>,
    abs: Vec<f64>,
}

impl Prefix {
    fn new(terms: impl Iterator<Item = f64>) -> Self {
        let mut sum = vec![0.0];
        let mut abs = vec![0.0];
        for t in terms {
            sum.push(sum.last().unwrap() + t);
            abs.push(abs.last().unwrap() + t.abs());
        }
        Prefix { sum, abs }
    }

    /// Sum over indices `i..j`. Each prefix carries at most `(j + 16) eps`
    /// relative error against its absolute sum: `j` additions plus a few
    /// ulps in each term.
    fn range(&self, i: usize, j: usize) -> Enclosure {
        if j <= i {
            return Enclosure { lo: 0.0, hi: 0.0 };
        }
        let d = self.sum[j] - self.sum[i];
        let err = (j as f64 + 16.0) * f64::EPSILON * (self.abs[j] + self.abs[i]) + f64::EPSILON * d.abs();
        Enclosure::around(d, err)
    }
}

/// `kappa, A1, A2, L` as used by the inequalities.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LemmaConstants {
    pub label: String,
    pub kappa: u32,
    pub a1: XInterval,
    pub a2: XInterval,
    pub l: XInterval,
}

impl LemmaConstants {
    /// `A1 = deg + 1`, `A2 = L = L_F`.
    pub fn of_system(system: &PolySystem, regime: Regime, ctx: &Ctx) -> Result<Self> {
        let p = ParamSource::system(system.clone(), regime).params(ctx)?;
        Ok(LemmaConstants {
            label: format!("A2 = L = L_F ({})", regime.label()),
            kappa: p.kappa,
            a1: p.a1,
            a2: p.a2,
            l: p.l,
        })
    }

    /// The smallest constants for which the density conditions hold on
    /// every range `2 <= w < z <= limit`. Valid only for statements about
    /// primes below `limit`.
    pub fn empirical(table: &PrimeTable, kappa: u32, ctx: &Ctx) -> Self {
        let prec = ctx.prec;
        let mut a1 = Rational::from(1);
        for (&p, &w) in table.primes.iter().zip(&table.omega) {
            let r = Rational::from((p, p - w));
            if r > a1 {
                a1 = r;
            }
        }
        // A1 must exceed 1 strictly.
        let a1 = XInterval::from_rational(&a1, prec).max(&XInterval::parse("1.000001", prec).expect("literal"));

        // S(t) = sum_{p < t} omega log p / p - kappa log t, sampled at each
        // prime (just before and just after its jump) and at the limit.
        let pre = Prefix::new(
            table
                .primes
                .iter()
                .zip(&table.omega)
                .map(|(&p, &w)| w as f64 * (p as f64).ln() / p as f64),
        );
        let k = kappa as f64;
        let n = table.primes.len();
        let mut points = Vec::with_capacity(2 * n + 1);
        let mut worst_err = 0.0f64;
        for i in 0..n {
            let lp = k * (table.primes[i] as f64).ln();
            for j in [i, i + 1] {
                points.push(pre.sum[j] - lp);
                worst_err = worst_err.max((j as f64 + 16.0) * f64::EPSILON * (pre.abs[j] + lp));
            }
        }
        let ll = k * (table.limit as f64).ln();
        points.push(pre.sum[n] - ll);
        worst_err = worst_err.max((n as f64 + 16.0) * f64::EPSILON * (pre.abs[n] + ll));

        let (mut sup, mut inf) = (0.0f64, 0.0f64);
        let (mut run_min, mut run_max) = (points[0], points[0]);
        for &s in &points[1..] {
            sup = sup.max(s - run_min);
            inf = inf.min(s - run_max);
            run_min = run_min.min(s);
            run_max = run_max.max(s);
        }
        let pad = 4.0 * worst_err + 1e-12;
        let a2 = XInterval::from_f64(sup + pad, prec).expect("finite");
        let l = XInterval::from_f64(-inf + pad, prec).expect("finite");
        LemmaConstants {
            label: format!("empirical on primes below {}", table.limit),
            kappa,
            a1,
            a2,
            l,
        }
    }

    fn sieve_params(&self, lambda: &XInterval) -> Result<SieveParams> {
        SieveParams::new(self.kappa, self.a1.clone(), self.a2.clone(), self.l.clone(), lambda.clone(), DEFAULT_K0)
    }
}

/// One sampled instance of one inequality.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EnvelopeCase {
    pub check: String,
    pub witness: String,
    pub left: Enclosure,
    pub lower: Option<XInterval>,
    pub upper: Option<XInterval>,
    pub pass: bool,
}

impl EnvelopeCase {
    fn new(check: &str, witness: String, left: Enclosure, lower: Option<XInterval>, upper: Option<XInterval>) -> Self {
        let prec = lower.as_ref().or(upper.as_ref()).map(|b| b.precision()).unwrap_or_default();
        let lo_ok = lower
            .as_ref()
            .is_none_or(|b| b.certainly_lt(&XInterval::from_f64(left.lo, prec).expect("finite")));
        let hi_ok = upper
            .as_ref()
            .is_none_or(|b| XInterval::from_f64(left.hi, prec).expect("finite").certainly_lt(b));
        EnvelopeCase {
            check: check.to_string(),
            witness,
            left,
            lower,
            upper,
            pass: lo_ok && hi_ok,
        }
    }

    /// Distance from the left side to the nearest bound, as a fraction of the bound.
    pub fn relative_slack(&self) -> f64 {
        let up = self.upper.as_ref().map(|u| (u.to_f64() - self.left.hi) / u.to_f64().abs());
        let lo = self.lower.as_ref().map(|l| (self.left.lo - l.to_f64()) / l.to_f64().abs());
        match (up, lo) {
            (Some(a), Some(b)) => a.min(b),
            (Some(a), None) | (None, Some(a)) => a,
            _ => f64::INFINITY,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EnvelopeConfig {
    pub limit: u64,
    pub samples: usize,
    pub seed: u64,
}

impl Default for EnvelopeConfig {
    fn default() -> Self {
        EnvelopeConfig { limit: MAX_PRIME_LIMIT, samples: 64, seed: 20_240_901 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckSummary {
    pub check: String,
    pub cases: usize,
    pub failures: usize,
    pub min_relative_slack: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EnvelopeReport {
    pub constants: LemmaConstants,
    pub limit: u64,
    pub summary: Vec<CheckSummary>,
    pub cases: Vec<EnvelopeCase>,
    pub pass: bool,
}

impl EnvelopeReport {
    pub fn failures(&self) -> impl Iterator<Item = &EnvelopeCase> {
        self.cases.iter().filter(|c| !c.pass)
    }
}

pub const CHECK_EQ5: &str = "omega/p window";
pub const CHECK_EXP1: &str = "g(p)/p^s vs kappa/p^(s+1)";
pub const CHECK_EXP2: &str = "sum g^k(p)";
pub const CHECK_EXP3: &str = "sum g omega log p / p <= m1(x, d)";
pub const CHECK_SMALLX: &str = "small-x Nagell sum";
pub const CHECK_LF: &str = "Nagell window <= L_F";

fn log_uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> u64 {
    rng.gen_range(lo.ln()..=hi.ln()).exp().round() as u64
}

/// Samples `(w, z, s, k, x, d)` and checks every inequality on `table`.
pub fn lemma_envelope_checks(
    system: &PolySystem,
    table: &PrimeTable,
    consts: &LemmaConstants,
    cfg: &EnvelopeConfig,
    ctx: &Ctx,
) -> Result<EnvelopeReport> {
    if cfg.limit > table.limit {
        return Err(Error::Invalid(format!("sample limit {} exceeds the prime table", cfg.limit)));
    }
    let k = Constants::new(ctx.prec);
    let kappa = k.int(consts.kappa as i64);
    let kf = consts.kappa as f64;
    let limit = cfg.limit;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let n = table.primes.len();
    let om_p = Prefix::new((0..n).map(|i| table.omega[i] as f64 / table.primes[i] as f64));
    let nagell = Prefix::new((0..n).map(|i| {
        let p = table.primes[i] as f64;
        table.omega[i] as f64 * p.ln() / p
    }));
    let g_om_log = Prefix::new((0..n).map(|i| {
        let p = table.primes[i] as f64;
        table.g(i) * table.omega[i] as f64 * p.ln() / p
    }));
    const S_VALUES: [f64; 3] = [0.0, 0.5, 1.0];
    let g_s: Vec<Prefix> = S_VALUES
        .iter()
        .map(|&s| Prefix::new((0..n).map(|i| table.g(i) / (table.primes[i] as f64).powf(s))))
        .collect();
    let inv_s: Vec<Prefix> = S_VALUES
        .iter()
        .map(|&s| Prefix::new((0..n).map(|i| (table.primes[i] as f64).powf(-(s + 1.0)))))
        .collect();
    const K_VALUES: [i32; 3] = [2, 3, 4];
    let g_k: Vec<Prefix> = K_VALUES
        .iter()
        .map(|&e| Prefix::new((0..n).map(|i| table.g(i).powi(e))))
        .collect();

    let a1a2 = &consts.a1 * &consts.a2;
    let mut cases = Vec::new();

    // Window pairs: fixed ones first, then random.
    let mut windows: Vec<(u64, u64)> = vec![(100, 100), (2, 3), (100, 100_000.min(limit)), (2, limit)];
    for _ in 0..cfg.samples {
        let w = log_uniform(&mut rng, 2.0, limit as f64).clamp(2, limit);
        let z = log_uniform(&mut rng, w as f64, limit as f64).clamp(w, limit);
        windows.push((w, z));
    }

    for &(w, z) in &windows {
        let lw = k.int(w as i64).ln()?;
        let (wf, zf) = (w as f64, z as f64);

        // -L/log w <= sum_{w<=p<z} omega/p - kappa log(log z / log w) <= A2/log w
        let (i, j) = (table.at_least(wf), table.at_least(zf));
        let llr = kf * (zf.ln() / wf.ln()).ln();
        let mid = om_p.range(i, j).shift(-llr, 8.0 * f64::EPSILON * llr.abs());
        cases.push(EnvelopeCase::new(
            CHECK_EQ5,
            format!("w={w}, z={z}"),
            mid,
            Some(consts.l.div(&lw)?.neg_interval()),
            Some(consts.a2.div(&lw)?),
        ));

        // |sum_{w<=p<=z} g/p^s - kappa sum 1/p^(s+1)| <= max{...} + 3 kappa / (2 log^2 w)
        let t = consts.a2.div(&lw)?;
        let first = &t + &(&a1a2.div(&lw)? * &(&kappa + &t));
        let bound = &first.max(&consts.l.div(&lw)?) + &k.int(3 * consts.kappa as i64).div(&(&k.int(2) * &lw.powi(2)?))?;
        let j_incl = table.above(zf);
        for (si, s) in S_VALUES.iter().enumerate() {
            let a = g_s[si].range(i, j_incl);
            let b = inv_s[si].range(i, j_incl);
            let diff = Enclosure { lo: a.lo - kf * b.hi, hi: a.hi - kf * b.lo };
            let diff = Enclosure::around(diff.mid(), 0.5 * (diff.hi - diff.lo) + f64::EPSILON * diff.mid().abs());
            cases.push(EnvelopeCase::new(
                CHECK_EXP1,
                format!("w={w}, z={z}, s={s}"),
                diff.abs(),
                None,
                Some(bound.clone()),
            ));
        }

        // sum_{w<=p<z} g^k <= A1^k A2^(k-1) / log^(k-1) w (kappa + A2/log w)
        if w < z {
            for (ki, &e) in K_VALUES.iter().enumerate() {
                let rhs = &(&consts.a1.powi(e as i64)? * &consts.a2.powi(e as i64 - 1)?).div(&lw.powi(e as i64 - 1)?)?
                    * &(&kappa + &t);
                cases.push(EnvelopeCase::new(
                    CHECK_EXP2,
                    format!("w={w}, z={z}, k={e}"),
                    g_k[ki].range(i, j),
                    None,
                    Some(rhs),
                ));
            }
        }

        // |sum_{w<=p<z} rho log p / p - g log(z/w)| <= L_F
        let gl = kf * (zf / wf).ln();
        let win = nagell.range(i, j).shift(-gl, 8.0 * f64::EPSILON * gl.abs()).abs();
        cases.push(EnvelopeCase::new(
            CHECK_LF,
            format!("w={w}, z={z}"),
            win,
            None,
            Some(consts.a2.max(&consts.l)),
        ));
    }

    // Sum over sqrt(x/d) <= p <= min(x/d, z), p not dividing d.
    let mut triples: Vec<(u64, u64, u64)> = vec![(1_000_000, 1, limit), (1_000, 2, 50)];
    for _ in 0..cfg.samples {
        let d = rng.gen_range(1..=1_000u64);
        let q = log_uniform(&mut rng, 4.0, (limit as f64).powi(2)).max(4);
        let z = log_uniform(&mut rng, 2.0, limit as f64).clamp(2, limit);
        triples.push((q, d, z));
    }
    for &(q, d, z) in &triples {
        let qf = q as f64;
        let lo = qf.sqrt();
        let hi = qf.min(z as f64);
        let (i, j) = (table.at_least(lo), table.above(hi));
        let mut sum = g_om_log.range(i, j);
        for (p, _) in factorize(d) {
            let pf = p as f64;
            if pf >= lo && pf <= hi {
                if let Ok(ix) = table.primes.binary_search(&p) {
                    let t = table.g(ix) * table.omega[ix] as f64 * pf.ln() / pf;
                    sum = sum.shift(-t, 8.0 * f64::EPSILON * t);
                }
            }
        }
        let ell = k.int(q as i64).ln()?.div(&k.int(2))?;
        let t = consts.a2.div(&ell)?;
        let inner = &(&(&kappa * &k.ln2) + &t) + &(&a1a2.div(&ell)? * &(&kappa + &t));
        let m1 = &consts.a2 * &inner;
        cases.push(EnvelopeCase::new(
            CHECK_EXP3,
            format!("x={}, d={d}, z={z}", q as u128 * d as u128),
            sum,
            None,
            Some(m1),
        ));
    }

    // |sum_{p<x} rho log p / p - g log x| <= max{g, deg - 1} log x
    let g = system.g() as i64;
    let factor = k.int(g.max(system.degree() as i64 - 1));
    let mut xs: Vec<u64> = vec![3, 1_000_000.min(limit), limit];
    for _ in 0..cfg.samples {
        xs.push(log_uniform(&mut rng, 3.0, limit as f64).clamp(3, limit));
    }
    for &x in &xs {
        let xf = x as f64;
        let gl = g as f64 * xf.ln();
        let left = nagell.range(0, table.at_least(xf)).shift(-gl, 8.0 * f64::EPSILON * gl).abs();
        cases.push(EnvelopeCase::new(
            CHECK_SMALLX,
            format!("x={x}"),
            left,
            None,
            Some(&factor * &k.int(x as i64).ln()?),
        ));
    }

    let summary = [CHECK_EQ5, CHECK_EXP1, CHECK_EXP2, CHECK_EXP3, CHECK_SMALLX, CHECK_LF]
        .iter()
        .map(|&name| {
            let of: Vec<&EnvelopeCase> = cases.iter().filter(|c| c.check == name).collect();
            CheckSummary {
                check: name.to_string(),
                cases: of.len(),
                failures: of.iter().filter(|c| !c.pass).count(),
                min_relative_slack: of.iter().map(|c| c.relative_slack()).fold(f64::INFINITY, f64::min),
            }
        })
        .collect();
    let pass = cases.iter().all(|c| c.pass);
    Ok(EnvelopeReport {
        constants: consts.clone(),
        limit,
        summary,
        cases,
        pass,
    })
}

/// One inequality on `W(z)` or `1/G(z)` at a single `z`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WgCheck {
    pub check: String,
    pub z: u64,
    pub lambda: Option<String>,
    pub left: XInterval,
    pub right: Option<XInterval>,
    pub pass: bool,
    /// Set when the hypotheses of the statement fail at this `z`.
    pub not_applicable: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WgReport {
    pub constants: LemmaConstants,
    pub checks: Vec<WgCheck>,
    pub pass: bool,
}

fn strict(check: &str, z: u64, lambda: Option<&XInterval>, left: XInterval, right: XInterval) -> WgCheck {
    WgCheck {
        check: check.to_string(),
        z,
        lambda: lambda.map(|l| l.display_lower(6)),
        pass: left.certainly_lt(&right),
        left,
        right: Some(right),
        not_applicable: None,
    }
}

/// Exact `W(z)` and `G(z)` against their explicit bounds for each `z`.
pub fn wg_toy_checks(
    system: &PolySystem,
    consts: &LemmaConstants,
    zs: &[u64],
    lambdas: &[XInterval],
    ctx: &Ctx,
) -> Result<WgReport> {
    let k = Constants::new(ctx.prec);
    let prec = ctx.prec;
    let kappa = consts.kappa as i64;
    let mut checks = Vec::new();
    let mut series: Option<XInterval> = None;
    for &z in zs {
        if !(3..=MAX_TOY_Z).contains(&z) {
            return Err(Error::Limit(format!("toy z must lie in 3..={MAX_TOY_Z}, got {z}")));
        }
        let omega: Vec<(u64, u64)> = crate::modarith::primes_up_to(z - 1)
            .into_iter()
            .map(|p| (p, crate::modarith::rho(&system.product, p)))
            .collect();
        let w = XInterval::from_rational(&w_exact(&omega), prec);
        let g = XInterval::from_rational(&g_exact(&omega, z)?, prec);
        let inv_w = w.recip()?;
        let inv_g = g.recip()?;
        let lz = k.int(z as i64).ln()?;
        let lzk = lz.powi(kappa)?;

        // W(z) <= exp(kappa log log 2 + L / log 2) / log^kappa z
        let up = (&k.ln2.powi(kappa)? * &consts.l.div(&k.ln2)?.exp()?).div(&lzk)?;
        checks.push(strict("W(z) upper bound", z, None, w.clone(), up));

        for lambda in lambdas {
            let p = consts.sieve_params(lambda)?;
            let zc = z_constants(&lz, &p, ctx)?;
            if lambda == &lambdas[0] {
                checks.push(strict("1/W(z) <= m2 log^kappa z", z, None, inv_w.clone(), &zc.m2 * &lzk));
            }
            let m3 = zc.m3.clone().ok_or_else(|| Error::Precondition("m3 needs log z > 0".into()))?;
            checks.push(strict("1/G(z) <= W(z) m3(z, lambda)", z, Some(lambda), inv_g.clone(), &w * &m3));

            // The sharper bound needs the three conditions on z.
            let rep = conditions_at(&lz, Some(lz.clone()), &p, ctx);
            let sharp = rep.clauses[1..].iter().all(|c| c.pass);
            if !sharp || zc.m5.is_none() {
                let why = rep.clauses[1..]
                    .iter()
                    .find(|c| !c.pass)
                    .map(|c| format!("fails {}", c.name))
                    .unwrap_or_else(|| "m5 undefined".into());
                checks.push(WgCheck {
                    check: "1/G(z) sharp bound".into(),
                    z,
                    lambda: Some(lambda.display_lower(6)),
                    left: inv_g.clone(),
                    right: None,
                    pass: true,
                    not_applicable: Some(why),
                });
                continue;
            }
            if series.is_none() {
                let s = singular_series(system, consts.kappa, 1_000_000, Regime::Unconditional, ctx)?;
                series = Some(s.value);
            }
            let s = series.as_ref().expect("just set");
            let m5 = zc.m5.as_ref().expect("checked");
            let right = &(&k.factorial(consts.kappa).div(&lzk)? * &(&XInterval::one(prec) + &m5.div(&lz)?)) * s;
            checks.push(strict("1/G(z) sharp bound", z, Some(lambda), inv_g.clone(), right));
        }
    }
    let pass = checks.iter().all(|c| c.pass);
    Ok(WgReport {
        constants: consts.clone(),
        checks,
        pass,
    })
}
