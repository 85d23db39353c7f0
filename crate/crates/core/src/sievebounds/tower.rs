use serde::{Deserialize, Serialize};

use super::SieveParams;
use crate::error::{Error, Result};
use crate::rignum::{Constants, XInterval};
use crate::Ctx;

/// `m0(w)`, given `log w`. Needs `log w > A1 A2` for the geometric tail.
pub fn m0(lw: &XInterval, p: &SieveParams, k: &Constants) -> Result<XInterval> {
    let a1a2 = p.a1a2();
    if !lw.certainly_gt(&a1a2) {
        return Err(Error::Precondition(
            "log w must exceed A1*A2 (below convergence threshold of m0)".into(),
        ));
    }
    let kappa = k.int(p.kappa as i64);
    let t = p.a2.div(lw)?;
    let q = a1a2.div(lw)?;
    let branch1 = &t + &(&q * &(&kappa + &t));
    let max_term = branch1.max(&p.l.div(lw)?);
    let sq = &k.int(3 * p.kappa as i64).div(&k.int(2))?.div(&lw.powi(2)?)?;
    // log(w/(w-1)) = -log(1 - 1/w)
    let inv_w = lw.neg_interval().exp()?;
    let log_ratio = inv_w.neg_interval().ln_1p()?.neg_interval();
    let mut series = XInterval::zero(k.prec);
    for j in 2..=p.k0 {
        series = &series + &q.powi(j as i64 - 2)?.div(&k.int(j as i64))?;
    }
    let one = XInterval::one(k.prec);
    let tail = q
        .powi(p.k0 as i64 - 1)?
        .div(&(&k.int(p.k0 as i64 + 1) * &(&one - &q)))?;
    series = &series + &tail;
    let lead = &(&p.a1.powi(2)? * &p.a2).div(lw)? * &(&kappa + &t);
    Ok(&(&(&max_term + sq) + &(&kappa * &log_ratio)) + &(&lead * &series))
}

/// `m0_hat(z) = log z ((1 + 1/log^2 z)^kappa (1 + m0 e^m0) - 1)`.
pub fn m0_hat(lz: &XInterval, p: &SieveParams, k: &Constants) -> Result<XInterval> {
    let m = m0(lz, p, k)?;
    let inner = (&m * &m.exp()?).ln_1p()?;
    let tiny = lz.powi(2)?.recip()?.ln_1p()?;
    let s = &(&k.int(p.kappa as i64) * &tiny) + &inner;
    Ok(lz * &s.exp_m1()?)
}

/// `m1(x, d)` given `ell = log sqrt(x/d)`.
pub fn m1(ell: &XInterval, p: &SieveParams, k: &Constants) -> Result<XInterval> {
    let kappa = k.int(p.kappa as i64);
    let t = p.a2.div(ell)?;
    let inner = &(&(&kappa * &k.ln2) + &t) + &(&p.a1a2().div(ell)? * &(&kappa + &t));
    Ok(&p.a2 * &inner)
}

/// Every constant of the sieve at `z = z0`, where `z0^2 = X / log^(4 kappa + 1) X`.
/// Entries are `None` outside their domain.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SieveConstants {
    pub log_x: XInterval,
    pub log_log_x: XInterval,
    pub log_z0: XInterval,
    pub m0: Option<XInterval>,
    /// `m0` at several truncation points, to show the choice of `k0` is immaterial.
    pub m0_by_k0: Vec<(u32, XInterval)>,
    pub m0_hat: Option<XInterval>,
    pub m1: XInterval,
    pub r: Option<XInterval>,
    pub m2: XInterval,
    pub m3: Option<XInterval>,
    pub m4: XInterval,
    pub m5: Option<XInterval>,
    pub m5_branch1: Option<XInterval>,
    pub m5_branch2: Option<XInterval>,
    pub m6: Option<XInterval>,
    pub m7: Option<XInterval>,
    pub m8: Option<XInterval>,
    pub m9: Option<XInterval>,
}

/// `log z0` from `log X`.
pub fn log_z0(log_x: &XInterval, kappa: u32, k: &Constants) -> Result<(XInterval, XInterval)> {
    if !log_x.certainly_gt(&k.int(1)) {
        return Err(Error::Invalid("log X must exceed 1".into()));
    }
    let llx = log_x.ln()?;
    let lz = (log_x - &(&k.int(4 * kappa as i64 + 1) * &llx)).div(&k.int(2))?;
    Ok((llx, lz))
}

/// `r(z) = (A2 + m1(1, 1/2)) / log z`.
pub fn r_of(lz: &XInterval, p: &SieveParams, k: &Constants) -> Result<(XInterval, XInterval)> {
    let ell = k.ln2.div(&k.int(2))?;
    let m1v = m1(&ell, p, k)?;
    let r = (&p.a2 + &m1v).div(lz)?;
    Ok((m1v, r))
}

/// The constants that depend on `z` alone, before `X` enters.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ZConstants {
    pub log_z: XInterval,
    pub m0: Option<XInterval>,
    pub m0_by_k0: Vec<(u32, XInterval)>,
    pub m0_hat: Option<XInterval>,
    pub m1: XInterval,
    pub r: Option<XInterval>,
    pub m2: XInterval,
    pub m3: Option<XInterval>,
    pub m4: XInterval,
    pub m5: Option<XInterval>,
    pub m5_branch1: Option<XInterval>,
    pub m5_branch2: Option<XInterval>,
    pub m6: Option<XInterval>,
    pub m7: Option<XInterval>,
}

pub fn z_constants(lz: &XInterval, p: &SieveParams, ctx: &Ctx) -> Result<ZConstants> {
    let k = Constants::new(ctx.prec);
    let one = k.int(1);
    let kappa = k.int(p.kappa as i64);
    let lz = lz.clone();
    let lz_pos = lz.is_positive();

    let m0v = m0(&lz, p, &k).ok();
    let m0_by_k0 = [2u32, 10, 50]
        .iter()
        .filter_map(|&k0| {
            let q = SieveParams { k0, ..p.clone() };
            m0(&lz, &q, &k).ok().map(|v| (k0, v))
        })
        .collect();
    let m0h = m0_hat(&lz, p, &k).ok();

    let (m1v, r) = if lz_pos {
        let (a, b) = r_of(&lz, p, &k)?;
        (a, Some(b))
    } else {
        let ell = k.ln2.div(&k.int(2))?;
        (m1(&ell, p, &k)?, None)
    };

    let expo = &p.a2.div(&k.ln2)? * &(&(&one + &(&p.a1 * &kappa)) + &p.a1a2().div(&k.ln2)?);
    let m2 = expo.exp()?.div(&k.ln2.powi(p.kappa as i64)?)?;
    let m4 = &(&(&k.int(2 * p.kappa as i64) * &k.e) + &(&p.a2 * &k.e).div(&k.ln2)?) + &k.ln2;
    let m3 = if lz_pos {
        let lam_term = &(&k.int(2 * p.kappa as i64).div(&p.lambda)? + &p.a2.div(&lz)?) * &p.lambda.exp()?;
        let arg = &(&(&expo + &p.l.div(&k.ln2)?) - &p.lambda) + &lam_term;
        Some(&one + &(&(&k.int(2) * &m4.powi(p.kappa as i64)?) * &arg.exp()?))
    } else {
        None
    };

    let gamma_fact = k.factorial(p.kappa);
    let egam = (&kappa * &k.gamma).exp()?;

    let (m6, m7) = match &r {
        Some(r) if r.certainly_lt(&one) => {
            let s = r.div(&(&one - r))?;
            let m7 = (&k.int(p.kappa as i64 + 1) * &s).exp_m1()?.div(&lz)?;
            let m6 = &(&(&s * &lz) + &m7) + &(&m7 * &s);
            (Some(m6), Some(m7))
        }
        _ => (None, None),
    };
    let branch1 = match (&m0h, &m3) {
        (Some(h), Some(m3)) => {
            let f = m3.div(&(&egam * &gamma_fact))?;
            let g = &f * &(&one + &h.div(&lz)?);
            Some(&lz * &(&g - &one))
        }
        _ => None,
    };
    let branch2 = match &m6 {
        Some(m6) => Some(m6.div(&(&one + &m6.div(&lz)?))?),
        None => None,
    };
    let m5 = match (&branch1, &branch2) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (Some(a), None) => Some(a.clone()),
        (None, Some(b)) => Some(b.clone()),
        (None, None) => None,
    };

    Ok(ZConstants {
        log_z: lz,
        m0: m0v,
        m0_by_k0,
        m0_hat: m0h,
        m1: m1v,
        r,
        m2,
        m3,
        m4,
        m5,
        m5_branch1: branch1,
        m5_branch2: branch2,
        m6,
        m7,
    })
}

pub fn sieve_tower(log_x: &XInterval, p: &SieveParams, ctx: &Ctx) -> Result<SieveConstants> {
    let k = Constants::new(ctx.prec);
    let one = k.int(1);
    let (llx, lz) = log_z0(log_x, p.kappa, &k)?;
    let zc = z_constants(&lz, p, ctx)?;
    let gamma_fact = k.factorial(p.kappa);
    let egam = (&k.int(p.kappa as i64) * &k.gamma).exp()?;
    let (m0h, m2, m5) = (&zc.m0_hat, &zc.m2, &zc.m5);

    let four_k1 = k.int(4 * p.kappa as i64 + 1);
    let den = &one - &(&four_k1 * &llx).div(log_x)?;
    let m9 = if den.is_positive() { Some(four_k1.div(&den)?) } else { None };
    let m8 = match (m5, m0h, den.is_positive()) {
        (Some(m5), Some(h), true) => {
            let first = (&k.int(2) * m5).div(&den)?;
            let pow2 = k.int(2).powi(-4 * p.kappa as i64)?;
            let second = (&pow2 * &m2.powi(4)?).div(&(&gamma_fact * &egam))?;
            let second = &second * &(&one + &h.div(&lz)?);
            Some(&first + &second)
        }
        _ => None,
    };

    Ok(SieveConstants {
        log_x: log_x.clone(),
        log_log_x: llx,
        log_z0: lz,
        m0: zc.m0,
        m0_by_k0: zc.m0_by_k0,
        m0_hat: zc.m0_hat,
        m1: zc.m1,
        r: zc.r,
        m2: zc.m2,
        m3: zc.m3,
        m4: zc.m4,
        m5: zc.m5,
        m5_branch1: zc.m5_branch1,
        m5_branch2: zc.m5_branch2,
        m6: zc.m6,
        m7: zc.m7,
        m8,
        m9,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rignum::Precision;

    fn params(kappa: u32, a1: i64, a2: i64, l: i64, k0: u32) -> SieveParams {
        let p = Precision::default();
        SieveParams::new(
            kappa,
            XInterval::from_int(a1, p),
            XInterval::from_int(a2, p),
            XInterval::from_int(l, p),
            XInterval::from_int(2 * kappa as i64, p),
            k0,
        )
        .unwrap()
    }

    /// Straight-line f64 transcription of `m0`, written independently of
    /// the interval version.
    fn m0_f64(lw: f64, kappa: f64, a1: f64, a2: f64, l: f64, k0: u32) -> f64 {
        let first = (a2 / lw + a1 * a2 / lw * (kappa + a2 / lw)).max(l / lw);
        let second = 3.0 * kappa / (2.0 * lw * lw);
        let w = lw.exp();
        let third = kappa * (w / (w - 1.0)).ln();
        let mut s = 0.0;
        for k in 2..=k0 {
            s += (a1 * a2).powi(k as i32 - 2) / (k as f64 * lw.powi(k as i32 - 2));
        }
        s += (a1 * a2).powi(k0 as i32 - 1) / lw.powi(k0 as i32 - 1) / ((k0 as f64 + 1.0) * (1.0 - a1 * a2 / lw));
        first + second + third + a1 * a1 * a2 / lw * (kappa + a2 / lw) * s
    }

    #[test]
    fn m0_matches_second_transcription() {
        let p = params(1, 2, 1, 1, 2);
        let k = Constants::new(p.precision());
        let v = m0(&k.int(10), &p, &k).unwrap();
        let want = m0_f64(10.0, 1.0, 2.0, 1.0, 1.0, 2);
        assert!((v.to_f64() / want - 1.0).abs() < 1e-14, "{} vs {want}", v.to_f64());
        let p = params(2, 3, 1, 2, 10);
        let v = m0(&k.int(7), &p, &k).unwrap();
        let want = m0_f64(7.0, 2.0, 3.0, 1.0, 2.0, 10);
        assert!((v.to_f64() / want - 1.0).abs() < 1e-13);
    }

    #[test]
    fn m0_needs_log_w_above_threshold() {
        let p = params(1, 2, 5, 5, 10);
        let k = Constants::new(p.precision());
        assert!(matches!(m0(&k.int(10), &p, &k), Err(Error::Precondition(_))));
    }

    #[test]
    fn m0_vanishes_for_huge_w() {
        let p = params(1, 3, 7, 7, 10);
        let k = Constants::new(p.precision());
        let lw = &k.int(10_000_000_000) * &p.a1a2();
        let v = m0(&lw, &p, &k).unwrap();
        assert!(v.to_f64() < 1e-8);
        let h = m0_hat(&lw, &p, &k).unwrap();
        assert!(h.div(&lw).unwrap().to_f64() < 1e-8);
    }

    #[test]
    fn first_branch_dominates_when_l_equals_a2() {
        let p = params(1, 3, 4, 4, 10);
        let k = Constants::new(p.precision());
        let lw = k.int(100);
        let t = p.a2.div(&lw).unwrap();
        let b1 = &t + &(&p.a1a2().div(&lw).unwrap() * &(&k.int(1) + &t));
        assert!(b1.certainly_gt(&p.l.div(&lw).unwrap()));
    }

    #[test]
    fn m4_and_m9_examples() {
        let p = params(1, 2, 1, 1, 10);
        let ctx = Ctx::default();
        let k = Constants::new(ctx.prec);
        let t = sieve_tower(&XInterval::parse("1e12", ctx.prec).unwrap(), &p, &ctx).unwrap();
        let e = std::f64::consts::E;
        let l2 = std::f64::consts::LN_2;
        assert!((t.m4.to_f64() - (2.0 * e + e / l2 + l2)).abs() < 1e-12);
        assert!((t.m4.to_f64() - 10.05).abs() < 0.01);
        let huge = sieve_tower(&XInterval::parse("1e300", ctx.prec).unwrap(), &p, &ctx).unwrap();
        assert!((huge.m9.unwrap().to_f64() - 5.0).abs() < 1e-290 + 1e-12);
        // m2 formula
        let m2 = (1.0 / l2) * ((1.0 / l2) * (1.0 + 2.0 + 2.0 / l2)).exp();
        assert!((t.m2.to_f64() / m2 - 1.0).abs() < 1e-13);
        let _ = k;
    }

    #[test]
    fn m5_is_the_smaller_branch() {
        let p = params(1, 3, 1, 1, 10);
        let ctx = Ctx::default();
        let t = sieve_tower(&XInterval::parse("1e6", ctx.prec).unwrap(), &p, &ctx).unwrap();
        let (b1, b2, m5) = (t.m5_branch1.unwrap(), t.m5_branch2.unwrap(), t.m5.unwrap());
        assert!(m5.hi().cmp_value(b1.hi()).is_le());
        assert!(m5.hi().cmp_value(b2.hi()).is_le());
    }
}
