//! Polynomial-specific constants: the Nagell-type sum constant `Q_F` and
//! the admissible `L_F` for a system of polynomials.

use rug::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mertens::{mertens_bar_int, mertens_bar_sqrt};
use crate::modarith::{rho, PrimeStream};
use crate::polyalg::{
    fixed_divisor_check, int_str, irreducibility_certificate, DiscriminantData, IntPolynomial,
    Irreducibility,
};
use crate::rignum::{Constants, XInterval};
use crate::Ctx;

/// Primes tried when certifying irreducibility.
pub const IRREDUCIBILITY_BUDGET: u64 = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Unconditional,
    Grh,
}

impl Regime {
    pub fn label(self) -> &'static str {
        match self {
            Regime::Unconditional => "unconditional",
            Regime::Grh => "GRH (conditional)",
        }
    }
}

/// Every intermediate of `Q_F` for one irreducible polynomial.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QfConstants {
    pub poly: IntPolynomial,
    pub d: u32,
    pub disc: DiscriminantData,
    /// `(pi/4)^d d^(2d) / (d!)^2`
    pub mfrak: XInterval,
    /// Absent for `d = 1`, where the printed formula divides by `d - 1`.
    pub lambda_k: Option<XInterval>,
    pub big_lambda: XInterval,
    pub c_f: Option<XInterval>,
    pub mbar_c: XInterval,
    pub mbar_sqrt_d: XInterval,
    pub q_unconditional: XInterval,
    pub q_grh: XInterval,
    /// Unconditional formula with the `C_F(d)` factor dropped, kept only
    /// for the sensitivity analysis of the unconditional table.
    pub q_unconditional_without_cf: XInterval,
}

impl QfConstants {
    pub fn q(&self, regime: Regime) -> &XInterval {
        match regime {
            Regime::Unconditional => &self.q_unconditional,
            Regime::Grh => &self.q_grh,
        }
    }
}

/// `(pi/4)^d d^(2d) / (d!)^2`.
pub fn mfrak(d: u32, k: &Constants) -> XInterval {
    let quarter_pi = k.pi.div(&k.int(4)).expect("nonzero");
    let dd = k.int(d as i64);
    let num = &quarter_pi.powi(d as i64).expect("positive") * &dd.powi(2 * d as i64).expect("positive");
    let fact = k.factorial(d);
    num.div(&(&fact * &fact)).expect("nonzero")
}

/// `lambda_K(d)` for `d >= 2`, with the branch switch at `d = 13`.
pub fn lambda_k(d: u32, k: &Constants) -> XInterval {
    assert!(d >= 2, "lambda_K is only evaluated for d >= 2");
    let di = d as i64;
    let dd = k.int(di);
    let half = k.ratio(1, 2);
    let inv_d = k.ratio(1, di);
    let three_8d2 = k.ratio(3, 8 * di * di);
    let base = k.int(di + 1);
    let half_pi = k.pi.div(&k.int(2)).expect("nonzero");
    if d <= 13 {
        // (d+1)^(1/2 - 1/(2d)) (5/8 + pi/2 - 1/d + 3/(8d^2))^(1/2)
        //   * exp(d (2.27 + 4d/(d-1) + 0.01/d^2 + 1/(500 d^6)))
        let e1 = &half - &k.ratio(1, 2 * di);
        let f1 = base.pow(&e1).expect("positive base");
        let inner = &(&(&k.ratio(5, 8) + &half_pi) - &inv_d) + &three_8d2;
        let f2 = inner.sqrt().expect("positive");
        let ex = &(&(&k.lit("2.27") + &k.ratio(4 * di, di - 1)) + &k.lit("0.01").div(&dd.powi(2).unwrap()).unwrap())
            + &k.int(1).div(&(&k.int(500) * &dd.powi(6).unwrap())).unwrap();
        let f3 = (&dd * &ex).exp().expect("finite");
        &(&f1 * &f2) * &f3
    } else {
        // (d+1)^(d - 1/2 - 1/(2d)) (5/8 + pi/2 + 1/d + 3/(8d^2))^(1/2) e^(4.13 d + 0.02/d)
        let e1 = &(&dd - &half) - &k.ratio(1, 2 * di);
        let f1 = base.pow(&e1).expect("positive base");
        let inner = &(&(&k.ratio(5, 8) + &half_pi) + &inv_d) + &three_8d2;
        let f2 = inner.sqrt().expect("positive");
        let ex = &(&k.lit("4.13") * &dd) + &k.lit("0.02").div(&dd).unwrap();
        let f3 = ex.exp().expect("finite");
        &(&f1 * &f2) * &f3
    }
}

/// `C_F(d) = 1.38 (d+1)^2/(d-1) + 1.52 d(d+1) + 111.26 d` for `d >= 2`.
pub fn c_f(d: u32, k: &Constants) -> XInterval {
    assert!(d >= 2);
    let di = d as i64;
    let t1 = &k.lit("1.38") * &k.ratio((di + 1) * (di + 1), di - 1);
    let t2 = &k.lit("1.52") * &k.int(di * (di + 1));
    let t3 = &k.lit("111.26") * &k.int(di);
    &(&t1 + &t2) + &t3
}

/// `Lambda_F(d)`; zero for `d = 1`.
pub fn big_lambda(d: u32, weighted_disc: &Integer, k: &Constants) -> Result<XInterval> {
    if d == 1 {
        return Ok(k.int(0));
    }
    if *weighted_disc <= 1 {
        return Err(Error::Invalid(format!(
            "weighted discriminant {weighted_disc} too small for degree {d}"
        )));
    }
    let di = d as i64;
    let dd = k.int(di);
    let wd = XInterval::from_integer(weighted_disc, k.prec);
    let log_m = mfrak(d, k).ln()?;
    let num = &(&(&k.lit("0.54") * &k.int(3 * di - 1)) * &lambda_k(d, k)) * &dd.pow(&k.ratio(3, 2))?;
    let num = &num * &k.factorial(d);
    let num = &num * &wd.pow(&k.ratio(1, di + 1))?;
    let num = &num * &wd.ln()?.powi(di - 1)?;
    let den = &k.int((di - 1) * (di - 1)) * &log_m.powi(di - 1)?;
    Ok(num.div(&den)?)
}

/// All of `Q_F` for one polynomial in both regimes.
pub fn qf(f: &IntPolynomial, ctx: &Ctx) -> Result<QfConstants> {
    let k = Constants::new(ctx.prec);
    let d = f.degree() as u32;
    let disc = f.discriminant()?;
    let c_abs = Integer::from(f.leading().abs_ref());
    let c_cut = c_abs
        .to_u64()
        .ok_or_else(|| Error::Limit("leading coefficient too large".into()))?;
    let mbar_c = mertens_bar_int(c_cut, ctx.prec, ctx.exec)?.value;
    let mbar_sqrt_d = mertens_bar_sqrt(&disc.weighted_disc, ctx.prec, ctx.exec)?.value;
    let dd = k.int(d as i64);
    let wd = XInterval::from_integer(&disc.weighted_disc, ctx.prec);
    let sqrt_wd = wd.sqrt()?;
    let mbars = &mbar_c + &mbar_sqrt_d;

    let (lam_k, cf) = if d >= 2 {
        (Some(lambda_k(d, &k)), Some(c_f(d, &k)))
    } else {
        (None, None)
    };
    let bl = big_lambda(d, &disc.weighted_disc, &k)?;
    // Lambda_F(1) = 0 forces the product to vanish without touching C_F(1).
    let lam_cf = match &cf {
        Some(c) => &bl * c,
        None => k.int(0),
    };
    let base_unc = &(&dd * &(&mbars + &k.lit("2.52"))) + &k.int(1);
    let q_unc = &base_unc + &(&lam_cf * &sqrt_wd);
    let q_unc_nocf = &base_unc + &(&bl * &sqrt_wd);
    let log_wd = if disc.weighted_disc == 1 { k.int(0) } else { wd.ln()? };
    let q_grh = &(&(&dd * &(&mbars + &k.lit("10.79"))) + &k.ln2) + &(&k.lit("4.73") * &log_wd);

    Ok(QfConstants {
        poly: f.clone(),
        d,
        disc,
        mfrak: mfrak(d, &k),
        lambda_k: lam_k,
        big_lambda: bl,
        c_f: cf,
        mbar_c,
        mbar_sqrt_d,
        q_unconditional: q_unc,
        q_grh,
        q_unconditional_without_cf: q_unc_nocf,
    })
}

/// Distinct irreducible polynomials `F_1..F_g` and their product.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolySystem {
    pub factors: Vec<IntPolynomial>,
    pub product: IntPolynomial,
    pub product_disc: DiscriminantData,
    pub irreducibility: Vec<Irreducibility>,
    pub warnings: Vec<String>,
}

impl PolySystem {
    pub fn new(factors: Vec<IntPolynomial>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::Invalid("empty polynomial system".into()));
        }
        let mut warnings = Vec::new();
        let mut irreducibility = Vec::new();
        for (i, f) in factors.iter().enumerate() {
            if f.degree() == 0 {
                return Err(Error::Invalid(format!("factor {f} is constant")));
            }
            if *f.leading() <= 0 {
                return Err(Error::Invalid(format!("factor {f} has a non-positive leading coefficient")));
            }
            if factors[..i].contains(f) {
                return Err(Error::Invalid(format!("factor {f} is repeated")));
            }
            let cert = irreducibility_certificate(f, IRREDUCIBILITY_BUDGET)?;
            match &cert {
                Irreducibility::Reducible { reason } => {
                    return Err(Error::Invalid(format!("factor {f} is reducible: {reason}")))
                }
                Irreducibility::Unproven { primes_tried } => warnings.push(format!(
                    "irreducibility of {f} not certified after {primes_tried} primes; results assume it"
                )),
                Irreducibility::Proven { .. } => {}
            }
            irreducibility.push(cert);
        }
        let product = factors[1..]
            .iter()
            .fold(factors[0].clone(), |acc, f| acc.mul(f));
        let product_disc = product.discriminant().map_err(|_| {
            Error::Invalid("factors share a common root; the product is not squarefree".into())
        })?;
        if let Some(p) = fixed_divisor_check(&product) {
            return Err(Error::FixedDivisor(format!(
                "prime {p} divides {product} for every integer argument"
            )));
        }
        Ok(PolySystem {
            factors,
            product,
            product_disc,
            irreducibility,
            warnings,
        })
    }

    pub fn single(f: IntPolynomial) -> Result<Self> {
        PolySystem::new(vec![f])
    }

    pub fn g(&self) -> u32 {
        self.factors.len() as u32
    }

    pub fn degree(&self) -> u32 {
        self.product.degree() as u32
    }

    pub fn kappa(&self) -> u32 {
        self.g()
    }

    /// `A_1 = deg_F + 1`.
    pub fn a1(&self) -> u32 {
        self.degree() + 1
    }
}

/// `L_F` together with the pieces of its two-branch formula.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LfReport {
    pub regime: Regime,
    pub g: u32,
    pub degree: u32,
    #[serde(with = "int_str")]
    pub weighted_disc_product: Integer,
    pub log_m_f: XInterval,
    pub per_factor: Vec<QfConstants>,
    pub max_q: XInterval,
    /// `max{g, deg-1} log M_F` for g >= 2, `max{1, deg-1} log M_F` for g = 1.
    pub log_term: XInterval,
    pub value: XInterval,
}

/// `L_F` from per-factor `Q_{F_i}` and the discriminant of the product.
pub fn lf_from_q(system: &PolySystem, regime: Regime, per_factor: Vec<QfConstants>, ctx: &Ctx) -> Result<LfReport> {
    let k = Constants::new(ctx.prec);
    let g = system.g();
    let deg = system.degree();
    let log_m_f = system.product_disc.m_f(ctx.prec).ln()?;
    let mut max_q = per_factor[0].q(regime).clone();
    for q in &per_factor[1..] {
        max_q = max_q.max(q.q(regime));
    }
    let deg_m1 = deg.saturating_sub(1) as i64;
    let (log_term, inner) = if g >= 2 {
        let lt = &k.int((g as i64).max(deg_m1)) * &log_m_f;
        let s = &lt + &(&k.int(g as i64) * &max_q);
        (lt, s)
    } else {
        let lt = &k.int(deg_m1.max(1)) * &log_m_f;
        let s = lt.max(&max_q);
        (lt, s)
    };
    let value = &k.int(2) * &inner;
    Ok(LfReport {
        regime,
        g,
        degree: deg,
        weighted_disc_product: system.product_disc.weighted_disc.clone(),
        log_m_f,
        per_factor,
        max_q,
        log_term,
        value,
    })
}

pub fn lf(system: &PolySystem, regime: Regime, ctx: &Ctx) -> Result<LfReport> {
    let per_factor = system
        .factors
        .iter()
        .map(|f| qf(f, ctx))
        .collect::<Result<Vec<_>>>()?;
    lf_from_q(system, regime, per_factor, ctx)
}

/// `|sum_{w <= p < z} rho_F(p) log p / p - g log(z/w)|` in double precision.
pub fn lf_empirical_check(system: &PolySystem, w: f64, z: f64) -> Result<f64> {
    if !(w >= 2.0 && w < z && z <= 1e8) {
        return Err(Error::Invalid(format!("need 2 <= w < z <= 1e8, got w={w}, z={z}")));
    }
    let top = (z.ceil() as u64).saturating_sub(1);
    let mut s = 0.0f64;
    let mut comp = 0.0f64;
    for p in PrimeStream::new(top) {
        let pf = p as f64;
        if pf < w || pf >= z {
            continue;
        }
        let t = rho(&system.product, p) as f64 * pf.ln() / pf - comp;
        let u = s + t;
        comp = (u - s) - t;
        s = u;
    }
    Ok((s - system.g() as f64 * (z / w).ln()).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rignum::Precision;

    fn ctx() -> Ctx {
        Ctx::default()
    }

    fn poly(s: &str) -> IntPolynomial {
        IntPolynomial::parse(s).unwrap()
    }

    #[test]
    fn linear_grh_value() {
        let q = qf(&poly("2k+1"), &ctx()).unwrap();
        assert!((q.q_grh.to_f64() - 11.8297).abs() < 1e-4);
        assert_eq!(q.big_lambda.to_f64(), 0.0);
        assert!((q.q_unconditional.to_f64() - 3.86657).abs() < 1e-5);
        let qk = qf(&poly("k"), &ctx()).unwrap();
        assert!((qk.q_unconditional.to_f64() - 3.52).abs() < 1e-12);
    }

    #[test]
    fn mfrak_two_is_pi_squared_over_four() {
        let k = Constants::new(Precision::default());
        let v = mfrak(2, &k).to_f64();
        assert!((v - std::f64::consts::PI.powi(2) / 4.0).abs() < 1e-14);
    }

    #[test]
    fn lambda_branch_selection() {
        let k = Constants::new(Precision::default());
        let d = 13f64;
        let low = (d + 1.0).powf(0.5 - 0.5 / d)
            * (0.625 + std::f64::consts::FRAC_PI_2 - 1.0 / d + 3.0 / (8.0 * d * d)).sqrt()
            * (d * (2.27 + 4.0 * d / (d - 1.0) + 0.01 / (d * d) + 1.0 / (500.0 * d.powi(6)))).exp();
        assert!((lambda_k(13, &k).to_f64() / low - 1.0).abs() < 1e-12);
        let d = 14f64;
        let high = (d + 1.0).powf(d - 0.5 - 0.5 / d)
            * (0.625 + std::f64::consts::FRAC_PI_2 + 1.0 / d + 3.0 / (8.0 * d * d)).sqrt()
            * (4.13 * d + 0.02 / d).exp();
        assert!((lambda_k(14, &k).to_f64() / high - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lf_branches() {
        let sys = PolySystem::single(poly("2k+1")).unwrap();
        let r = lf(&sys, Regime::Grh, &ctx()).unwrap();
        assert!((r.value.to_f64() - 23.659).abs() < 1e-3);
        let sys0 = PolySystem::single(poly("k^2+3")).unwrap();
        let r0 = lf(&sys0, Regime::Unconditional, &ctx()).unwrap();
        assert!((r0.log_term.to_f64() - 12f64.sqrt().ln()).abs() < 1e-12);
        assert_eq!(r0.value, &XInterval::from_int(2, Precision::default()) * &r0.max_q);
        let sg = PolySystem::new(vec![poly("k"), poly("2k+1")]).unwrap();
        let rs = lf(&sg, Regime::Unconditional, &ctx()).unwrap();
        assert!((rs.value.to_f64() - 18.2389).abs() < 1e-4, "{}", rs.value);
    }

    #[test]
    fn grh_never_exceeds_unconditional_for_case_studies() {
        for s in ["k^2+3", "k^3-5", "k^5+3", "2k^6+3", "2k+1"] {
            let q = qf(&poly(s), &ctx()).unwrap();
            // Linear polynomials are the one place the GRH constant is larger.
            if q.d >= 2 {
                assert!(q.q_grh.certainly_lt(&q.q_unconditional), "{s}");
            }
        }
    }

    #[test]
    fn system_validation() {
        assert!(PolySystem::new(vec![poly("k"), poly("k")]).is_err());
        assert!(PolySystem::new(vec![poly("k^2+k")]).is_err());
        assert!(matches!(
            PolySystem::new(vec![poly("k"), poly("k+1")]),
            Err(Error::FixedDivisor(_))
        ));
        assert!(PolySystem::new(vec![poly("-k+5")]).is_err());
        let sg = PolySystem::new(vec![poly("k"), poly("2k+1")]).unwrap();
        assert_eq!(sg.product_disc.abs_disc, 1);
        assert_eq!(sg.kappa(), 2);
        assert_eq!(sg.a1(), 3);
    }

    #[test]
    fn empirical_residual_is_within_lf() {
        let sys = PolySystem::single(poly("k^2+3")).unwrap();
        let lf_v = lf(&sys, Regime::Grh, &ctx()).unwrap().value.to_f64();
        let r = lf_empirical_check(&sys, 10.0, 1e6).unwrap();
        assert!(r <= lf_v, "{r} > {lf_v}");
        let lin = PolySystem::single(poly("2k+1")).unwrap();
        let r = lf_empirical_check(&lin, 2.0, 1e6).unwrap();
        assert!(r <= lf(&lin, Regime::Grh, &ctx()).unwrap().value.to_f64());
        let e = lf_empirical_check(&sys, 24.0, 24.5).unwrap();
        assert!(e < 0.03);
    }
}
