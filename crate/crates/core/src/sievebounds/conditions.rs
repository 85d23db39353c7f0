use rug::Rational;
use serde::{Deserialize, Serialize};

use super::tower::{log_z0, m0_hat, r_of};
use super::{ParamSet, ParamSource, SieveParams};
use crate::error::Result;
use crate::rignum::{Compare, Constants, XInterval};
use crate::Ctx;

/// One strict inequality `left < right`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Clause {
    pub name: String,
    /// `None` when the left side is undefined (an earlier clause failed).
    pub left: Option<XInterval>,
    pub right: XInterval,
    pub pass: bool,
    pub indeterminate: bool,
}

impl Clause {
    fn strict(name: &str, left: Option<XInterval>, right: XInterval) -> Clause {
        let cmp = left.as_ref().map(|l| l.compare(&right));
        Clause {
            name: name.to_string(),
            left,
            right,
            pass: cmp == Some(Compare::Less),
            indeterminate: cmp == Some(Compare::Indeterminate),
        }
    }

    /// `ln(left / right)`; infinite when the left side is undefined.
    pub fn violation(&self) -> f64 {
        match &self.left {
            Some(l) if l.is_positive() && self.right.is_positive() => l.ln_mid_f64() - self.right.ln_mid_f64(),
            Some(l) if !l.is_positive() => f64::NEG_INFINITY,
            _ => f64::INFINITY,
        }
    }
}

/// The four admissibility conditions on `X`, with `z0^2 = X / log^(4 kappa + 1) X`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConditionReport {
    pub log_x: XInterval,
    pub log_z0: Option<XInterval>,
    pub clauses: Vec<Clause>,
    pub pass: bool,
    pub indeterminate: bool,
    pub precision_bits: u32,
    /// True when an indeterminate comparison forced a rerun at doubled precision.
    pub retried: bool,
}

impl ConditionReport {
    pub fn most_violated(&self) -> Option<&Clause> {
        self.clauses
            .iter()
            .filter(|c| !c.pass)
            .max_by(|a, b| {
                // A clause with an undefined left side fails as a consequence
                // of an earlier one, so defined clauses rank first.
                (a.left.is_some(), a.violation())
                    .partial_cmp(&(b.left.is_some(), b.violation()))
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
    }
}

/// Single evaluation at the precision of `ctx`, without retry.
pub fn evaluate_conditions(log_x: &XInterval, p: &SieveParams, ctx: &Ctx) -> ConditionReport {
    let k = Constants::new(ctx.prec);
    let lz = log_z0(log_x, p.kappa, &k).ok().map(|(_, lz)| lz);
    conditions_at(log_x, lz, p, ctx)
}

/// The clauses for a given `log z0`.
pub fn conditions_at(log_x: &XInterval, lz: Option<XInterval>, p: &SieveParams, ctx: &Ctx) -> ConditionReport {
    let k = Constants::new(ctx.prec);
    let one = k.int(1);
    let threshold = k.ln2.max(&p.a1a2());
    let r = lz
        .as_ref()
        .filter(|z| z.is_positive())
        .and_then(|z| r_of(z, p, &k).ok().map(|(_, r)| r));
    let hat = lz.as_ref().and_then(|z| m0_hat(z, p, &k).ok());
    let fourth = r.as_ref().filter(|r| r.certainly_lt(&one)).and_then(|r| {
        let t = (&k.int(p.kappa as i64 + 1) * r).div(&(&one - r)).ok()?;
        Some(t.max(&t.neg_interval()))
    });
    let clauses = vec![
        Clause::strict(
            "max(log 2, A1*A2) < log z0",
            Some(threshold),
            lz.clone().unwrap_or_else(|| k.int(0)),
        ),
        Clause::strict("r(z0) < 1", r, one.clone()),
        Clause::strict("m0_hat(z0) < log z0", hat, lz.clone().unwrap_or_else(|| one.clone())),
        Clause::strict("|(kappa+1) r(z0) / (1 - r(z0))| < 1", fourth, one),
    ];
    let pass = clauses.iter().all(|c| c.pass);
    let indeterminate = clauses.iter().any(|c| c.indeterminate);
    ConditionReport {
        log_x: log_x.clone(),
        log_z0: lz,
        clauses,
        pass,
        indeterminate,
        precision_bits: ctx.prec.bits(),
        retried: false,
    }
}

/// Checks the conditions at the exact value `log X`, redoing the whole
/// evaluation once at doubled precision if a comparison is indeterminate.
pub fn check_with(set: &ParamSet<'_>, log_x: &Rational) -> ConditionReport {
    let ctx = set.ctx();
    let lx = XInterval::from_rational(log_x, ctx.prec);
    let first = evaluate_conditions(&lx, set.base(), ctx);
    if !first.indeterminate {
        return first;
    }
    let Some(doubled) = set.doubled() else {
        return first;
    };
    let dctx = set.doubled_ctx();
    let lx2 = XInterval::from_rational(log_x, dctx.prec);
    let mut second = evaluate_conditions(&lx2, doubled, &dctx);
    second.retried = true;
    second
}

/// Convenience form that resolves the parameters first.
pub fn check_conditions(log_x: &Rational, source: &ParamSource, ctx: &Ctx) -> Result<ConditionReport> {
    let set = ParamSet::new(source, ctx)?;
    Ok(check_with(&set, log_x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::paperconst::{PolySystem, Regime};
    use crate::polyalg::IntPolynomial;

    fn f0(regime: Regime) -> ParamSource {
        ParamSource::system(PolySystem::single(IntPolynomial::parse("k^2+3").unwrap()).unwrap(), regime)
    }

    #[test]
    fn small_x_fails_unconditionally() {
        let rep = check_conditions(&Rational::from(10), &f0(Regime::Unconditional), &Ctx::default()).unwrap();
        assert!(!rep.pass);
        assert!(!rep.clauses[0].pass);
        assert_eq!(rep.most_violated().unwrap().name, rep.clauses[0].name);
    }

    #[test]
    fn grh_threshold_passes() {
        let rep = check_conditions(&Rational::from(55_000_000), &f0(Regime::Grh), &Ctx::default()).unwrap();
        assert!(rep.pass, "{:?}", rep.most_violated().map(|c| &c.name));
    }

    #[test]
    fn boundary_of_the_fourth_clause_never_passes() {
        // Choose log z0 so that r(z0) = 1/(kappa+2) exactly.
        let ctx = Ctx::default();
        let p = SieveParams::new(
            1,
            XInterval::from_int(2, ctx.prec),
            XInterval::from_ratio(1, 10, ctx.prec),
            XInterval::from_ratio(1, 10, ctx.prec),
            XInterval::from_int(2, ctx.prec),
            10,
        )
        .unwrap();
        let k = Constants::new(ctx.prec);
        let (m1v, _) = r_of(&k.int(1000), &p, &k).unwrap();
        let lz = &k.int(3) * &(&p.a2 + &m1v);
        let rep = conditions_at(&k.int(100), Some(lz), &p, &ctx);
        assert!(rep.clauses[0].pass && rep.clauses[1].pass);
        assert!(!rep.clauses[3].pass);
        assert!(!rep.pass);
    }
}
