//! The explicit sieve constants, the admissibility conditions on `X`, and
//! the pipelines that turn a polynomial system into a final bound.

mod conditions;
mod pipeline;
mod sensitivity;
mod tower;

use std::sync::OnceLock;

use rug::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::paperconst::{lf, lf_from_q, LfReport, PolySystem, Regime};
use crate::polyalg::IntPolynomial;
use crate::rignum::{Precision, XInterval};
use crate::Ctx;

pub use conditions::{check_conditions, check_with, conditions_at, evaluate_conditions, Clause, ConditionReport};
pub use pipeline::{
    assemble_bound, find_minimal_x, linear_or_mfrak, shifted_precondition, table1, tau_g1, tau_shifted, BoundReport, Grid,
    LadderPoint, PublishedRow, Pipeline, ShiftedReport, Table1Row, TauG1, XSearch, PUBLISHED_TABLE1,
};
pub use sensitivity::{unconditional_sensitivity, SensitivityReport, SensitivityRow, Subterms};
pub use tower::{log_z0, m0, m0_hat, m1, r_of, sieve_tower, z_constants, SieveConstants, ZConstants};

/// Default truncation point of the series inside `m0`.
pub const DEFAULT_K0: u32 = 10;

/// Sieve dimension and the constants of the density conditions.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SieveParams {
    pub kappa: u32,
    pub a1: XInterval,
    pub a2: XInterval,
    pub l: XInterval,
    pub lambda: XInterval,
    pub k0: u32,
}

impl SieveParams {
    pub fn new(kappa: u32, a1: XInterval, a2: XInterval, l: XInterval, lambda: XInterval, k0: u32) -> Result<Self> {
        let prec = a1.precision();
        let one = XInterval::one(prec);
        let zero = XInterval::zero(prec);
        if kappa == 0 {
            return Err(Error::Invalid("kappa must be at least 1".into()));
        }
        if !a1.certainly_gt(&one) {
            return Err(Error::Invalid("A1 must exceed 1".into()));
        }
        if !a2.certainly_gt(&zero) || !l.certainly_gt(&zero) || !lambda.certainly_gt(&zero) {
            return Err(Error::Invalid("A2, L and lambda must be positive".into()));
        }
        if k0 < 2 {
            return Err(Error::Invalid("k0 must be at least 2".into()));
        }
        Ok(SieveParams { kappa, a1, a2, l, lambda, k0 })
    }

    pub fn precision(&self) -> Precision {
        self.a2.precision()
    }

    pub fn a1a2(&self) -> XInterval {
        &self.a1 * &self.a2
    }
}

/// Which form of `Q_F` feeds `L_F`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// The formulas as printed.
    #[default]
    Printed,
    /// Unconditional `Q_F` without the `C_F(d)` factor; sensitivity only.
    WithoutCf,
}

/// Where sieve parameters come from; lets a check be redone at a higher
/// precision with freshly evaluated inputs.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ParamSource {
    /// Fixed enclosures, reused as given at any working precision.
    Explicit { params: SieveParams },
    /// Constants derived from a polynomial system.
    System {
        system: PolySystem,
        regime: Regime,
        shifted: bool,
        lambda: Option<String>,
        k0: u32,
        #[serde(default)]
        variant: Variant,
    },
}

impl ParamSource {
    pub fn system(system: PolySystem, regime: Regime) -> Self {
        ParamSource::System {
            system,
            regime,
            shifted: false,
            lambda: None,
            k0: DEFAULT_K0,
            variant: Variant::Printed,
        }
    }

    pub fn shifted(system: PolySystem, regime: Regime) -> Self {
        ParamSource::System {
            system,
            regime,
            shifted: true,
            lambda: None,
            k0: DEFAULT_K0,
            variant: Variant::Printed,
        }
    }

    pub fn with_options(mut self, lambda_opt: Option<String>, k0_opt: Option<u32>) -> Self {
        if let ParamSource::System { lambda, k0, .. } = &mut self {
            if lambda_opt.is_some() {
                *lambda = lambda_opt;
            }
            if let Some(k) = k0_opt {
                *k0 = k;
            }
        }
        self
    }

    pub fn with_variant(mut self, v: Variant) -> Self {
        if let ParamSource::System { variant, .. } = &mut self {
            *variant = v;
        }
        self
    }

    pub fn system_ref(&self) -> Option<&PolySystem> {
        match self {
            ParamSource::System { system, .. } => Some(system),
            ParamSource::Explicit { .. } => None,
        }
    }

    /// Parameters together with the `L_F` computation they came from.
    pub fn resolve(&self, ctx: &Ctx) -> Result<(SieveParams, Option<LfReport>)> {
        match self {
            ParamSource::Explicit { params } => Ok((params.clone(), None)),
            ParamSource::System {
                system,
                regime,
                shifted,
                lambda,
                k0,
                variant,
            } => {
                let sieved = if *shifted { shifted_system(system)? } else { system.clone() };
                let rep = match variant {
                    Variant::Printed => lf(&sieved, *regime, ctx)?,
                    Variant::WithoutCf => {
                        let mut per = lf(&sieved, *regime, ctx)?.per_factor;
                        for q in &mut per {
                            q.q_unconditional = q.q_unconditional_without_cf.clone();
                        }
                        lf_from_q(&sieved, *regime, per, ctx)?
                    }
                };
                let kappa = sieved.kappa();
                let a1 = XInterval::from_int(sieved.a1() as i64, ctx.prec);
                let lam = match lambda {
                    Some(s) => XInterval::parse(s, ctx.prec)?,
                    None => XInterval::from_int(2 * kappa as i64, ctx.prec),
                };
                let params = SieveParams::new(kappa, a1, rep.value.clone(), rep.value.clone(), lam, *k0)?;
                Ok((params, Some(rep)))
            }
        }
    }

    pub fn params(&self, ctx: &Ctx) -> Result<SieveParams> {
        Ok(self.resolve(ctx)?.0)
    }
}

/// `F'(k) = k F(k)` as a system with the extra linear factor `k` first.
pub fn shifted_system(system: &PolySystem) -> Result<PolySystem> {
    let var = system.factors[0].var();
    let k = IntPolynomial::new(vec![Integer::new(), Integer::from(1)], var)?;
    if system.factors.iter().any(|f| f.coeffs() == k.coeffs()) {
        return Err(Error::Precondition("no factor may equal k in the shifted problem".into()));
    }
    let mut factors = vec![k];
    factors.extend(system.factors.iter().cloned());
    PolySystem::new(factors)
}

/// Parameters at the base precision, plus a lazily built copy at double
/// precision for retrying indeterminate comparisons.
pub struct ParamSet<'a> {
    source: &'a ParamSource,
    ctx: Ctx,
    base: SieveParams,
    doubled: OnceLock<Option<SieveParams>>,
}

impl<'a> ParamSet<'a> {
    pub fn new(source: &'a ParamSource, ctx: &Ctx) -> Result<Self> {
        Ok(ParamSet {
            source,
            ctx: *ctx,
            base: source.params(ctx)?,
            doubled: OnceLock::new(),
        })
    }

    /// Reuses parameters already resolved at the precision of `ctx`.
    pub fn from_parts(source: &'a ParamSource, ctx: &Ctx, base: SieveParams) -> Self {
        ParamSet {
            source,
            ctx: *ctx,
            base,
            doubled: OnceLock::new(),
        }
    }

    pub fn source(&self) -> &ParamSource {
        self.source
    }

    pub fn base(&self) -> &SieveParams {
        &self.base
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    pub fn doubled_ctx(&self) -> Ctx {
        Ctx {
            prec: self.ctx.prec.doubled(),
            ..self.ctx
        }
    }

    pub fn doubled(&self) -> Option<&SieveParams> {
        self.doubled
            .get_or_init(|| {
                let c = self.doubled_ctx();
                match self.source {
                    ParamSource::Explicit { params } => Some(params.clone()),
                    _ => self.source.params(&c).ok(),
                }
            })
            .as_ref()
    }
}
