use std::str::FromStr;

use clap::{Args, Subcommand, ValueEnum};
use explicit_sieve::eulerprod::{singular_series, twin_constant_accelerated, twin_constant_direct, ProductInterval};
use explicit_sieve::modarith::{primes_up_to, rho, RhoTable};
use explicit_sieve::paperconst::{lf, qf, LfReport, PolySystem, QfConstants, Regime};
use explicit_sieve::polyalg::{DiscriminantData, IntPolynomial, Irreducibility};
use explicit_sieve::rignum::{Constants, XInterval};
use explicit_sieve::sievebounds::{
    assemble_bound, check_conditions, find_minimal_x, shifted_precondition, table1, unconditional_sensitivity,
    BoundReport, ConditionReport, ParamSource, SensitivityReport, Table1Row, Variant, XSearch,
};
use explicit_sieve::verify::{self, lemmas};
use rug::{Integer, Rational};
use serde::Serialize;

use crate::config::RunConfig;
use crate::output::{csv, emit, table, Rendered};
use crate::{CliError, EXIT_CONDITION, EXIT_INDETERMINATE, EXIT_OK};

/// Grid tolerances for the GRH rows of the reproduction table.
pub const TOL_LOG_X: f64 = 0.10;
pub const TOL_LOG_TAU: f64 = 0.05;
/// Target agreement for the unconditional rows.
pub const TOL_UNCONDITIONAL: f64 = 0.10;

const PROV_LF: [(&str, &str); 4] = [
    ("Q_F unconditional", "d (Mbar(|c|) + Mbar(sqrt D) + 2.52) + 1 + Lambda_F(d) C_F(d) sqrt(D)"),
    ("Q_F GRH", "d (Mbar(|c|) + Mbar(sqrt D) + 10.79) + log 2 + 4.73 log D"),
    ("L_F (g = 1)", "2 max{max{1, deg - 1} log M_F, Q_F}, M_F = max{2, sqrt D}"),
    ("L_F (g >= 2)", "2 (max{g, deg - 1} log M_F + g max_i Q_Fi)"),
];

const PROV_TOWER: [(&str, &str); 12] = [
    ("log z0", "(log X - (4 kappa + 1) log log X) / 2"),
    ("m0", "max{A2/l + A1 A2/l (kappa + A2/l), L/l} + 3 kappa/(2 l^2) + kappa log(w/(w-1)) + A1^2 A2/l (kappa + A2/l) S_k0"),
    ("m0_hat", "log z ((1 + 1/log^2 z)^kappa (1 + m0 e^m0) - 1)"),
    ("m1", "A2 (kappa log 2 + A2/l + A1 A2/l (kappa + A2/l)), l = log sqrt(x/d)"),
    ("m2", "exp(A2/log 2 (1 + A1 kappa + A1 A2/log 2)) / log^kappa 2"),
    ("m3", "1 + 2 m4^kappa exp(A2/log 2 (1 + A1 kappa + A1 A2/log 2) + L/log 2 - lambda + (2 kappa/lambda + A2/log z) e^lambda)"),
    ("m4", "2 kappa e + A2 e/log 2 + log 2"),
    ("m5", "min{log z (m3 (1 + m0_hat/log z)/(e^(kappa gamma) Gamma(kappa + 1)) - 1), m6/(1 + m6/log z)}"),
    ("m6, m7, r", "m6 = r log z/(1-r) + m7 + m7 r/(1-r); m7 = (exp((kappa+1) r/(1-r)) - 1)/log z; r = (A2 + m1(1, 1/2))/log z"),
    ("m8", "2 m5/(1 - (4 kappa + 1) llX/lX) + 2^(-4 kappa) m2^4 (1 + m0_hat/log z0)/(Gamma(kappa + 1) e^(kappa gamma))"),
    ("m9", "(4 kappa + 1)/(1 - (4 kappa + 1) llX/lX)"),
    ("conditions", "max{log 2, A1 A2} < log z0; r(z0) < 1; m0_hat(z0) < log z0; |(kappa+1) r/(1-r)| < 1"),
];

const PROV_TAU: [(&str, &str); 3] = [
    ("c0", "m9 + m8/llX + m8 m9/lX"),
    ("c1", "exp(2 L (2 + L)) mF llX/X, mF = max{lX/(2(d-1)), log sum|a_j|/a_d}"),
    ("log tau", "log(c0 (1 + c1/2) + c1 lX/(2 llX))"),
];

const PROV_SHIFTED: [(&str, &str); 3] = [
    ("m11", "((1 + m8/l)(1 + m9 ll/l)^kappa - 1) l/ll"),
    ("leading", "2^kappa kappa!"),
    ("absorption", "kappa log log x - log(x)/2 - log(2^kappa kappa! S)"),
];

const PROV_EULER: [(&str, &str); 2] = [
    ("singular series", "prod_p (1 - rho(p)/p)(1 - 1/p)^(-kappa)"),
    ("twin constant", "prod_{p > 2} (1 - 1/(p - 1)^2)"),
];

#[derive(Args, Debug)]
pub struct SystemArgs {
    /// Factors of the system; commas also separate factors.
    #[arg(required = true, value_name = "POLY")]
    pub polys: Vec<String>,
}

#[derive(Args, Debug)]
pub struct BoundArgs {
    /// Sieve k F(k) so that the argument itself is prime too.
    #[arg(long)]
    pub shifted: bool,
    /// Drop the C_F(d) factor from the unconditional Q_F (sensitivity only).
    #[arg(long)]
    pub without_cf: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Selberg,
    Lemmas,
    Rho,
    Remainder,
    All,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Degrees, discriminants, irreducibility, root counts and L_F.
    Analyze(SystemArgs),
    /// rho_F(p) for every prime up to a limit.
    RhoTable {
        poly: String,
        #[arg(long, default_value_t = 1000)]
        limit: u64,
    },
    /// Every intermediate of Q_F for one polynomial.
    Qf { poly: String },
    /// L_F of a system in the selected regime.
    Lf(SystemArgs),
    /// Smallest grid value of log X that satisfies the conditions.
    FindX {
        #[command(flatten)]
        system: SystemArgs,
        #[command(flatten)]
        bound: BoundArgs,
        /// Check the conditions at this log X instead of searching.
        #[arg(long, value_name = "LOGX")]
        at: Option<String>,
    },
    /// Full bound: X, the constant tower and tau.
    Tau {
        #[command(flatten)]
        system: SystemArgs,
        #[command(flatten)]
        bound: BoundArgs,
    },
    /// Reproduction table for k^2+3, k^3-5, k^5+3, 2k^6+3 in both regimes.
    Table1,
    /// The bound for Sophie Germain primes.
    SophieGermain,
    /// Singular series of a system, or the twin prime constant.
    Euler {
        #[arg(value_name = "POLY")]
        polys: Vec<String>,
        #[arg(long)]
        twin: bool,
        /// Digits for the accelerated twin constant (at most 30).
        #[arg(long, default_value_t = 10)]
        digits: u32,
    },
    /// pi_F(N) = #{n <= N : every factor prime at n}.
    Count {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long)]
        limit: u64,
        /// Also count with the independent single-threaded routine.
        #[arg(long)]
        simple: bool,
        /// Add the Bateman-Horn prediction.
        #[arg(long)]
        bateman_horn: bool,
    },
    /// #{p <= N : p and 2p + 1 prime}.
    SgCount {
        #[arg(long)]
        limit: u64,
        #[arg(long)]
        simple: bool,
    },
    /// Oracle and property suites.
    Check {
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Prime limit for the lemma suite, or rho identity limit.
        #[arg(long)]
        limit: Option<u64>,
        /// System for the lemma suite (default k^2 + 3).
        #[arg(long = "poly", value_name = "POLY")]
        polys: Vec<String>,
    },
}

pub fn run(cmd: &Command, cfg: &RunConfig) -> Result<u8, CliError> {
    match cmd {
        Command::Analyze(s) => analyze(s, cfg),
        Command::RhoTable { poly, limit } => rho_table(poly, *limit, cfg),
        Command::Qf { poly } => qf_cmd(poly, cfg),
        Command::Lf(s) => lf_cmd(s, cfg),
        Command::FindX { system, bound, at } => find_x(system, bound, at.as_deref(), cfg),
        Command::Tau { system, bound } => tau(system, bound, cfg),
        Command::Table1 => table1_cmd(cfg),
        Command::SophieGermain => sophie_germain(cfg),
        Command::Euler { polys, twin, digits } => euler(polys, *twin, *digits, cfg),
        Command::Count { system, limit, simple, bateman_horn } => count(system, *limit, *simple, *bateman_horn, cfg),
        Command::SgCount { limit, simple } => sg_count(*limit, *simple, cfg),
        Command::Check { suite, samples, seed, limit, polys } => check(*suite, *samples, *seed, *limit, polys, cfg),
    }
}

fn parse_poly(s: &str) -> Result<IntPolynomial, CliError> {
    IntPolynomial::parse(s.trim()).map_err(|e| CliError::lib("polyalg", e))
}

pub fn parse_system(args: &[String]) -> Result<PolySystem, CliError> {
    let factors = args
        .iter()
        .flat_map(|a| a.split(','))
        .filter(|s| !s.trim().is_empty())
        .map(parse_poly)
        .collect::<Result<Vec<_>, _>>()?;
    PolySystem::new(factors).map_err(|e| CliError::lib("paperconst", e))
}

/// Decimal or scientific literal as an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational, CliError> {
    let bad = || CliError::input(format!("not a decimal number: {s:?}"));
    let s = s.trim();
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    if int.trim_start_matches(['+', '-']).is_empty() && frac.is_empty() {
        return Err(bad());
    }
    let digits = format!("{int}{frac}");
    let n = Integer::from_str(&digits).map_err(|_| bad())?;
    let shift = exp - frac.len() as i32;
    let scale = Integer::from(Integer::u_pow_u(10, shift.unsigned_abs()));
    Ok(if shift >= 0 { Rational::from(n * scale) } else { Rational::from((n, scale)) })
}

fn source(cfg: &RunConfig, system: PolySystem, b: &BoundArgs) -> ParamSource {
    let s = if b.shifted {
        ParamSource::shifted(system, cfg.regime)
    } else {
        ParamSource::system(system, cfg.regime)
    };
    let v = if b.without_cf { Variant::WithoutCf } else { Variant::Printed };
    s.with_options(cfg.lambda.clone(), cfg.k0).with_variant(v)
}

/// Short machine tag for the report envelope.
fn tag(r: Regime) -> &'static str {
    match r {
        Regime::Grh => "grh",
        Regime::Unconditional => "unconditional",
    }
}

fn sci(v: f64) -> String {
    format!("{v:.6e}")
}

// ---------------------------------------------------------------- analyze

#[derive(Serialize)]
struct FactorInfo {
    poly: String,
    degree: usize,
    disc: DiscriminantData,
    irreducibility: Irreducibility,
}

#[derive(Serialize)]
struct AnalyzeOut {
    factors: Vec<FactorInfo>,
    product: String,
    product_disc: DiscriminantData,
    g: u32,
    degree: u32,
    a1: u32,
    kappa: u32,
    warnings: Vec<String>,
    rho_small_primes: Vec<(u64, u64)>,
    lf_unconditional: XInterval,
    lf_grh: XInterval,
    shifted_checked_primes: Option<Vec<(u64, u64)>>,
    shifted_error: Option<String>,
}

fn analyze(s: &SystemArgs, cfg: &RunConfig) -> Result<u8, CliError> {
    let sys = parse_system(&s.polys)?;
    let ctx = cfg.ctx();
    let factors = sys
        .factors
        .iter()
        .zip(&sys.irreducibility)
        .map(|(f, irr)| {
            Ok(FactorInfo {
                poly: f.to_string(),
                degree: f.degree(),
                disc: f.discriminant().map_err(|e| CliError::lib("polyalg", e))?,
                irreducibility: irr.clone(),
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let lf_u = lf(&sys, Regime::Unconditional, &ctx).map_err(|e| CliError::lib("paperconst", e))?;
    let lf_g = lf(&sys, Regime::Grh, &ctx).map_err(|e| CliError::lib("paperconst", e))?;
    let (shifted_checked_primes, shifted_error) = match shifted_precondition(&sys) {
        Ok(v) => (Some(v), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let out = AnalyzeOut {
        product: sys.product.to_string(),
        product_disc: sys.product_disc.clone(),
        g: sys.g(),
        degree: sys.degree(),
        a1: sys.a1(),
        kappa: sys.kappa(),
        warnings: sys.warnings.clone(),
        rho_small_primes: primes_up_to(50).into_iter().map(|p| (p, rho(&sys.product, p))).collect(),
        lf_unconditional: lf_u.value,
        lf_grh: lf_g.value,
        shifted_checked_primes,
        shifted_error,
        factors,
    };
    let mut t = String::new();
    t.push_str(&format!("system       {}\n", out.factors.iter().map(|f| f.poly.as_str()).collect::<Vec<_>>().join(", ")));
    t.push_str(&format!("product      {}\n", out.product));
    t.push_str(&format!("g = {}, deg = {}, A1 = {}, kappa = {}\n", out.g, out.degree, out.a1, out.kappa));
    t.push_str(&format!(
        "discriminant {} (weighted {})\n",
        out.product_disc.disc, out.product_disc.weighted_disc
    ));
    for f in &out.factors {
        let irr = match &f.irreducibility {
            Irreducibility::Proven { primes } => format!("irreducible (degree patterns mod {primes:?})"),
            Irreducibility::Unproven { primes_tried } => format!("irreducibility unproven after {primes_tried} primes"),
            Irreducibility::Reducible { reason } => format!("reducible: {reason}"),
        };
        t.push_str(&format!("  {}: degree {}, {irr}\n", f.poly, f.degree));
    }
    for w in &out.warnings {
        t.push_str(&format!("warning: {w}\n"));
    }
    let rhos: Vec<String> = out.rho_small_primes.iter().map(|(p, r)| format!("{p}:{r}")).collect();
    t.push_str(&format!("rho(p), p <= 50: {}\n", rhos.join(" ")));
    t.push_str(&format!("L_F unconditional  {}\n", cfg.show(&out.lf_unconditional, 8)));
    t.push_str(&format!("L_F GRH            {}\n", cfg.show(&out.lf_grh, 8)));
    match (&out.shifted_checked_primes, &out.shifted_error) {
        (Some(ps), _) => t.push_str(&format!("shifted problem admissible (checked {ps:?})\n")),
        (_, Some(e)) => t.push_str(&format!("shifted problem not admissible: {e}\n")),
        _ => {}
    }
    emit(
        cfg,
        Rendered { command: "analyze", regime: None, provenance: &PROV_LF, result: &out, text: t, csv: None },
    )?;
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------- rho-table, qf, lf

fn rho_table(poly: &str, limit: u64, cfg: &RunConfig) -> Result<u8, CliError> {
    if limit > 100_000_000 {
        return Err(CliError::input("rho-table limit is capped at 1e8"));
    }
    let f = parse_poly(poly)?;
    let t = RhoTable::build(&f, limit, cfg.execution);
    let text = t.to_csv();
    emit(
        cfg,
        Rendered { command: "rho-table", regime: None, provenance: &[], result: &t, text: text.clone(), csv: Some(text) },
    )?;
    Ok(EXIT_OK)
}

fn qf_text(q: &QfConstants, cfg: &RunConfig) -> String {
    let mut t = format!("Q_F for {} (degree {})\n", q.poly, q.d);
    t.push_str(&format!("  discriminant        {}\n", q.disc.disc));
    t.push_str(&format!("  weighted disc       {}\n", q.disc.weighted_disc));
    let row = |name: &str, v: &XInterval| format!("  {name:<20}{}\n", cfg.show(v, 10));
    t.push_str(&row("mfrak", &q.mfrak));
    if let Some(l) = &q.lambda_k {
        t.push_str(&row("lambda_K(d)", l));
    }
    t.push_str(&row("Lambda_F(d)", &q.big_lambda));
    if let Some(c) = &q.c_f {
        t.push_str(&row("C_F(d)", c));
    }
    t.push_str(&row("Mbar(|c|)", &q.mbar_c));
    t.push_str(&row("Mbar(sqrt D)", &q.mbar_sqrt_d));
    t.push_str(&row("Q_F unconditional", &q.q_unconditional));
    t.push_str(&row("Q_F without C_F", &q.q_unconditional_without_cf));
    t.push_str(&row("Q_F GRH", &q.q_grh));
    t
}

fn qf_cmd(poly: &str, cfg: &RunConfig) -> Result<u8, CliError> {
    let f = parse_poly(poly)?;
    let q = qf(&f, &cfg.ctx()).map_err(|e| CliError::lib("paperconst", e))?;
    let text = qf_text(&q, cfg);
    emit(cfg, Rendered { command: "qf", regime: None, provenance: &PROV_LF, result: &q, text, csv: None })?;
    Ok(EXIT_OK)
}

fn lf_text(r: &LfReport, cfg: &RunConfig) -> String {
    let mut t = format!("L_F, {} (g = {}, deg = {})\n", r.regime.label(), r.g, r.degree);
    t.push_str(&format!("  log M_F     {}\n", cfg.show(&r.log_m_f, 10)));
    t.push_str(&format!("  log term    {}\n", cfg.show(&r.log_term, 10)));
    t.push_str(&format!("  max Q_Fi    {}\n", cfg.show(&r.max_q, 10)));
    t.push_str(&format!("  L_F         {}\n", cfg.show(&r.value, 10)));
    t
}

fn lf_cmd(s: &SystemArgs, cfg: &RunConfig) -> Result<u8, CliError> {
    let sys = parse_system(&s.polys)?;
    let r = lf(&sys, cfg.regime, &cfg.ctx()).map_err(|e| CliError::lib("paperconst", e))?;
    let text = lf_text(&r, cfg);
    emit(
        cfg,
        Rendered { command: "lf", regime: Some(tag(cfg.regime)), provenance: &PROV_LF, result: &r, text, csv: None },
    )?;
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------- find-x, tau

fn conditions_text(rep: &ConditionReport, cfg: &RunConfig) -> String {
    let rows: Vec<Vec<String>> = rep
        .clauses
        .iter()
        .map(|c| {
            vec![
                c.name.clone(),
                c.left.as_ref().map(|l| cfg.show(l, 8)).unwrap_or_else(|| "undefined".into()),
                cfg.show(&c.right, 8),
                if c.pass { "pass" } else if c.indeterminate { "indeterminate" } else { "fail" }.into(),
            ]
        })
        .collect();
    let mut t = table(&["clause", "left", "right", "status"], &rows);
    if rep.retried {
        t.push_str(&format!("(re-evaluated at {} bits after an indeterminate comparison)\n", rep.precision_bits));
    }
    t
}

fn search_text(s: &XSearch, cfg: &RunConfig) -> String {
    let mut t = format!(
        "minimal grid point: log X = {} (= {} * 10^{}, natural log), {} evaluations\n",
        sci(s.log_x_f64),
        s.b0,
        s.b1,
        s.evaluations
    );
    t.push_str(&conditions_text(&s.report, cfg));
    if let Some(prev) = &s.previous {
        let why = prev.most_violated().map(|c| c.name.as_str()).unwrap_or("?");
        t.push_str(&format!("previous grid point log X = {} fails: {why}\n", prev.log_x.display_lower(4)));
    }
    let held = s.ladder.iter().filter(|p| p.pass).count();
    t.push_str(&format!("persistence ladder X^(1.5^j): {held}/{} points pass\n", s.ladder.len()));
    t
}

fn find_x(s: &SystemArgs, b: &BoundArgs, at: Option<&str>, cfg: &RunConfig) -> Result<u8, CliError> {
    let sys = parse_system(&s.polys)?;
    let src = source(cfg, sys, b);
    let ctx = cfg.ctx();
    let regime = tag(cfg.regime);
    if let Some(at) = at {
        let q = parse_rational(at)?;
        let rep = check_conditions(&q, &src, &ctx).map_err(|e| CliError::lib("sievebounds", e))?;
        let mut text = format!("conditions at log X = {at}: {}\n", if rep.pass { "pass" } else { "fail" });
        text.push_str(&conditions_text(&rep, cfg));
        emit(cfg, Rendered { command: "find-x", regime: Some(regime), provenance: &PROV_TOWER, result: &rep, text, csv: None })?;
        return Ok(if rep.pass {
            EXIT_OK
        } else if rep.indeterminate {
            EXIT_INDETERMINATE
        } else {
            EXIT_CONDITION
        });
    }
    let grid = cfg.grid()?;
    let search = find_minimal_x(&src, &grid, &ctx).map_err(|e| CliError::lib("sievebounds", e))?;
    let text = search_text(&search, cfg);
    emit(cfg, Rendered { command: "find-x", regime: Some(regime), provenance: &PROV_TOWER, result: &search, text, csv: None })?;
    Ok(if search.report.indeterminate { EXIT_INDETERMINATE } else { EXIT_OK })
}

fn bound_text(r: &BoundReport, cfg: &RunConfig) -> String {
    let mut t = format!("pipeline {:?}, {}\n", r.pipeline, r.regime.map(|g| g.label()).unwrap_or("explicit"));
    t.push_str(&format!(
        "kappa = {}, A1 = {}, A2 = L = {}, lambda = {}\n",
        r.params.kappa,
        cfg.show(&r.params.a1, 6),
        cfg.show(&r.params.a2, 8),
        cfg.show(&r.params.lambda, 6)
    ));
    t.push_str(&search_text(&r.search, cfg));
    let c = &r.constants;
    let opt = |v: &Option<XInterval>| v.as_ref().map(|x| cfg.show(x, 8)).unwrap_or_else(|| "undefined".into());
    let rows = vec![
        vec!["log z0".into(), cfg.show(&c.log_z0, 8)],
        vec!["m0".into(), opt(&c.m0)],
        vec!["m0_hat".into(), opt(&c.m0_hat)],
        vec!["m1".into(), cfg.show(&c.m1, 8)],
        vec!["r".into(), opt(&c.r)],
        vec!["m2".into(), cfg.show(&c.m2, 8)],
        vec!["m3".into(), opt(&c.m3)],
        vec!["m4".into(), cfg.show(&c.m4, 8)],
        vec!["m5".into(), opt(&c.m5)],
        vec!["m6".into(), opt(&c.m6)],
        vec!["m7".into(), opt(&c.m7)],
        vec!["m8".into(), opt(&c.m8)],
        vec!["m9".into(), opt(&c.m9)],
    ];
    t.push_str(&table(&["constant", "value"], &rows));
    if let Some(lt) = &r.log_tau {
        t.push_str(&format!("log tau = {}\n", cfg.show(lt, 8)));
    }
    if let Some(s) = &r.shifted {
        t.push_str(&format!("shifted system {} (kappa = {})\n", s.shifted.product, s.kappa));
        t.push_str(&format!("log m11 = {}\n", cfg.show(&s.log_m11, 8)));
        t.push_str(&format!("leading constant 2^kappa kappa! = {}\n", cfg.show(&s.leading, 6)));
        if let Some(a) = &s.absorption_log {
            t.push_str(&format!("sqrt(x) absorption exponent = {}\n", cfg.show(a, 8)));
        }
    }
    if let Some(e) = &r.euler {
        t.push_str(&format!(
            "singular series in [{}, {}] (cutoff {}, {:?})\n",
            e.value.display_lower(10),
            e.value.display_upper(10),
            e.cutoff,
            e.method
        ));
    }
    t
}

fn tau(s: &SystemArgs, b: &BoundArgs, cfg: &RunConfig) -> Result<u8, CliError> {
    let sys = parse_system(&s.polys)?;
    let src = source(cfg, sys, b);
    let cutoff = b.shifted.then_some(cfg.cutoff);
    let r = assemble_bound(&src, &cfg.grid()?, cutoff, &cfg.ctx()).map_err(|e| CliError::lib("sievebounds", e))?;
    let text = bound_text(&r, cfg);
    let prov: Vec<(&str, &str)> = PROV_TOWER.iter().chain(&PROV_TAU).chain(&PROV_SHIFTED).chain(&PROV_LF).copied().collect();
    emit(cfg, Rendered { command: "tau", regime: Some(tag(cfg.regime)), provenance: &prov, result: &r, text, csv: None })?;
    Ok(if r.search.report.indeterminate { EXIT_INDETERMINATE } else { EXIT_OK })
}

// ---------------------------------------------------------------- table1

#[derive(Serialize)]
pub struct Table1Out {
    pub grh: Vec<Table1Row>,
    pub grh_within_tolerance: bool,
    pub tolerance_log_x: f64,
    pub tolerance_log_tau: f64,
    /// Unconditional rows, printed and without `C_F`, with the subterms.
    pub unconditional: SensitivityReport,
}

fn row_cells(r: &Table1Row) -> Vec<String> {
    vec![
        r.i.to_string(),
        r.poly.clone(),
        format!("{:?}", r.variant).to_lowercase(),
        sci(r.log_x),
        sci(r.published_log_x),
        format!("{:.4}", r.ratio_log_x),
        r.log_tau.display_upper(6),
        sci(r.published_log_tau),
        format!("{:.4}", r.ratio_log_tau),
    ]
}

const T1_HEAD: [&str; 9] = ["i", "poly", "variant", "log X", "published", "ratio", "log tau", "published", "ratio"];

pub fn table1_text(out: &Table1Out) -> String {
    let grh: Vec<Vec<String>> = out.grh.iter().map(row_cells).collect();
    let mut t = String::from("GRH\n");
    t.push_str(&table(&T1_HEAD, &grh));
    t.push_str(&format!(
        "GRH rows within +-{:.0}% on log X and +-{:.0}% on log tau: {}\n\n",
        100.0 * out.tolerance_log_x,
        100.0 * out.tolerance_log_tau,
        if out.grh_within_tolerance { "yes" } else { "no" }
    ));
    let s = &out.unconditional;
    let unc: Vec<Vec<String>> = s
        .rows
        .iter()
        .flat_map(|r| [row_cells(&r.printed), row_cells(&r.without_cf)])
        .collect();
    t.push_str("unconditional (informational)\n");
    t.push_str(&table(&T1_HEAD, &unc));
    let sub: Vec<Vec<String>> = s
        .subterms
        .iter()
        .map(|x| {
            let o = |v: &Option<XInterval>| v.as_ref().map(|v| v.display_upper(6)).unwrap_or_else(|| "-".into());
            vec![
                x.i.to_string(),
                x.d.to_string(),
                o(&x.lambda_k),
                x.big_lambda.display_upper(6),
                o(&x.c_f),
                x.q_printed.display_upper(6),
                x.q_without_cf.display_upper(6),
            ]
        })
        .collect();
    t.push_str("\nsensitivity of Q_F (unconditional)\n");
    t.push_str(&table(&["i", "d", "lambda_K", "Lambda_F", "C_F", "Q_F printed", "Q_F without C_F"], &sub));
    t.push_str(&format!("{}\n", s.conclusion));
    t
}

pub fn table1_csv(out: &Table1Out) -> String {
    let mut rows = Vec::new();
    let mut push = |regime: &str, r: &Table1Row| {
        let mut c = vec![regime.to_string()];
        c.extend(row_cells(r));
        c[7] = r.log_tau.display_upper(10);
        rows.push(c);
    };
    for r in &out.grh {
        push("grh", r);
    }
    for r in &out.unconditional.rows {
        push("unconditional", &r.printed);
        push("unconditional", &r.without_cf);
    }
    csv(
        &["regime", "i", "poly", "variant", "log_x", "published_log_x", "ratio_log_x", "log_tau", "published_log_tau", "ratio_log_tau"],
        &rows,
    )
}

pub fn compute_table1(cfg: &RunConfig) -> Result<Table1Out, CliError> {
    let ctx = cfg.ctx();
    let grid = cfg.grid()?;
    let grh = table1(Regime::Grh, Variant::Printed, &grid, &ctx).map_err(|e| CliError::lib("sievebounds", e))?;
    let unconditional =
        unconditional_sensitivity(&grid, TOL_UNCONDITIONAL, &ctx).map_err(|e| CliError::lib("sievebounds", e))?;
    Ok(Table1Out {
        grh_within_tolerance: grh.iter().all(|r| r.within(TOL_LOG_X, TOL_LOG_TAU)),
        grh,
        tolerance_log_x: TOL_LOG_X,
        tolerance_log_tau: TOL_LOG_TAU,
        unconditional,
    })
}

fn table1_cmd(cfg: &RunConfig) -> Result<u8, CliError> {
    let out = compute_table1(cfg)?;
    let prov: Vec<(&str, &str)> = PROV_TOWER.iter().chain(&PROV_TAU).chain(&PROV_LF).copied().collect();
    emit(
        cfg,
        Rendered {
            command: "table1",
            regime: Some("both"),
            provenance: &prov,
            result: &out,
            text: table1_text(&out),
            csv: Some(table1_csv(&out)),
        },
    )?;
    Ok(if out.grh_within_tolerance { EXIT_OK } else { EXIT_CONDITION })
}

// ---------------------------------------------------------------- sophie-germain

pub const SG_PUBLISHED_THRESHOLD: f64 = 1.3e6;
pub const SG_PUBLISHED_LOG_M11: f64 = 9.03885e3;
pub const SG_PUBLISHED_ABSORPTION: f64 = 6.49974e5;
pub const TWIN_PUBLISHED: &str = "0.6601618158";

#[derive(Serialize)]
pub struct SgOut {
    pub bound: BoundReport,
    pub twin_constant: ProductInterval,
    pub threshold_log_x: f64,
    pub published_threshold_log_x: f64,
    pub log_m11: XInterval,
    pub published_log_m11: f64,
    /// `a` in `e^(-a)`: the sqrt(x) term against the main term.
    pub absorption_exponent: XInterval,
    pub published_absorption_exponent: f64,
    pub display: String,
}

pub fn compute_sophie_germain(cfg: &RunConfig) -> Result<SgOut, CliError> {
    let ctx = cfg.ctx();
    let h = parse_system(&["2k+1".to_string()])?;
    let src = source(cfg, h, &BoundArgs { shifted: true, without_cf: false });
    let bound =
        assemble_bound(&src, &cfg.grid()?, Some(cfg.cutoff), &ctx).map_err(|e| CliError::lib("sievebounds", e))?;
    let twin = twin_constant_accelerated(10).map_err(|e| CliError::lib("eulerprod", e))?;
    let shifted = bound.shifted.as_ref().expect("shifted pipeline");
    // 2^2 2! times the singular series 2 C2.
    let k = Constants::new(ctx.prec);
    let c2_lo = XInterval::exact(twin.value.lo()).with_precision(ctx.prec);
    let l = &bound.constants.log_x;
    let ll = &bound.constants.log_log_x;
    let num = |e: explicit_sieve::rignum::NumError| CliError::lib("rignum", e.into());
    let log_term = (&k.int(16) * &c2_lo).ln().map_err(num)?;
    let half_l = l.div(&k.int(2)).map_err(num)?;
    let absorption = &(&half_l - &(&k.int(2) * ll)) + &log_term;
    let display = format!(
        "pi_H(x) <= 16 (1 + e^(-{})) (1 + e^({}) log log x / log x) C2 x / log^2 x for log x >= {}",
        absorption.display_lower(6),
        shifted.log_m11.display_upper(6),
        sci(bound.search.log_x_f64),
    );
    Ok(SgOut {
        threshold_log_x: bound.search.log_x_f64,
        published_threshold_log_x: SG_PUBLISHED_THRESHOLD,
        log_m11: shifted.log_m11.clone(),
        published_log_m11: SG_PUBLISHED_LOG_M11,
        absorption_exponent: absorption,
        published_absorption_exponent: SG_PUBLISHED_ABSORPTION,
        display,
        twin_constant: twin,
        bound,
    })
}

fn sophie_germain(cfg: &RunConfig) -> Result<u8, CliError> {
    let out = compute_sophie_germain(cfg)?;
    let rows = vec![
        vec!["threshold log x".into(), sci(out.threshold_log_x), sci(out.published_threshold_log_x)],
        vec!["log m11".into(), out.log_m11.display_upper(8), sci(out.published_log_m11)],
        vec!["absorption exponent".into(), out.absorption_exponent.display_lower(8), sci(out.published_absorption_exponent)],
        vec![
            "twin constant".into(),
            format!("[{}, {}]", out.twin_constant.value.display_lower(12), out.twin_constant.value.display_upper(12)),
            TWIN_PUBLISHED.into(),
        ],
    ];
    let mut text = table(&["quantity", "computed", "published"], &rows);
    text.push_str(&out.display);
    text.push('\n');
    let csv_out = csv(&["quantity", "computed", "published"], &rows);
    let prov: Vec<(&str, &str)> = PROV_SHIFTED.iter().chain(&PROV_TOWER).chain(&PROV_EULER).copied().collect();
    emit(
        cfg,
        Rendered { command: "sophie-germain", regime: Some(tag(cfg.regime)), provenance: &prov, result: &out, text, csv: Some(csv_out) },
    )?;
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------- euler

#[derive(Serialize)]
struct TwinOut {
    accelerated: ProductInterval,
    direct: ProductInterval,
    consistent: bool,
}

fn product_text(p: &ProductInterval, digits: usize) -> String {
    let mut t = format!(
        "[{}, {}] (cutoff {}, tail {:?}, relative width {:.2e})\n",
        p.value.display_lower(digits),
        p.value.display_upper(digits),
        p.cutoff,
        p.method,
        p.relative_width()
    );
    if let Some(h) = &p.heuristic {
        t.push_str(&format!("heuristic [{}, {}]\n", h.display_lower(digits), h.display_upper(digits)));
    }
    t
}

fn euler(polys: &[String], twin: bool, digits: u32, cfg: &RunConfig) -> Result<u8, CliError> {
    let ctx = cfg.ctx();
    if twin {
        let accelerated = twin_constant_accelerated(digits).map_err(|e| CliError::lib("eulerprod", e))?;
        let direct = twin_constant_direct(cfg.cutoff, &ctx).map_err(|e| CliError::lib("eulerprod", e))?;
        let consistent = !accelerated.value.certainly_lt(&direct.value) && !accelerated.value.certainly_gt(&direct.value);
        let mut text = format!("twin constant, accelerated: {}", product_text(&accelerated, digits as usize + 2));
        text.push_str(&format!("direct product: {}", product_text(&direct, 12)));
        text.push_str(&format!("enclosures overlap: {consistent}\n"));
        let out = TwinOut { accelerated, direct, consistent };
        emit(cfg, Rendered { command: "euler", regime: None, provenance: &PROV_EULER, result: &out, text, csv: None })?;
        return Ok(if consistent { EXIT_OK } else { EXIT_CONDITION });
    }
    if polys.is_empty() {
        return Err(CliError::input("euler needs a system or --twin"));
    }
    let sys = parse_system(polys)?;
    let p = singular_series(&sys, sys.g(), cfg.cutoff, cfg.regime, &ctx).map_err(|e| CliError::lib("eulerprod", e))?;
    let text = format!("singular series of {}: {}", sys.product, product_text(&p, 12));
    emit(cfg, Rendered { command: "euler", regime: Some(tag(cfg.regime)), provenance: &PROV_EULER, result: &p, text, csv: None })?;
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------- count, sg-count

#[derive(Serialize)]
struct CountRow {
    n: u64,
    count: u64,
    simple: Option<u64>,
    bateman_horn: Option<f64>,
}

#[derive(Serialize)]
struct CountOut {
    system: String,
    primality: verify::PrimalityMethod,
    rows: Vec<CountRow>,
    agree: bool,
}

fn checkpoints(limit: u64) -> Vec<u64> {
    let mut v: Vec<u64> = std::iter::successors(Some(10u64), |&n| n.checked_mul(10)).take_while(|&n| n < limit).collect();
    v.push(limit);
    v
}

fn count(s: &SystemArgs, limit: u64, simple: bool, bh: bool, cfg: &RunConfig) -> Result<u8, CliError> {
    let sys = parse_system(&s.polys)?;
    let series = if bh {
        let p = singular_series(&sys, sys.g(), cfg.cutoff, cfg.regime, &cfg.ctx()).map_err(|e| CliError::lib("eulerprod", e))?;
        Some(p.heuristic_or_value().to_f64())
    } else {
        None
    };
    let mut rows = Vec::new();
    let mut method = verify::PrimalityMethod::Deterministic;
    for n in checkpoints(limit) {
        let c = verify::count_pi_f(&sys, n, cfg.execution).map_err(|e| CliError::lib("verify", e))?;
        if c.method == verify::PrimalityMethod::StrongPseudoprime {
            method = c.method;
        }
        rows.push(CountRow {
            n,
            count: c.count,
            simple: simple.then(|| verify::count_pi_f_simple(&sys, n)),
            bateman_horn: series.map(|s| verify::bateman_horn(&sys, n, s)),
        });
    }
    let agree = rows.iter().all(|r| r.simple.is_none_or(|s| s == r.count));
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.n.to_string(),
                r.count.to_string(),
                r.simple.map(|s| s.to_string()).unwrap_or_default(),
                r.bateman_horn.map(|b| format!("{b:.1}")).unwrap_or_default(),
            ]
        })
        .collect();
    let head = ["N", "pi_F(N)", "simple", "bateman_horn"];
    let mut text = format!("system {} ({:?} primality)\n", sys.product, method);
    text.push_str(&table(&head, &cells));
    let out = CountOut { system: sys.product.to_string(), primality: method, rows, agree };
    emit(cfg, Rendered { command: "count", regime: None, provenance: &[], result: &out, text, csv: Some(csv(&head, &cells)) })?;
    Ok(if agree { EXIT_OK } else { EXIT_CONDITION })
}

#[derive(Serialize)]
struct SgCountOut {
    limit: u64,
    count: u64,
    simple: Option<u64>,
    agree: bool,
}

fn sg_count(limit: u64, simple: bool, cfg: &RunConfig) -> Result<u8, CliError> {
    if simple && limit > 100_000_000 {
        return Err(CliError::input("the simple Sophie Germain sieve is capped at 1e8"));
    }
    let count = verify::sophie_germain_count(limit, cfg.execution).map_err(|e| CliError::lib("verify", e))?;
    let simple = simple.then(|| verify::sophie_germain_simple(limit));
    let agree = simple.is_none_or(|s| s == count);
    let cells = vec![vec![limit.to_string(), count.to_string(), simple.map(|s| s.to_string()).unwrap_or_default()]];
    let head = ["N", "pi_H(N)", "simple"];
    let out = SgCountOut { limit, count, simple, agree };
    emit(
        cfg,
        Rendered { command: "sg-count", regime: None, provenance: &[], result: &out, text: table(&head, &cells), csv: Some(csv(&head, &cells)) },
    )?;
    Ok(if agree { EXIT_OK } else { EXIT_CONDITION })
}

// ---------------------------------------------------------------- check

#[derive(Serialize)]
struct SuiteOut {
    suite: String,
    pass: bool,
    summary: String,
    details: serde_json::Value,
}

#[derive(Serialize)]
struct CheckOut {
    suites: Vec<SuiteOut>,
    pass: bool,
    note: &'static str,
}

fn json<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).unwrap_or(serde_json::Value::Null)
}

fn suite_selberg(samples: Option<usize>, seed: u64, cfg: &RunConfig) -> Result<SuiteOut, CliError> {
    let n = samples.unwrap_or(200);
    let s = verify::selberg_suite(n, 1_000_000, 200, seed, cfg.execution).map_err(|e| CliError::lib("verify", e))?;
    Ok(SuiteOut {
        suite: "selberg".into(),
        pass: s.pass,
        summary: format!("{} instances, {} failures, min rhs/S = {:.3}", s.instances, s.failures.len(), s.min_ratio),
        details: json(&s),
    })
}

fn suite_remainder(samples: Option<usize>, seed: u64, cfg: &RunConfig) -> Result<SuiteOut, CliError> {
    let n = samples.unwrap_or(500);
    let s = verify::remainder_suite(n, 100_000, 10_000, seed, cfg.execution).map_err(|e| CliError::lib("verify", e))?;
    Ok(SuiteOut {
        suite: "remainder".into(),
        pass: s.pass,
        summary: format!("{} records, {} failures", s.records, s.failures.len()),
        details: json(&s),
    })
}

fn suite_rho(limit: Option<u64>, seed: u64, cfg: &RunConfig) -> Result<SuiteOut, CliError> {
    let exec = cfg.execution;
    let a = verify::quadratic_character_check(limit.unwrap_or(1_000_000), exec);
    let polys = ["k^2+3", "k^3-5", "k^5+3", "2k^6+3", "k^2+k+1"]
        .iter()
        .map(|s| parse_poly(s))
        .collect::<Result<Vec<_>, _>>()?;
    let b = verify::multiplicativity_check(&polys, 10_000, exec).map_err(|e| CliError::lib("verify", e))?;
    let c = verify::splitting_check(20, 10_000, seed);
    let reps = [a, b, c];
    let summary = reps
        .iter()
        .map(|r| format!("{}: {} checked, {} mismatches", r.name, r.checked, r.mismatches.len()))
        .collect::<Vec<_>>()
        .join("; ");
    Ok(SuiteOut { suite: "rho".into(), pass: reps.iter().all(|r| r.pass), summary, details: json(&reps) })
}

fn suite_lemmas(samples: Option<usize>, seed: u64, limit: Option<u64>, polys: &[String], cfg: &RunConfig) -> Result<SuiteOut, CliError> {
    let ctx = cfg.ctx();
    let sys = if polys.is_empty() { parse_system(&["k^2+3".to_string()])? } else { parse_system(polys)? };
    let limit = limit.unwrap_or(lemmas::MAX_PRIME_LIMIT);
    let table = lemmas::PrimeTable::build(&sys, limit, cfg.execution).map_err(|e| CliError::lib("verify", e))?;
    let cfg_env = lemmas::EnvelopeConfig { limit, samples: samples.unwrap_or(64), seed };
    let sets = [
        lemmas::LemmaConstants::of_system(&sys, cfg.regime, &ctx).map_err(|e| CliError::lib("verify", e))?,
        lemmas::LemmaConstants::empirical(&table, sys.kappa(), &ctx),
    ];
    let mut reports = Vec::new();
    for c in &sets {
        reports.push(lemmas::lemma_envelope_checks(&sys, &table, c, &cfg_env, &ctx).map_err(|e| CliError::lib("verify", e))?);
    }
    let toy_table = lemmas::PrimeTable::build(&sys, 500, cfg.execution).map_err(|e| CliError::lib("verify", e))?;
    let toy_consts = lemmas::LemmaConstants::empirical(&toy_table, sys.kappa(), &ctx);
    let kappa = sys.kappa() as i64;
    let lambdas: Vec<XInterval> = [1, 2 * kappa, 5].iter().map(|&l| XInterval::from_int(l, ctx.prec)).collect();
    let wg = lemmas::wg_toy_checks(&sys, &toy_consts, &[3, 10, 30, 100, 300, 500], &lambdas, &ctx)
        .map_err(|e| CliError::lib("verify", e))?;
    let mut summary: Vec<String> = Vec::new();
    for r in &reports {
        let fails: usize = r.summary.iter().map(|s| s.failures).sum();
        let cases: usize = r.summary.iter().map(|s| s.cases).sum();
        summary.push(format!("{}: {cases} cases, {fails} failures", r.constants.label));
    }
    let na = wg.checks.iter().filter(|c| c.not_applicable.is_some()).count();
    summary.push(format!("W/G toy checks: {} checks, {} not applicable at toy scale", wg.checks.len(), na));
    let pass = reports.iter().all(|r| r.pass) && wg.pass;
    Ok(SuiteOut {
        suite: "lemmas".into(),
        pass,
        summary: summary.join("; "),
        details: serde_json::json!({ "envelopes": json(&reports), "toy": json(&wg) }),
    })
}

fn check(suite: Suite, samples: Option<usize>, seed: u64, limit: Option<u64>, polys: &[String], cfg: &RunConfig) -> Result<u8, CliError> {
    let want = |s: Suite| suite == s || suite == Suite::All;
    let mut suites = Vec::new();
    if want(Suite::Selberg) {
        suites.push(suite_selberg(samples, seed, cfg)?);
    }
    if want(Suite::Remainder) {
        suites.push(suite_remainder(samples, seed, cfg)?);
    }
    if want(Suite::Rho) {
        suites.push(suite_rho(limit.filter(|_| suite == Suite::Rho), seed, cfg)?);
    }
    if want(Suite::Lemmas) {
        suites.push(suite_lemmas(samples, seed, limit.filter(|_| suite == Suite::Lemmas), polys, cfg)?);
    }
    let pass = suites.iter().all(|s| s.pass);
    let cells: Vec<Vec<String>> = suites
        .iter()
        .map(|s| vec![s.suite.clone(), if s.pass { "pass" } else { "FAIL" }.into(), s.summary.clone()])
        .collect();
    let head = ["suite", "status", "summary"];
    let mut text = String::new();
    for c in &cells {
        text.push_str(&format!("{:<10} {:<5} {}\n", c[0], c[1], c[2]));
    }
    text.push_str(&format!("note: {}\n", verify::FINAL_BOUND_NOTE));
    let out = CheckOut { suites, pass, note: verify::FINAL_BOUND_NOTE };
    emit(cfg, Rendered { command: "check", regime: Some(tag(cfg.regime)), provenance: &[], result: &out, text, csv: Some(csv(&head, &cells)) })?;
    Ok(if pass { EXIT_OK } else { EXIT_CONDITION })
}
