//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use explicit_sieve::eulerprod::twin_constant_accelerated;
use explicit_sieve::paperconst::{PolySystem, Regime};
use explicit_sieve::par::Execution;
use explicit_sieve::polyalg::IntPolynomial;
use explicit_sieve::rignum::{Precision, XInterval};
use explicit_sieve::sievebounds::{
    assemble_bound, check_conditions, table1, unconditional_sensitivity, Grid, ParamSource, Variant,
};
use explicit_sieve::verify::{self, lemmas};
use explicit_sieve::Ctx;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::Rational;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn system(s: &str) -> PolySystem {
    PolySystem::new(s.split(',').map(|f| IntPolynomial::parse(f.trim()).unwrap()).collect()).unwrap()
}

fn grid() -> Grid {
    Grid::with_step(0.1).unwrap()
}

fn verdict(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn grh_table() -> Outcome {
    let t = Instant::now();
    let rows = table1(Regime::Grh, Variant::Printed, &grid(), &Ctx::default()).map_err(|e| e.to_string())?;
    let ok = rows.iter().all(|r| r.within(0.10, 0.05)) && rows.len() == 4;
    let detail = rows
        .iter()
        .map(|r| format!("i={} logX x{:.3} logtau x{:.3}", r.i, r.ratio_log_x, r.ratio_log_tau))
        .collect::<Vec<_>>()
        .join(", ");
    let secs = t.elapsed().as_secs_f64();
    verdict(ok && secs < 60.0, format!("{detail}; {secs:.1}s"))
}

fn unconditional_table() -> Outcome {
    let rep = unconditional_sensitivity(&grid(), 0.10, &Ctx::default()).map_err(|e| e.to_string())?;
    let mut lines = vec![rep.conclusion.clone()];
    for (r, s) in rep.rows.iter().zip(&rep.subterms) {
        lines.push(format!(
            "    i={} printed logX {:.2e} logtau {} | without C_F logX {:.2e} logtau {} | published {:.2e} {:.5e} | C_F(d) = {}",
            r.printed.i,
            r.printed.log_x,
            r.printed.log_tau.display_upper(6),
            r.without_cf.log_x,
            r.without_cf.log_tau.display_upper(6),
            r.printed.published_log_x,
            r.printed.published_log_tau,
            s.c_f.as_ref().map(|c| c.display_upper(6)).unwrap_or_default(),
        ));
    }
    verdict(rep.printed_within || rep.isolated, lines.join("\n"))
}

fn sophie_germain() -> Outcome {
    let ctx = Ctx::default();
    let src = ParamSource::shifted(system("2k+1"), Regime::Unconditional);
    let threshold = Rational::from(1_300_000);
    let at = check_conditions(&threshold, &src, &ctx).map_err(|e| e.to_string())?;
    let b = assemble_bound(&src, &grid(), Some(1_000_000), &ctx).map_err(|e| e.to_string())?;
    let sh = b.shifted.as_ref().ok_or("no shifted report")?;
    let log_m11 = sh.log_m11.upper_float(64).map_err(|e| e.to_string())?.to_f64();
    let absorption = -sh.absorption_log.as_ref().ok_or("no absorption")?.to_f64();
    let abs_ratio = absorption / 6.49974e5;
    let ok = at.pass && log_m11 <= 9.03885e3 * 1.01 && (abs_ratio - 1.0).abs() <= 0.01;
    verdict(
        ok,
        format!(
            "conditions at log x = 1.3e6: {}; minimal grid log x = {:.2e}; log m11 <= {log_m11:.2}; absorption {absorption:.1} (x{abs_ratio:.5})",
            if at.pass { "pass" } else { "fail" },
            b.search.log_x_f64
        ),
    )
}

fn twin_constant() -> Outcome {
    let c = twin_constant_accelerated(10).map_err(|e| e.to_string())?;
    let lo = c.value.display_lower(10);
    let hi = c.value.display_upper(10);
    let width = c.value.upper_float(128).unwrap() - c.value.lower_float(128).unwrap();
    let width = width.to_f64();
    // Both ends truncate to the printed ten digits.
    let floor = Rational::from((6_601_618_158i64, 10_000_000_000i64));
    let ceil = Rational::from((6_601_618_159i64, 10_000_000_000i64));
    let digits_ok = c.value.lower_float(128).unwrap() >= floor && c.value.upper_float(128).unwrap() < ceil;
    let ok = digits_ok && width <= 1e-12;
    verdict(ok, format!("enclosure [{lo}, {hi}] (outward 10-digit display) inside [0.6601618158, 0.6601618159), width {width:.2e}"))
}

fn selberg() -> Outcome {
    let t = Instant::now();
    let s = verify::selberg_suite(200, 1_000_000, 200, 20_240_901, Execution::Parallel).map_err(|e| e.to_string())?;
    let secs = t.elapsed().as_secs_f64();
    verdict(
        s.pass && s.instances == 200 && s.failures.is_empty() && secs < 300.0,
        format!("{} instances, {} failures, min ratio {:.4}; {secs:.1}s", s.instances, s.failures.len(), s.min_ratio),
    )
}

fn rho_identities() -> Outcome {
    let t = Instant::now();
    let a = verify::quadratic_character_check(1_000_000, Execution::Parallel);
    let polys: Vec<IntPolynomial> =
        ["k^2+3", "k^3-5", "k^5+3", "2k^6+3"].iter().map(|s| IntPolynomial::parse(s).unwrap()).collect();
    let b = verify::multiplicativity_check(&polys, 10_000, Execution::Parallel).map_err(|e| e.to_string())?;
    let c = verify::splitting_check(20, 10_000, 7);
    let secs = t.elapsed().as_secs_f64();
    let reps = [&a, &b, &c];
    verdict(
        reps.iter().all(|r| r.pass) && secs < 300.0,
        reps.iter()
            .map(|r| format!("{}: {}/{} ok", r.name, r.checked - r.mismatches.len() as u64, r.checked))
            .chain([format!("{secs:.1}s")])
            .collect::<Vec<_>>()
            .join("; "),
    )
}

fn lemma_envelopes() -> Outcome {
    let t = Instant::now();
    let ctx = Ctx::default();
    let cfg = lemmas::EnvelopeConfig::default();
    let mut ok = true;
    let mut parts = Vec::new();
    for s in ["k^2+3", "k^3-5"] {
        let sys = system(s);
        let table = lemmas::PrimeTable::build(&sys, lemmas::MAX_PRIME_LIMIT, Execution::Parallel).map_err(|e| e.to_string())?;
        let sets = [
            lemmas::LemmaConstants::of_system(&sys, Regime::Unconditional, &ctx).map_err(|e| e.to_string())?,
            lemmas::LemmaConstants::of_system(&sys, Regime::Grh, &ctx).map_err(|e| e.to_string())?,
            lemmas::LemmaConstants::empirical(&table, sys.kappa(), &ctx),
        ];
        for c in &sets {
            let rep = lemmas::lemma_envelope_checks(&sys, &table, c, &cfg, &ctx).map_err(|e| e.to_string())?;
            let cases: usize = rep.summary.iter().map(|s| s.cases).sum();
            let fails: usize = rep.summary.iter().map(|s| s.failures).sum();
            ok &= rep.pass;
            parts.push(format!("{s} [{}]: {fails}/{cases} failures", c.label));
        }
        let toy = lemmas::PrimeTable::build(&sys, 500, Execution::Parallel).map_err(|e| e.to_string())?;
        let consts = lemmas::LemmaConstants::empirical(&toy, sys.kappa(), &ctx);
        let lambdas: Vec<XInterval> = [1, 2, 5].iter().map(|&l| XInterval::from_int(l, ctx.prec)).collect();
        let wg = lemmas::wg_toy_checks(&sys, &consts, &[3, 10, 30, 100, 300, 500], &lambdas, &ctx)
            .map_err(|e| e.to_string())?;
        ok &= wg.pass;
        parts.push(format!("{s} W/G toy: {}", if wg.pass { "ok" } else { "fail" }));
    }
    let secs = t.elapsed().as_secs_f64();
    verdict(ok && secs < 600.0, format!("primes below 1e7; {}; {secs:.1}s", parts.join("; ")))
}

// Random expression trees over exact rationals.
enum Expr {
    Lit(i64, i64),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    /// `exp(ln e)`, defined for positive `e`.
    ExpLn(Box<Expr>),
}

fn random_expr(rng: &mut ChaCha8Rng, depth: u32) -> Expr {
    if depth == 0 || rng.gen_bool(0.25) {
        return Expr::Lit(rng.gen_range(-1000..1000), rng.gen_range(1..1000));
    }
    let op = rng.gen_range(0..5);
    let mut sub = || Box::new(random_expr(rng, depth - 1));
    match op {
        0 => Expr::Add(sub(), sub()),
        1 => Expr::Sub(sub(), sub()),
        2 => Expr::Mul(sub(), sub()),
        3 => Expr::Div(sub(), sub()),
        _ => Expr::ExpLn(sub()),
    }
}

fn eval(e: &Expr, prec: Precision) -> Option<(Rational, XInterval)> {
    let two = |a: &Expr, b: &Expr| Some((eval(a, prec)?, eval(b, prec)?));
    Some(match e {
        Expr::Lit(n, d) => (Rational::from((*n, *d)), XInterval::from_ratio(*n, *d, prec)),
        Expr::Add(a, b) => {
            let ((qa, ia), (qb, ib)) = two(a, b)?;
            (qa + qb, &ia + &ib)
        }
        Expr::Sub(a, b) => {
            let ((qa, ia), (qb, ib)) = two(a, b)?;
            (qa - qb, &ia - &ib)
        }
        Expr::Mul(a, b) => {
            let ((qa, ia), (qb, ib)) = two(a, b)?;
            (qa * qb, &ia * &ib)
        }
        Expr::Div(a, b) => {
            let ((qa, ia), (qb, ib)) = two(a, b)?;
            if qb == 0 || ib.contains_zero() {
                return None;
            }
            (qa / qb, ia.div(&ib).ok()?)
        }
        Expr::ExpLn(a) => {
            let (q, i) = eval(a, prec)?;
            if !i.is_positive() {
                return None;
            }
            (q, i.ln().ok()?.exp().ok()?)
        }
    })
}

fn rigor() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_901);
    let (low, high) = (Precision::from_digits(20), Precision::from_digits(40));
    let (mut evaluated, mut escaped, mut monotone_checked, mut widened) = (0u32, 0u32, 0u32, 0u32);
    let mut generated = 0u32;
    while evaluated < 100_000 {
        generated += 1;
        let e = random_expr(&mut rng, 5);
        let Some((q, iv)) = eval(&e, low) else { continue };
        let n = evaluated;
        evaluated += 1;
        if !iv.contains_rational(&q) {
            escaped += 1;
        }
        if n % 10 == 0 {
            if let (Some(wl), Some((_, ih))) = (iv.log_width(), eval(&e, high)) {
                if let Some(wh) = ih.log_width() {
                    monotone_checked += 1;
                    if wh > wl {
                        widened += 1;
                    }
                }
            }
        }
    }
    let mut drift = 0.0f64;
    for regime in [Regime::Grh, Regime::Unconditional] {
        for variant in [Variant::Printed, Variant::WithoutCf] {
            if regime == Regime::Grh && variant == Variant::WithoutCf {
                continue;
            }
            let a = table1(regime, variant, &grid(), &Ctx::with_digits(40)).map_err(|e| e.to_string())?;
            let b = table1(regime, variant, &grid(), &Ctx::with_digits(60)).map_err(|e| e.to_string())?;
            for (x, y) in a.iter().zip(&b) {
                if x.log_x != y.log_x {
                    drift = f64::INFINITY;
                }
                drift = drift.max((x.log_tau.ln_mid_f64() - y.log_tau.ln_mid_f64()).abs());
            }
        }
    }
    verdict(
        escaped == 0 && widened == 0 && drift <= 1e-6,
        format!(
            "{evaluated} defined trees ({generated} generated), {escaped} escaped; {widened}/{monotone_checked} wider at 40 digits than at 20; \
             max relative reproduction-table drift 40 vs 60 digits {drift:.1e}"
        ),
    )
}

fn counting() -> Outcome {
    let n = 1_000_000;
    let mut parts = Vec::new();
    let mut ok = true;
    for s in ["k^2+3", "k^2+1", "k^3-5", "k, 2k+1"] {
        let sys = system(s);
        let a = verify::count_pi_f(&sys, n, Execution::Parallel).map_err(|e| e.to_string())?.count;
        let b = verify::count_pi_f_simple(&sys, n);
        ok &= a == b;
        parts.push(format!("pi({s}) = {a}/{b}"));
    }
    let a = verify::sophie_germain_count(n, Execution::Parallel).map_err(|e| e.to_string())?;
    let b = verify::sophie_germain_simple(n);
    ok &= a == b;
    parts.push(format!("Sophie Germain {a}/{b}"));
    parts.push(format!("note: {}", verify::FINAL_BOUND_NOTE));
    verdict(ok, parts.join("; "))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("GRH table within 10% / 5%", grh_table),
        ("unconditional table or isolated discrepancy", unconditional_table),
        ("Sophie Germain threshold, m11, absorption", sophie_germain),
        ("twin prime constant to 10 digits", twin_constant),
        ("Selberg inequality oracle", selberg),
        ("rho identities", rho_identities),
        ("lemma envelopes to 1e7", lemma_envelopes),
        ("rigor invariants", rigor),
        ("counting cross-checks at 1e6", counting),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let id = (i + 1).to_string();
        if !filter.is_empty() && !filter.contains(&id) {
            continue;
        }
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(d) => println!("PASS {id} {name} ({secs:.1}s): {d}"),
            Err(d) => {
                failed += 1;
                println!("FAIL {id} {name} ({secs:.1}s): {d}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
