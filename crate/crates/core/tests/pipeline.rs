use explicit_sieve::eulerprod::singular_series;
use explicit_sieve::modarith::{rho, RhoTable};
use explicit_sieve::paperconst::{lf, qf, PolySystem, Regime};
use explicit_sieve::par::Execution;
use explicit_sieve::polyalg::IntPolynomial;
use explicit_sieve::sievebounds::{assemble_bound, check_conditions, find_minimal_x, Grid, ParamSource};
use explicit_sieve::verify::rhochecks::rho_brute_force;
use explicit_sieve::verify;
use explicit_sieve::Ctx;
use proptest::prelude::*;
use rug::Rational;

fn poly(s: &str) -> IntPolynomial {
    IntPolynomial::parse(s).unwrap()
}

#[test]
fn search_result_agrees_with_direct_check() {
    let ctx = Ctx::default();
    let src = ParamSource::system(PolySystem::single(poly("k^2+3")).unwrap(), Regime::Grh);
    let s = find_minimal_x(&src, &Grid::with_step(0.1).unwrap(), &ctx).unwrap();
    let log_x: Rational = s.log_x.parse().unwrap();
    let at = check_conditions(&log_x, &src, &ctx).unwrap();
    assert!(at.pass);
    let below = log_x * Rational::from((9, 10));
    assert!(!check_conditions(&below, &src, &ctx).unwrap().pass);
}

#[test]
fn execution_mode_does_not_change_results() {
    let par = Ctx::default();
    let seq = Ctx { exec: Execution::Sequential, ..Ctx::default() };
    let src = ParamSource::system(PolySystem::single(poly("k^3-5")).unwrap(), Regime::Grh);
    let grid = Grid::with_step(0.1).unwrap();
    let a = assemble_bound(&src, &grid, None, &par).unwrap();
    let b = assemble_bound(&src, &grid, None, &seq).unwrap();
    assert_eq!(a.search.log_x, b.search.log_x);
    assert_eq!(a.log_tau, b.log_tau);

    let f = poly("2k^6+3");
    assert_eq!(
        RhoTable::build(&f, 50_000, Execution::Parallel).entries,
        RhoTable::build(&f, 50_000, Execution::Sequential).entries
    );
}

#[test]
fn constants_survive_json() {
    let ctx = Ctx::default();
    let q = qf(&poly("k^5+3"), &ctx).unwrap();
    let back: explicit_sieve::paperconst::QfConstants = serde_json::from_str(&serde_json::to_string(&q).unwrap()).unwrap();
    assert_eq!(back.q_grh, q.q_grh);
    assert_eq!(back.q_unconditional, q.q_unconditional);
    let sys = PolySystem::new(vec![poly("k"), poly("2k+1")]).unwrap();
    let l = lf(&sys, Regime::Grh, &ctx).unwrap();
    assert!(l.value.is_positive());
}

#[test]
fn grh_constant_is_smaller() {
    let ctx = Ctx::default();
    for s in ["k^2+3", "k^3-5", "k^5+3", "2k^6+3"] {
        let sys = PolySystem::single(poly(s)).unwrap();
        let u = lf(&sys, Regime::Unconditional, &ctx).unwrap().value;
        let g = lf(&sys, Regime::Grh, &ctx).unwrap().value;
        assert!(g.certainly_lt(&u), "{s}");
    }
}

#[test]
fn singular_series_tracks_counts() {
    // pi_F(N) for k^2 + 1 against its Bateman-Horn prediction.
    let sys = PolySystem::single(poly("k^2+1")).unwrap();
    let s = singular_series(&sys, 1, 100_000, Regime::Unconditional, &Ctx::default()).unwrap();
    let c = s.heuristic_or_value().to_f64();
    assert!((c - 1.3728).abs() < 0.01, "{c}");
    let n = 1_000_000;
    let count = verify::count_pi_f(&sys, n, Execution::Parallel).unwrap().count as f64;
    let predicted = verify::bateman_horn(&sys, n, c);
    assert!((count / predicted - 1.0).abs() < 0.02, "{count} vs {predicted}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rho_at_primes_matches_enumeration(c in proptest::collection::vec(-40i64..40, 2..6), pi in 0usize..10) {
        let p = [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29][pi];
        let Ok(f) = IntPolynomial::new(c.iter().map(|&x| x.into()).collect(), 'k') else { return Ok(()) };
        prop_assume!(f.degree() >= 1);
        prop_assert_eq!(rho(&f, p), rho_brute_force(&f, p));
    }
}
