use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modarith::{factorize, primes_up_to, rho, rho_squarefree};
use crate::par::{self, Execution};
use crate::polyalg::{int_str, IntPolynomial};

pub const MAX_Y: u64 = 10_000_000;
pub const MAX_Z: u64 = 1_000;

/// The sequence `F(n)`, `x - y < n <= x`, sifted by the primes below `z`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SiftInstance {
    pub poly: IntPolynomial,
    pub x: i64,
    pub y: u64,
    pub z: u64,
}

impl SiftInstance {
    pub fn new(poly: IntPolynomial, x: i64, y: u64, z: u64) -> Result<Self> {
        if y == 0 || y > MAX_Y {
            return Err(Error::Limit(format!("y must lie in 1..={MAX_Y}, got {y}")));
        }
        if !(2..=MAX_Z).contains(&z) {
            return Err(Error::Limit(format!("z must lie in 2..={MAX_Z}, got {z}")));
        }
        Ok(SiftInstance { poly, x, y, z })
    }

    fn start(&self) -> i64 {
        self.x - self.y as i64 + 1
    }

    /// `(p, omega(p))` for the primes `p < z`.
    pub fn omega(&self) -> Vec<(u64, u64)> {
        primes_up_to(self.z - 1).into_iter().map(|p| (p, rho(&self.poly, p))).collect()
    }
}

fn residue(n: i64, m: u64) -> u64 {
    n.rem_euclid(m as i64) as u64
}

/// `#{n : d | F(n)}` for `n` in the window of `inst`, by direct evaluation
/// modulo `d`.
pub fn count_divisible(inst: &SiftInstance, d: u64) -> u64 {
    assert!(d > 0 && d <= u32::MAX as u64, "modulus out of range");
    let coeffs: Vec<u128> = inst
        .poly
        .coeffs()
        .iter()
        .map(|c| c.mod_u(d as u32) as u128)
        .collect();
    let dd = d as u128;
    (inst.start()..=inst.x)
        .filter(|&n| {
            let r = residue(n, d) as u128;
            coeffs.iter().rev().fold(0u128, |acc, &c| (acc * r + c) % dd) == 0
        })
        .count() as u64
}

/// `S(A, P, z)`: elements with no prime factor below `z`, by marking the
/// residue classes of the roots of `F` modulo each such prime.
pub fn sift_exact(inst: &SiftInstance) -> Result<u64> {
    let mut alive = vec![true; inst.y as usize];
    let start = inst.start();
    for p in primes_up_to(inst.z - 1) {
        let fp = inst.poly.reduce(p);
        let roots: Vec<u64> = (0..p).filter(|&r| fp.eval(r) == 0).collect();
        for r in roots {
            let first = (r as i64 - start).rem_euclid(p as i64) as usize;
            for slot in alive.iter_mut().skip(first).step_by(p as usize) {
                *slot = false;
            }
        }
    }
    Ok(alive.iter().filter(|&&a| a).count() as u64)
}

/// Same count by `gcd(F(n), P(z)) = 1` on the actual integer values.
pub fn sift_trial_division(inst: &SiftInstance) -> Result<u64> {
    let pz: Integer = primes_up_to(inst.z - 1).into_iter().map(Integer::from).product();
    let mut count = 0;
    for n in inst.start()..=inst.x {
        let v = inst.poly.eval_i64(n);
        if Integer::from(v.gcd_ref(&pz)) == 1 {
            count += 1;
        }
    }
    Ok(count)
}

/// `W(z) = prod_{p < z} (1 - omega(p)/p)`.
pub fn w_exact(omega: &[(u64, u64)]) -> Rational {
    omega
        .iter()
        .map(|&(p, w)| Rational::from((p - w.min(p), p)))
        .product()
}

fn g_prime(p: u64, w: u64) -> Result<Rational> {
    if w >= p {
        return Err(Error::FixedDivisor(format!("omega({p}) = {w} leaves g undefined")));
    }
    Ok(Rational::from((w, p - w)))
}

/// `G(z) = sum_{d < z} mu^2(d) g(d)` over `d` composed of the primes in `omega`.
pub fn g_exact(omega: &[(u64, u64)], z: u64) -> Result<Rational> {
    let gs = omega.iter().map(|&(p, w)| g_prime(p, w)).collect::<Result<Vec<_>>>()?;
    fn walk(i: usize, d: u64, gd: &Rational, z: u64, omega: &[(u64, u64)], gs: &[Rational], acc: &mut Rational) {
        for j in i..omega.len() {
            let nd = d * omega[j].0;
            if nd >= z {
                break;
            }
            let ng = Rational::from(gd * &gs[j]);
            *acc += &ng;
            walk(j + 1, nd, &ng, z, omega, gs, acc);
        }
    }
    let mut acc = Rational::from(1);
    walk(0, 1, &Rational::from(1), z, omega, &gs, &mut acc);
    Ok(acc)
}

/// `S <= X / G(z) + z^2 / W(z)^3` with `X = y`, all exact.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SelbergCheck {
    pub instance: SiftInstance,
    pub sifted: u64,
    pub g: String,
    pub w: String,
    pub rhs: f64,
    pub pass: bool,
}

pub fn selberg_inequality_check(inst: &SiftInstance) -> Result<SelbergCheck> {
    let omega = inst.omega();
    let g = g_exact(&omega, inst.z)?;
    let w = w_exact(&omega);
    let s = sift_exact(inst)?;
    let z2 = Rational::from(inst.z * inst.z);
    let main = Rational::from(inst.y) / &g;
    let w3 = Rational::from(&w * &w) * &w;
    let err = z2 / w3;
    let rhs = main + err;
    Ok(SelbergCheck {
        instance: inst.clone(),
        sifted: s,
        pass: s <= rhs,
        rhs: rhs.to_f64(),
        g: g.to_string(),
        w: w.to_string(),
    })
}

/// Polynomial of degree 1 to 3 without a fixed prime divisor below `z`.
pub fn random_instance<R: Rng>(rng: &mut R, max_y: u64, max_z: u64) -> SiftInstance {
    loop {
        let deg = rng.gen_range(1..=3usize);
        let mut c: Vec<i64> = (0..deg).map(|_| rng.gen_range(-50..=50)).collect();
        c.push(rng.gen_range(1..=5));
        let Ok(poly) = IntPolynomial::from_i64(&c) else { continue };
        let z = rng.gen_range(2..=max_z);
        if primes_up_to(z - 1).into_iter().any(|p| rho(&poly, p) >= p) {
            continue;
        }
        let y = rng.gen_range(1..=max_y);
        let x = y as i64 + rng.gen_range(0..=1_000_000);
        return SiftInstance { poly, x, y, z };
    }
}

/// `#A_d = rho(d) (y/d + theta)` and the remainder condition `|R_d| <= omega(d)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RemainderRecord {
    pub d: u64,
    pub count: u64,
    pub rho_d: u64,
    /// `R_d = #A_d - rho(d) y / d`.
    pub remainder: String,
    #[serde(with = "int_str")]
    pub y: Integer,
    pub theta_ok: bool,
    pub remainder_ok: bool,
}

pub fn remainder_record(inst: &SiftInstance, d: u64) -> Result<RemainderRecord> {
    let count = count_divisible(inst, d);
    let rho_d = rho_squarefree(&inst.poly, d)?;
    let expect = Rational::from((Integer::from(rho_d) * inst.y, d));
    let r = Rational::from(count) - &expect;
    let bound = Rational::from(rho_d);
    let lo = Rational::from(rho_d) * (Rational::from((inst.y, d)) - 1u32);
    let hi = Rational::from(rho_d) * (Rational::from((inst.y, d)) + 1u32);
    let c = Rational::from(count);
    Ok(RemainderRecord {
        d,
        count,
        rho_d,
        theta_ok: lo <= c && c <= hi,
        remainder_ok: Rational::from(r.abs_ref()) <= bound,
        remainder: r.to_string(),
        y: Integer::from(inst.y),
    })
}

/// Outcome of the randomized Selberg-inequality harness.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SelbergSuite {
    pub instances: usize,
    pub failures: Vec<SelbergCheck>,
    /// Smallest `rhs / S` over instances with `S > 0`.
    pub min_ratio: f64,
    pub pass: bool,
}

/// `n` random instances drawn in sequence from `seed`, then checked in order.
pub fn selberg_suite(n: usize, max_y: u64, max_z: u64, seed: u64, exec: Execution) -> Result<SelbergSuite> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let insts: Vec<SiftInstance> = (0..n).map(|_| random_instance(&mut rng, max_y, max_z)).collect();
    let checks = par::map(exec, &insts, selberg_inequality_check)
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let min_ratio = checks
        .iter()
        .filter(|c| c.sifted > 0)
        .map(|c| c.rhs / c.sifted as f64)
        .fold(f64::INFINITY, f64::min);
    let failures: Vec<SelbergCheck> = checks.into_iter().filter(|c| !c.pass).collect();
    Ok(SelbergSuite {
        instances: n,
        pass: failures.is_empty(),
        failures,
        min_ratio,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RemainderSuite {
    pub records: usize,
    pub failures: Vec<(SiftInstance, RemainderRecord)>,
    pub pass: bool,
}

/// Random `(F, d, x, y)` with squarefree `d`; checks the `theta` form of
/// `#A_d` and the remainder condition.
pub fn remainder_suite(n: usize, max_y: u64, max_d: u64, seed: u64, exec: Execution) -> Result<RemainderSuite> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cases: Vec<(SiftInstance, u64)> = (0..n)
        .map(|_| {
            let inst = random_instance(&mut rng, max_y, 2);
            let d = loop {
                let d = rng.gen_range(1..=max_d);
                if factorize(d).iter().all(|&(_, e)| e == 1) {
                    break d;
                }
            };
            (inst, d)
        })
        .collect();
    let recs = par::map(exec, &cases, |(inst, d)| remainder_record(inst, *d))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let failures: Vec<(SiftInstance, RemainderRecord)> = cases
        .into_iter()
        .zip(recs)
        .filter(|(_, r)| !(r.theta_ok && r.remainder_ok))
        .map(|((i, _), r)| (i, r))
        .collect();
    Ok(RemainderSuite {
        records: n,
        pass: failures.is_empty(),
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::ChaCha8Rng;

    fn poly(s: &str) -> IntPolynomial {
        IntPolynomial::parse(s).unwrap()
    }

    #[test]
    fn identity_up_to_thirty() {
        // sqrt(30) rounds up to 6: primes 2, 3, 5.
        let inst = SiftInstance::new(poly("k"), 30, 30, 6).unwrap();
        assert_eq!(sift_exact(&inst).unwrap(), 8);
        assert_eq!(sift_trial_division(&inst).unwrap(), 8);
        assert!(selberg_inequality_check(&inst).unwrap().pass);
    }

    #[test]
    fn z_two_sifts_nothing() {
        let inst = SiftInstance::new(poly("k^2+3"), 100, 100, 2).unwrap();
        assert_eq!(sift_exact(&inst).unwrap(), 100);
        let omega = inst.omega();
        assert_eq!(g_exact(&omega, 2).unwrap(), 1);
        assert_eq!(w_exact(&omega), 1);
        assert!(selberg_inequality_check(&inst).unwrap().pass);
    }

    #[test]
    fn k2_plus_3_matches_trial_division() {
        let inst = SiftInstance::new(poly("k^2+3"), 10_000, 10_000, 50).unwrap();
        assert_eq!(sift_exact(&inst).unwrap(), sift_trial_division(&inst).unwrap());
    }

    #[test]
    fn g_by_definition() {
        // omega = 1 at 2 and 3, z = 7: d in {1, 2, 3, 5, 6}.
        let omega = vec![(2, 1), (3, 1), (5, 0)];
        let g = g_exact(&omega, 7).unwrap();
        let expect = Rational::from(1) + Rational::from(1) + Rational::from((1, 2)) + Rational::from((1, 2));
        assert_eq!(g, expect);
        assert!(g_exact(&[(2, 2)], 3).is_err());
    }

    #[test]
    fn random_instances_agree_with_trial_division() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let inst = random_instance(&mut rng, 3_000, 60);
            assert_eq!(sift_exact(&inst).unwrap(), sift_trial_division(&inst).unwrap(), "{inst:?}");
        }
    }

    #[test]
    fn small_suites_pass() {
        let s = selberg_suite(20, 20_000, 100, 11, Execution::Parallel).unwrap();
        assert!(s.pass && s.min_ratio >= 1.0, "{s:?}");
        let r = remainder_suite(50, 5_000, 2_000, 12, Execution::Parallel).unwrap();
        assert!(r.pass, "{:?}", r.failures);
    }

    #[test]
    fn remainder_records_hold() {
        let inst = SiftInstance::new(poly("k^2+3"), 5_000, 1_234, 2).unwrap();
        for d in [1u64, 2, 3, 7, 21, 42, 91, 1001] {
            let r = remainder_record(&inst, d).unwrap();
            assert!(r.theta_ok && r.remainder_ok, "{r:?}");
        }
    }
}
