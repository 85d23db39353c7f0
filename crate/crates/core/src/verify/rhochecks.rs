//! Identities for the root-counting function.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::Integer;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::modarith::{factorize, legendre, primes_up_to, rho, rho_split, rho_squarefree, SplitFlag};
use crate::par::{self, Execution};
use crate::polyalg::{irreducibility_certificate, IntPolynomial, Irreducibility};

/// A failed identity, with enough to reproduce it.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Mismatch {
    pub poly: String,
    pub modulus: u64,
    pub expected: u64,
    pub got: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IdentityReport {
    pub name: String,
    pub checked: u64,
    pub mismatches: Vec<Mismatch>,
    pub pass: bool,
}

impl IdentityReport {
    fn new(name: &str, checked: u64, mismatches: Vec<Mismatch>) -> Self {
        IdentityReport {
            name: name.to_string(),
            checked,
            pass: mismatches.is_empty() && checked > 0,
            mismatches,
        }
    }
}

/// `rho(p) = 1 + (-3/p)` for `k^2 + 3` and every prime `3 < p < limit`.
pub fn quadratic_character_check(limit: u64, exec: Execution) -> IdentityReport {
    let f = IntPolynomial::parse("k^2+3").expect("literal");
    let primes: Vec<u64> = primes_up_to(limit.saturating_sub(1)).into_iter().filter(|&p| p > 3).collect();
    let bad = par::map(exec, &primes, |&p| {
        let expect = (1 + legendre(-3, p) as i64) as u64;
        let got = rho(&f, p);
        (got != expect).then(|| Mismatch { poly: f.to_string(), modulus: p, expected: expect, got })
    });
    IdentityReport::new(
        "rho(k^2+3, p) = 1 + (-3/p)",
        primes.len() as u64,
        bad.into_iter().flatten().collect(),
    )
}

/// Roots of `f` modulo `d` by evaluating every residue.
pub fn rho_brute_force(f: &IntPolynomial, d: u64) -> u64 {
    let dd = d as u128;
    let coeffs: Vec<u128> = f
        .coeffs()
        .iter()
        .map(|c| Integer::from(c.mod_u(d as u32)).to_u128().expect("reduced"))
        .collect();
    (0..dd)
        .filter(|&n| coeffs.iter().rev().fold(0u128, |acc, &c| (acc * n + c) % dd) == 0)
        .count() as u64
}

/// Multiplicativity of `rho` against brute force for squarefree `d <= limit`.
pub fn multiplicativity_check(polys: &[IntPolynomial], limit: u64, exec: Execution) -> Result<IdentityReport> {
    let ds: Vec<u64> = (1..=limit).filter(|&d| factorize(d).iter().all(|&(_, e)| e == 1)).collect();
    let mut bad = Vec::new();
    let mut checked = 0;
    for f in polys {
        let rows = par::map(exec, &ds, |&d| {
            let got = rho_squarefree(f, d);
            (d, got, rho_brute_force(f, d))
        });
        for (d, got, expect) in rows {
            let got = got?;
            checked += 1;
            if got != expect {
                bad.push(Mismatch { poly: f.to_string(), modulus: d, expected: expect, got });
            }
        }
    }
    Ok(IdentityReport::new("rho(d) multiplicative (CRT brute force)", checked, bad))
}

/// A random pair of distinct irreducible polynomials of degree 1 or 2 whose
/// product has a small discriminant, so that the splitting range is not empty.
pub fn random_pair<R: Rng>(rng: &mut R, max_disc: u64) -> (IntPolynomial, IntPolynomial, Integer) {
    let one = |rng: &mut R| loop {
        let deg = rng.gen_range(1..=2usize);
        let mut c: Vec<i64> = (0..deg).map(|_| rng.gen_range(-9..=9)).collect();
        c.push(rng.gen_range(1..=3));
        let Ok(f) = IntPolynomial::from_i64(&c) else { continue };
        if f.content() != 1 {
            continue;
        }
        if matches!(irreducibility_certificate(&f, 50), Ok(Irreducibility::Proven { .. })) {
            return f;
        }
    };
    loop {
        let (a, b) = (one(rng), one(rng));
        if a == b {
            continue;
        }
        let Ok(disc) = a.mul(&b).discriminant() else { continue };
        if disc.abs_disc < max_disc {
            return (a, b, disc.abs_disc);
        }
    }
}

/// `rho_F(p) = rho_F1(p) + rho_F2(p)` for all primes `|D_F| < p < limit`.
pub fn splitting_check(systems: usize, limit: u64, seed: u64) -> IdentityReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let primes = primes_up_to(limit - 1);
    let mut bad = Vec::new();
    let mut checked = 0;
    for _ in 0..systems {
        let (a, b, disc) = random_pair(&mut rng, limit / 2);
        let prod = a.mul(&b);
        let pair = [a, b];
        for &p in primes.iter().filter(|&&p| disc < p) {
            let (sum, flag) = rho_split(&pair, &disc, p);
            debug_assert_eq!(flag, SplitFlag::Exact);
            let whole = rho(&prod, p);
            checked += 1;
            if whole != sum {
                bad.push(Mismatch { poly: prod.to_string(), modulus: p, expected: sum, got: whole });
            }
        }
    }
    IdentityReport::new("rho(F1 F2, p) = rho(F1, p) + rho(F2, p) for p > |D|", checked, bad)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn character_identity_small() {
        let r = quadratic_character_check(20_000, Execution::Parallel);
        assert!(r.pass, "{:?}", r.mismatches);
        assert_eq!(r.checked, primes_up_to(19_999).len() as u64 - 2);
    }

    #[test]
    fn brute_force_counts() {
        let f = IntPolynomial::parse("k^2+3").unwrap();
        // n^2 = -3 mod 7 has n = 2, 5.
        assert_eq!(rho_brute_force(&f, 7), 2);
        assert_eq!(rho_brute_force(&f, 1), 1);
        let r = multiplicativity_check(&[f], 500, Execution::Sequential).unwrap();
        assert!(r.pass, "{:?}", r.mismatches);
    }

    #[test]
    fn splitting_small() {
        let r = splitting_check(4, 2_000, 3);
        assert!(r.pass, "{:?}", r.mismatches);
        assert!(r.checked > 100);
    }
}
