//! Primes and the root-counting function `rho_F(p)`.

use rug::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ffpoly::powmod;
use crate::par::{self, Execution};
use crate::polyalg::IntPolynomial;

/// Below this prime `rho` evaluates the polynomial at every residue.
pub const BRUTE_FORCE_CROSSOVER: u64 = 10_000;

const DEFAULT_SEGMENT: u64 = 1 << 18;

/// All primes `<= n` by a plain odd-only sieve.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let half = (n - 1) / 2;
    // index i represents 2i + 3
    let mut composite = vec![false; half];
    let mut i = 0;
    while (2 * i + 3) * (2 * i + 3) <= n {
        if !composite[i] {
            let p = 2 * i + 3;
            let mut j = (p * p - 3) / 2;
            while j < half {
                composite[j] = true;
                j += p;
            }
        }
        i += 1;
    }
    let mut out = Vec::with_capacity(n / 10 + 1);
    out.push(2);
    out.extend((0..half).filter(|&i| !composite[i]).map(|i| (2 * i + 3) as u64));
    out
}

/// Primes in `[lo, hi)` given every prime up to `sqrt(hi)`.
pub fn primes_in_segment(lo: u64, hi: u64, base: &[u64]) -> Vec<u64> {
    if hi <= lo {
        return Vec::new();
    }
    let len = (hi - lo) as usize;
    let mut composite = vec![false; len];
    for &p in base {
        if p.saturating_mul(p) >= hi {
            break;
        }
        let start = (p * p).max(lo.div_ceil(p) * p);
        let mut m = start;
        while m < hi {
            composite[(m - lo) as usize] = true;
            m += p;
        }
    }
    (0..len)
        .filter(|&i| !composite[i] && lo + i as u64 >= 2)
        .map(|i| lo + i as u64)
        .collect()
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r.saturating_mul(r) > n {
        r -= 1;
    }
    while (r + 1).saturating_mul(r + 1) <= n {
        r += 1;
    }
    r
}

/// Segmented enumeration of the primes up to a limit.
#[derive(Clone, Debug)]
pub struct PrimeStream {
    limit: u64,
    segment: u64,
    base: Vec<u64>,
    next_lo: u64,
    buf: std::vec::IntoIter<u64>,
}

impl PrimeStream {
    pub fn new(limit: u64) -> Self {
        PrimeStream::with_segment(limit, DEFAULT_SEGMENT)
    }

    pub fn with_segment(limit: u64, segment: u64) -> Self {
        PrimeStream {
            limit,
            segment: segment.max(64),
            base: primes_up_to(isqrt(limit) + 1),
            next_lo: 0,
            buf: Vec::new().into_iter(),
        }
    }

    /// Segment boundaries `[lo, hi)` covering `0..=limit`.
    pub fn segments(&self) -> Vec<(u64, u64)> {
        let end = self.limit.saturating_add(1);
        let mut out = Vec::new();
        let mut lo = 0;
        while lo < end {
            let hi = (lo + self.segment).min(end);
            out.push((lo, hi));
            lo = hi;
        }
        out
    }

    /// Sieves all segments and maps each one, results in segment order.
    pub fn map_segments<R, F>(&self, exec: Execution, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(&[u64]) -> R + Sync + Send,
    {
        let segs = self.segments();
        par::map(exec, &segs, |&(lo, hi)| f(&primes_in_segment(lo, hi, &self.base)))
    }
}

impl Iterator for PrimeStream {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        loop {
            if let Some(p) = self.buf.next() {
                return Some(p);
            }
            if self.next_lo > self.limit {
                return None;
            }
            let hi = (self.next_lo + self.segment).min(self.limit.saturating_add(1));
            self.buf = primes_in_segment(self.next_lo, hi, &self.base).into_iter();
            self.next_lo = hi;
        }
    }
}

/// Number of `n mod p` with `F(n) = 0 mod p`.
pub fn rho(f: &IntPolynomial, p: u64) -> u64 {
    let fp = f.reduce(p);
    if fp.is_zero() {
        return p;
    }
    if p < BRUTE_FORCE_CROSSOVER {
        return (0..p).filter(|&x| fp.eval(x) == 0).count() as u64;
    }
    fp.count_roots()
}

/// Trial-division factorization of a small integer.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut q = 2u64;
    while q * q <= n {
        if n.is_multiple_of(q) {
            let mut e = 0;
            while n.is_multiple_of(q) {
                n /= q;
                e += 1;
            }
            out.push((q, e));
        }
        q += if q == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// `rho_F(d)` for squarefree `d`, by multiplicativity.
pub fn rho_squarefree(f: &IntPolynomial, d: u64) -> Result<u64> {
    if d == 0 {
        return Err(Error::NotSquarefreeModulus(0));
    }
    let fac = factorize(d);
    if fac.iter().any(|&(_, e)| e > 1) {
        return Err(Error::NotSquarefreeModulus(d));
    }
    Ok(fac.iter().map(|&(p, _)| rho(f, p)).product())
}

/// Whether the additive splitting of `rho` over factors is guaranteed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SplitFlag {
    Exact,
    UpperEstimate,
}

/// Sum of the per-factor root counts at `p`, flagged exact when `p`
/// exceeds the absolute discriminant of the product.
pub fn rho_split(factors: &[IntPolynomial], abs_disc_product: &Integer, p: u64) -> (u64, SplitFlag) {
    let s = factors.iter().map(|f| rho(f, p)).sum();
    let flag = if *abs_disc_product < p {
        SplitFlag::Exact
    } else {
        SplitFlag::UpperEstimate
    };
    (s, flag)
}

/// Legendre symbol `(a/p)` for an odd prime `p`.
pub fn legendre(a: i64, p: u64) -> i8 {
    let r = a.rem_euclid(p as i64) as u64;
    if r == 0 {
        return 0;
    }
    if powmod(r, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// Table of `rho_F(p)` for every prime up to a limit.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RhoTable {
    pub poly: IntPolynomial,
    pub entries: Vec<(u64, u64)>,
}

impl RhoTable {
    pub fn build(f: &IntPolynomial, limit: u64, exec: Execution) -> Self {
        let parts = PrimeStream::new(limit).map_segments(exec, |ps| {
            ps.iter().map(|&p| (p, rho(f, p))).collect::<Vec<_>>()
        });
        RhoTable {
            poly: f.clone(),
            entries: parts.into_iter().flatten().collect(),
        }
    }

    pub fn get(&self, p: u64) -> Option<u64> {
        self.entries
            .binary_search_by_key(&p, |&(q, _)| q)
            .ok()
            .map(|i| self.entries[i].1)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("p,rho\n");
        for (p, r) in &self.entries {
            s.push_str(&format!("{p},{r}\n"));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn poly(s: &str) -> IntPolynomial {
        IntPolynomial::parse(s).unwrap()
    }

    fn brute_count(f: &IntPolynomial, d: u64) -> u64 {
        (0..d)
            .filter(|&n| f.eval(&Integer::from(n)).is_divisible(&Integer::from(d)))
            .count() as u64
    }

    #[test]
    fn segmented_matches_simple_sieve() {
        let simple = primes_up_to(1_000_000);
        let seg: Vec<u64> = PrimeStream::with_segment(1_000_000, 10_007).collect();
        assert_eq!(simple, seg);
        assert_eq!(simple.len(), 78_498);
        let by_segments: Vec<u64> = PrimeStream::with_segment(1_000_000, 4096)
            .map_segments(Execution::Parallel, |ps| ps.to_vec())
            .into_iter()
            .flatten()
            .collect();
        assert_eq!(simple, by_segments);
        assert_eq!(PrimeStream::new(2).collect::<Vec<_>>(), vec![2]);
        assert_eq!(PrimeStream::new(1).count(), 0);
    }

    #[test]
    fn rho_examples() {
        let f0 = poly("k^2+3");
        assert_eq!(rho(&f0, 2), 1);
        assert_eq!(rho(&f0, 3), 1);
        assert_eq!(rho(&f0, 7), 2);
        assert_eq!(rho(&poly("2k+1"), 2), 0);
        assert_eq!(rho(&poly("k^2+k"), 2), 2);
    }

    #[test]
    fn rho_squarefree_examples() {
        let f0 = poly("k^2+3");
        assert_eq!(rho_squarefree(&f0, 1).unwrap(), 1);
        assert_eq!(rho_squarefree(&f0, 21).unwrap(), 2);
        assert_eq!(brute_count(&f0, 21), 2);
        assert_eq!(rho_squarefree(&f0, 6).unwrap(), 1);
        assert!(matches!(rho_squarefree(&f0, 12), Err(Error::NotSquarefreeModulus(12))));
    }

    #[test]
    fn rho_split_examples() {
        let factors = [poly("k"), poly("2k+1")];
        let prod = factors[0].mul(&factors[1]);
        let disc = prod.discriminant().unwrap().abs_disc;
        assert_eq!(disc, 1);
        assert_eq!(rho_split(&factors, &disc, 5), (2, SplitFlag::Exact));
        assert_eq!(rho(&prod, 5), 2);
        assert_eq!(rho_split(&factors, &disc, 2).0, 1);
        assert_eq!(rho(&prod, 2), 1);
    }

    #[test]
    fn legendre_examples() {
        assert_eq!(legendre(-3, 7), 1);
        assert_eq!(legendre(21, 7), 0);
        assert_eq!(legendre(3, 7), -1);
    }

    #[test]
    fn k2_plus_3_identity_up_to_a_million() {
        let f0 = poly("k^2+3");
        let table = RhoTable::build(&f0, 1_000_000, Execution::Parallel);
        for &(p, r) in table.entries.iter().filter(|(p, _)| *p > 3) {
            assert_eq!(r as i64, 1 + legendre(-3, p) as i64, "p = {p}");
        }
        assert_eq!(table.get(7), Some(2));
    }

    #[test]
    fn large_primes_use_gcd_path() {
        let f = poly("2k^6+3");
        for p in PrimeStream::new(20_000).filter(|&p| p > BRUTE_FORCE_CROSSOVER).take(40) {
            let fp = f.reduce(p);
            let brute = (0..p).filter(|&x| fp.eval(x) == 0).count() as u64;
            assert_eq!(rho(&f, p), brute);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn gcd_method_matches_brute_force(c in proptest::collection::vec(-1000i64..1000, 2..10)) {
            let Ok(f) = IntPolynomial::from_i64(&c) else { return Ok(()) };
            for p in primes_up_to(10_000).into_iter().step_by(37) {
                let fp = f.reduce(p);
                let brute = if fp.is_zero() { p } else { (0..p).filter(|&x| fp.eval(x) == 0).count() as u64 };
                let fast = if fp.is_zero() { p } else { fp.root_part().degree().unwrap_or(0) as u64 };
                prop_assert_eq!(brute, fast);
            }
        }

        #[test]
        fn crt_consistency(c in proptest::collection::vec(-30i64..30, 2..5), d in 1u64..400) {
            let Ok(f) = IntPolynomial::from_i64(&c) else { return Ok(()) };
            if let Ok(r) = rho_squarefree(&f, d) {
                prop_assert_eq!(r, brute_count(&f, d));
            }
        }

        #[test]
        fn splitting_above_the_discriminant(a in -20i64..20, b in -20i64..20, c in 1i64..5) {
            let f1 = IntPolynomial::from_i64(&[a, 0, 1]).unwrap();
            let f2 = IntPolynomial::from_i64(&[b, c]).unwrap();
            let prod = f1.mul(&f2);
            let Ok(disc) = prod.discriminant() else { return Ok(()) };
            for p in primes_up_to(3000) {
                if disc.abs_disc < p {
                    prop_assert_eq!(rho(&prod, p), rho(&f1, p) + rho(&f2, p));
                }
            }
        }
    }
}
