use rug::integer::IsPrime;
use rug::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ffpoly::{mulmod, powmod};
use crate::modarith::{primes_in_segment, primes_up_to};
use crate::paperconst::PolySystem;
use crate::par::{self, Execution};

pub const MAX_PI_F_LIMIT: u64 = 1_000_000_000;
pub const MAX_SG_LIMIT: u64 = 10_000_000_000;

/// These bases make Miller-Rabin deterministic below `3.3 * 10^24`.
const MR_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &MR_BASES {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// How primality of values beyond 64 bits was decided.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PrimalityMethod {
    /// Every value fit in 64 bits.
    Deterministic,
    /// Some value needed GMP's Baillie-PSW plus 24 Miller-Rabin rounds.
    StrongPseudoprime,
}

fn is_prime_value(v: &Integer) -> (bool, bool) {
    if *v < 2 {
        return (false, false);
    }
    match v.to_u64() {
        Some(n) => (is_prime_u64(n), false),
        None => (v.is_probably_prime(24) != IsPrime::No, true),
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PiFCount {
    pub limit: u64,
    pub count: u64,
    pub method: PrimalityMethod,
}

/// `#{1 <= n <= N : F_i(n) prime for every i}`.
pub fn count_pi_f(system: &PolySystem, limit: u64, exec: Execution) -> Result<PiFCount> {
    if limit > MAX_PI_F_LIMIT {
        return Err(Error::Limit(format!("pi_F limit {limit} exceeds {MAX_PI_F_LIMIT}")));
    }
    const CHUNK: u64 = 1 << 14;
    let chunks: Vec<u64> = (0..limit.div_ceil(CHUNK)).collect();
    let parts = par::map(exec, &chunks, |&c| {
        let lo = c * CHUNK + 1;
        let hi = ((c + 1) * CHUNK).min(limit);
        let mut count = 0u64;
        let mut big = false;
        for n in lo..=hi {
            let arg = Integer::from(n);
            let mut all = true;
            for f in &system.factors {
                let (p, used) = is_prime_value(&f.eval(&arg));
                big |= used;
                if !p {
                    all = false;
                    break;
                }
            }
            count += all as u64;
        }
        (count, big)
    });
    let count = parts.iter().map(|p| p.0).sum();
    let big = parts.iter().any(|p| p.1);
    Ok(PiFCount {
        limit,
        count,
        method: if big { PrimalityMethod::StrongPseudoprime } else { PrimalityMethod::Deterministic },
    })
}

/// Independent count: GMP primality on every value, single-threaded.
pub fn count_pi_f_simple(system: &PolySystem, limit: u64) -> u64 {
    (1..=limit)
        .filter(|&n| {
            let arg = Integer::from(n);
            system.factors.iter().all(|f| {
                let v = f.eval(&arg);
                v > 1 && v.is_probably_prime(30) != IsPrime::No
            })
        })
        .count() as u64
}

/// `#{p <= N : p and 2p + 1 prime}` by a segmented sieve over `p` and a
/// matching segment over `2p + 1`.
pub fn sophie_germain_count(limit: u64, exec: Execution) -> Result<u64> {
    if limit > MAX_SG_LIMIT {
        return Err(Error::Limit(format!("Sophie Germain limit {limit} exceeds {MAX_SG_LIMIT}")));
    }
    if limit < 2 {
        return Ok(0);
    }
    const SEG: u64 = 1 << 18;
    let base = primes_up_to(((2 * limit + 1) as f64).sqrt() as u64 + 2);
    let segs: Vec<u64> = (0..(limit + 1).div_ceil(SEG)).collect();
    let counts = par::map(exec, &segs, |&s| {
        let lo = s * SEG;
        let hi = ((s + 1) * SEG).min(limit + 1);
        let ps = primes_in_segment(lo, hi, &base);
        let qs = primes_in_segment(2 * lo + 1, 2 * hi + 1, &base);
        let mut is_q = vec![false; (2 * (hi - lo)) as usize];
        for q in qs {
            is_q[(q - 2 * lo - 1) as usize] = true;
        }
        ps.iter().filter(|&&p| is_q[(2 * p + 1 - 2 * lo - 1) as usize]).count() as u64
    });
    Ok(counts.into_iter().sum())
}

/// Plain sieve of Eratosthenes up to `2N + 1`.
pub fn sophie_germain_simple(limit: u64) -> u64 {
    if limit < 2 {
        return 0;
    }
    let top = (2 * limit + 1) as usize;
    let mut composite = vec![false; top + 1];
    let mut i = 2;
    while i * i <= top {
        if !composite[i] {
            let mut j = i * i;
            while j <= top {
                composite[j] = true;
                j += i;
            }
        }
        i += 1;
    }
    (2..=limit as usize).filter(|&p| !composite[p] && !composite[2 * p + 1]).count() as u64
}

#[allow(clippy::too_many_arguments)]
fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, eps: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if depth == 0 || (left + right - whole).abs() <= 15.0 * eps {
        return left + right + (left + right - whole) / 15.0;
    }
    simpson(f, a, m, fa, flm, fm, left, eps / 2.0, depth - 1) + simpson(f, m, b, fm, frm, fb, right, eps / 2.0, depth - 1)
}

/// `int_2^N dt / log^g t` by adaptive Simpson in the variable `u = log t`.
pub fn log_integral_power(limit: f64, g: u32) -> f64 {
    let f = |u: f64| u.exp() / u.powi(g as i32);
    let (a, b) = (2f64.ln(), limit.ln());
    if b <= a {
        return 0.0;
    }
    let (fa, fb) = (f(a), f(b));
    let fm = f(0.5 * (a + b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson(&f, a, b, fa, fm, fb, whole, 1e-9 * limit, 40)
}

/// Heuristic prediction `S / prod deg F_i * int_2^N dt / log^g t`, given
/// the singular series `S`. Informational only.
pub fn bateman_horn(system: &PolySystem, limit: u64, singular_series: f64) -> f64 {
    let degs: f64 = system.factors.iter().map(|f| f.degree() as f64).product();
    singular_series / degs * log_integral_power(limit as f64, system.g())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::IntPolynomial;

    #[test]
    fn miller_rabin_small_and_strong_pseudoprimes() {
        let naive = |n: u64| n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d));
        for n in 0..5000 {
            assert_eq!(is_prime_u64(n), naive(n), "{n}");
        }
        // Strong pseudoprimes to several small bases.
        for n in [3_215_031_751u64, 2_152_302_898_747, 3_474_749_660_383, 341_550_071_728_321] {
            assert!(!is_prime_u64(n));
        }
        assert!(is_prime_u64(18_446_744_073_709_551_557));
    }

    #[test]
    fn sophie_germain_small() {
        assert_eq!(sophie_germain_count(10, Execution::Sequential).unwrap(), 3);
        assert_eq!(sophie_germain_count(1, Execution::Sequential).unwrap(), 0);
        assert_eq!(sophie_germain_simple(10), 3);
        for n in [2u64, 3, 5, 100, 1000, 54_321] {
            assert_eq!(sophie_germain_count(n, Execution::Parallel).unwrap(), sophie_germain_simple(n), "{n}");
        }
    }

    #[test]
    fn pi_f_small_values() {
        let f0 = PolySystem::single(IntPolynomial::parse("k^2+3").unwrap()).unwrap();
        // n = 2, 4, 8, 10 give 7, 19, 67, 103.
        assert_eq!(count_pi_f(&f0, 10, Execution::Sequential).unwrap().count, 4);
        assert_eq!(count_pi_f_simple(&f0, 10), 4);
        let sg = PolySystem::new(vec![IntPolynomial::parse("k").unwrap(), IntPolynomial::parse("2k+1").unwrap()]).unwrap();
        assert_eq!(count_pi_f(&sg, 10_000, Execution::Parallel).unwrap().count, sophie_germain_simple(10_000));
    }

    #[test]
    fn log_integral_matches_li() {
        // li(10^6) - li(2) = 78626.504...
        let v = log_integral_power(1e6, 1);
        assert!((v - 78_626.504).abs() < 0.01, "{v}");
    }
}
