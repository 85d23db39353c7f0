//! Dense polynomials over the prime field with `p < 2^63` elements.
//!
//! Coefficients are stored constant term first and kept reduced. The zero
//! polynomial is the empty vector.

use rand::Rng;

#[inline]
pub fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

#[inline]
pub fn addmod(a: u64, b: u64, p: u64) -> u64 {
    let s = a as u128 + b as u128;
    (s % p as u128) as u64
}

#[inline]
pub fn submod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        p - (b - a)
    }
}

pub fn powmod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, b, p);
        }
        b = mulmod(b, b, p);
        e >>= 1;
    }
    r
}

/// Inverse of a nonzero residue by Fermat.
pub fn invmod(a: u64, p: u64) -> u64 {
    debug_assert!(!a.is_multiple_of(p));
    powmod(a, p - 2, p)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FpPoly {
    pub p: u64,
    pub c: Vec<u64>,
}

impl FpPoly {
    pub fn new(p: u64, mut c: Vec<u64>) -> Self {
        for v in c.iter_mut() {
            *v %= p;
        }
        let mut f = FpPoly { p, c };
        f.trim();
        f
    }

    pub fn zero(p: u64) -> Self {
        FpPoly { p, c: Vec::new() }
    }

    pub fn one(p: u64) -> Self {
        FpPoly::new(p, vec![1])
    }

    /// The monomial `x`.
    pub fn x(p: u64) -> Self {
        FpPoly::new(p, vec![0, 1])
    }

    fn trim(&mut self) {
        while self.c.last() == Some(&0) {
            self.c.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn lead(&self) -> u64 {
        *self.c.last().unwrap_or(&0)
    }

    pub fn eval(&self, x: u64) -> u64 {
        let p = self.p;
        self.c.iter().rev().fold(0, |acc, &a| addmod(mulmod(acc, x, p), a, p))
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let inv = invmod(self.lead(), self.p);
        FpPoly {
            p: self.p,
            c: self.c.iter().map(|&a| mulmod(a, inv, self.p)).collect(),
        }
    }

    pub fn add(&self, o: &FpPoly) -> FpPoly {
        let n = self.c.len().max(o.c.len());
        let c = (0..n)
            .map(|i| {
                addmod(
                    *self.c.get(i).unwrap_or(&0),
                    *o.c.get(i).unwrap_or(&0),
                    self.p,
                )
            })
            .collect();
        FpPoly::new(self.p, c)
    }

    pub fn sub(&self, o: &FpPoly) -> FpPoly {
        let n = self.c.len().max(o.c.len());
        let c = (0..n)
            .map(|i| {
                submod(
                    *self.c.get(i).unwrap_or(&0),
                    *o.c.get(i).unwrap_or(&0),
                    self.p,
                )
            })
            .collect();
        FpPoly::new(self.p, c)
    }

    pub fn mul(&self, o: &FpPoly) -> FpPoly {
        if self.is_zero() || o.is_zero() {
            return FpPoly::zero(self.p);
        }
        let p = self.p;
        let mut acc = vec![0u128; self.c.len() + o.c.len() - 1];
        let pp = p as u128;
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.c.iter().enumerate() {
                acc[i + j] = (acc[i + j] + a as u128 * b as u128) % pp;
            }
        }
        FpPoly::new(p, acc.into_iter().map(|v| v as u64).collect())
    }

    /// Quotient and remainder by a nonzero divisor.
    pub fn divrem(&self, d: &FpPoly) -> (FpPoly, FpPoly) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let p = self.p;
        let dd = d.c.len() - 1;
        if self.c.len() < d.c.len() {
            return (FpPoly::zero(p), self.clone());
        }
        let inv = invmod(d.lead(), p);
        let mut r = self.c.clone();
        let mut q = vec![0u64; self.c.len() - dd];
        for i in (0..q.len()).rev() {
            let coef = mulmod(r[i + dd], inv, p);
            q[i] = coef;
            if coef == 0 {
                continue;
            }
            for (j, &b) in d.c.iter().enumerate() {
                r[i + j] = submod(r[i + j], mulmod(coef, b, p), p);
            }
        }
        r.truncate(dd);
        (FpPoly::new(p, q), FpPoly::new(p, r))
    }

    pub fn rem(&self, d: &FpPoly) -> FpPoly {
        self.divrem(d).1
    }

    pub fn mulmod_poly(&self, o: &FpPoly, m: &FpPoly) -> FpPoly {
        self.mul(o).rem(m)
    }

    /// `self^e mod m`.
    pub fn powmod_poly(&self, mut e: u64, m: &FpPoly) -> FpPoly {
        let mut base = self.rem(m);
        let mut r = FpPoly::one(self.p).rem(m);
        while e > 0 {
            if e & 1 == 1 {
                r = r.mulmod_poly(&base, m);
            }
            e >>= 1;
            if e > 0 {
                base = base.mulmod_poly(&base, m);
            }
        }
        r
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, o: &FpPoly) -> FpPoly {
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> FpPoly {
        let p = self.p;
        let c = self
            .c
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &a)| mulmod(a, (i as u64) % p, p))
            .collect();
        FpPoly::new(p, c)
    }

    /// Product of the distinct linear factors, `gcd(f, x^p - x)`.
    pub fn root_part(&self) -> FpPoly {
        let f = self.monic();
        if f.degree().unwrap_or(0) == 0 {
            return FpPoly::one(self.p);
        }
        let xp = FpPoly::x(self.p).powmod_poly(self.p, &f);
        f.gcd(&xp.sub(&FpPoly::x(self.p)))
    }

    /// Number of distinct roots; the zero polynomial vanishes everywhere.
    pub fn count_roots(&self) -> u64 {
        if self.is_zero() {
            return self.p;
        }
        if self.p < 64 {
            return (0..self.p).filter(|&x| self.eval(x) == 0).count() as u64;
        }
        self.root_part().degree().unwrap_or(0) as u64
    }

    /// Distinct roots in increasing order.
    pub fn roots<R: Rng>(&self, rng: &mut R) -> Vec<u64> {
        if self.is_zero() {
            return (0..self.p).collect();
        }
        if self.p < 64 {
            return (0..self.p).filter(|&x| self.eval(x) == 0).collect();
        }
        let mut out = Vec::new();
        let g = self.root_part();
        split_linear(&g, rng, &mut out);
        out.sort_unstable();
        out
    }

    /// Degrees of the irreducible factors of a squarefree polynomial,
    /// by distinct-degree factorization.
    pub fn ddf_degrees(&self) -> Vec<usize> {
        let p = self.p;
        let mut f = self.monic();
        let mut out = Vec::new();
        let x = FpPoly::x(p);
        let mut h = x.clone();
        let mut i = 0;
        while f.degree().unwrap_or(0) >= 2 * (i + 1) {
            i += 1;
            h = h.powmod_poly(p, &f);
            let g = f.gcd(&h.sub(&x));
            if let Some(dg) = g.degree() {
                if dg > 0 {
                    out.extend(std::iter::repeat_n(i, dg / i));
                    f = f.divrem(&g).0;
                    h = h.rem(&f);
                }
            }
        }
        if let Some(df) = f.degree() {
            if df > 0 {
                out.push(df);
            }
        }
        out.sort_unstable();
        out
    }
}

/// Equal-degree splitting of a monic product of distinct linear factors.
fn split_linear<R: Rng>(g: &FpPoly, rng: &mut R, out: &mut Vec<u64>) {
    let p = g.p;
    match g.degree() {
        None | Some(0) => return,
        Some(1) => {
            let m = g.monic();
            out.push((p - m.c[0]) % p);
            return;
        }
        _ => {}
    }
    loop {
        let a = rng.gen_range(0..p);
        let t = FpPoly::new(p, vec![a, 1]);
        let h = t.powmod_poly((p - 1) / 2, g).sub(&FpPoly::one(p));
        let d = g.gcd(&h);
        let dd = d.degree().unwrap_or(0);
        if dd > 0 && dd < g.degree().unwrap() {
            let q = g.divrem(&d).0;
            split_linear(&d, rng, out);
            split_linear(&q.monic(), rng, out);
            return;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn roots_of_k2_plus_3_mod_7() {
        let f = FpPoly::new(7, vec![3, 0, 1]);
        assert_eq!(f.count_roots(), 2);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(f.roots(&mut rng), vec![2, 5]);
    }

    #[test]
    fn ddf_of_x4_plus_1_splits_into_quadratics_mod_3() {
        let f = FpPoly::new(3, vec![1, 0, 0, 0, 1]);
        assert_eq!(f.ddf_degrees(), vec![2, 2]);
        let g = FpPoly::new(5, vec![3, 0, 1]);
        assert_eq!(g.ddf_degrees(), vec![2]);
    }

    #[test]
    fn large_prime_roots_match_evaluation() {
        let p = 1_000_000_007u64;
        // (x-3)(x-10)(x^2+1)
        let f = FpPoly::new(p, vec![p - 3, 1])
            .mul(&FpPoly::new(p, vec![p - 10, 1]))
            .mul(&FpPoly::new(p, vec![1, 0, 1]));
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let r = f.roots(&mut rng);
        // -1 is a square mod p exactly when p = 1 mod 4.
        assert_eq!(p % 4, 3);
        assert_eq!(r, vec![3, 10]);
    }

    proptest! {
        #[test]
        fn gcd_method_matches_brute_force(c in proptest::collection::vec(0u64..1000, 1..8), pi in 0usize..6) {
            let p = [67u64, 101, 257, 499, 997, 1009][pi];
            let f = FpPoly::new(p, c);
            let brute = (0..p).filter(|&x| f.eval(x) == 0).count() as u64;
            let expected = if f.is_zero() { p } else { brute };
            prop_assert_eq!(f.count_roots(), expected);
            let mut rng = ChaCha8Rng::seed_from_u64(3);
            let roots = f.roots(&mut rng);
            prop_assert_eq!(roots.len() as u64, expected);
        }
    }
}
