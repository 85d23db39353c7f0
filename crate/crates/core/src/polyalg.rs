//! Exact integer polynomials: parsing, discriminants, irreducibility
//! certificates and fixed prime divisors.

use std::collections::BTreeSet;
use std::fmt;

use rug::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ffpoly::FpPoly;
use crate::modarith::primes_up_to;
use crate::rignum::{Precision, XInterval};

/// Integer polynomial, constant term first, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntPolynomial {
    coeffs: Vec<Integer>,
    var: char,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<Integer>, var: char) -> Result<Self> {
        while coeffs.last().is_some_and(|c| *c == 0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return Err(Error::ZeroPolynomial);
        }
        Ok(IntPolynomial { coeffs, var })
    }

    pub fn from_i64(coeffs: &[i64]) -> Result<Self> {
        IntPolynomial::new(coeffs.iter().map(|&c| Integer::from(c)).collect(), 'k')
    }

    /// The identity polynomial `k`.
    pub fn identity() -> Self {
        IntPolynomial::from_i64(&[0, 1]).expect("nonzero")
    }

    pub fn parse(text: &str) -> Result<Self> {
        Parser::new(text).parse()
    }

    pub fn coeffs(&self) -> &[Integer] {
        &self.coeffs
    }

    pub fn var(&self) -> char {
        self.var
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> &Integer {
        self.coeffs.last().expect("nonzero polynomial")
    }

    pub fn constant(&self) -> &Integer {
        &self.coeffs[0]
    }

    pub fn eval(&self, x: &Integer) -> Integer {
        let mut acc = Integer::new();
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    pub fn eval_i64(&self, x: i64) -> Integer {
        self.eval(&Integer::from(x))
    }

    pub fn content(&self) -> Integer {
        self.coeffs
            .iter()
            .fold(Integer::new(), |g, c| g.gcd(c))
    }

    pub fn derivative(&self) -> Option<IntPolynomial> {
        if self.degree() == 0 {
            return None;
        }
        let c = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, a)| Integer::from(a * i as u64))
            .collect();
        IntPolynomial::new(c, self.var).ok()
    }

    pub fn mul(&self, o: &IntPolynomial) -> IntPolynomial {
        let mut c = vec![Integer::new(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        IntPolynomial::new(c, self.var).expect("product of nonzero polynomials")
    }

    /// Reduction modulo a prime, which may drop the degree.
    pub fn reduce(&self, p: u64) -> FpPoly {
        let c = self
            .coeffs
            .iter()
            .map(|a| a.mod_u64(p))
            .collect();
        FpPoly::new(p, c)
    }

    pub fn discriminant(&self) -> Result<DiscriminantData> {
        DiscriminantData::of(self)
    }

    /// Sum of `|a_j| / a_d` over all coefficients.
    pub fn coefficient_ratio_sum(&self) -> rug::Rational {
        let lead = Integer::from(self.leading().abs_ref());
        let s: Integer = self.coeffs.iter().map(|c| Integer::from(c.abs_ref())).sum();
        rug::Rational::from((s, lead))
    }
}

trait PowRef {
    fn pow_ref(&self, e: u32) -> Integer;
}

impl PowRef for Integer {
    fn pow_ref(&self, e: u32) -> Integer {
        use rug::ops::Pow;
        Integer::from(self.pow(e))
    }
}

trait ModU64 {
    fn mod_u64(&self, p: u64) -> u64;
}

impl ModU64 for Integer {
    fn mod_u64(&self, p: u64) -> u64 {
        let m = Integer::from(p);
        let mut r = Integer::from(self % &m);
        if r < 0 {
            r += &m;
        }
        r.to_u64().expect("residue fits")
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if *c == 0 {
                continue;
            }
            let neg = *c < 0;
            let abs = Integer::from(c.abs_ref());
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let v = self.var;
            match (i, abs == 1) {
                (0, _) => write!(f, "{abs}")?,
                (1, true) => write!(f, "{v}")?,
                (1, false) => write!(f, "{abs}*{v}")?,
                (_, true) => write!(f, "{v}^{i}")?,
                (_, false) => write!(f, "{abs}*{v}^{i}")?,
            }
        }
        Ok(())
    }
}

impl Serialize for IntPolynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for IntPolynomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        IntPolynomial::parse(&s).map_err(serde::de::Error::custom)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    var: Option<char>,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser {
            src: text.as_bytes(),
            pos: 0,
            var: None,
        }
    }

    fn err(&self, msg: &str) -> Error {
        Error::Parse {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn integer(&mut self) -> Option<Integer> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return None;
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).ok()?;
        Integer::from_str_radix(s, 10).ok()
    }

    fn term(&mut self, coeffs: &mut Vec<Integer>, sign: i32) -> Result<()> {
        let coef = self.integer();
        let mut saw_star = false;
        if self.peek() == Some(b'*') {
            if coef.is_none() {
                return Err(self.err("'*' without a coefficient"));
            }
            self.pos += 1;
            saw_star = true;
        }
        let mut exp = 0usize;
        match self.peek() {
            Some(ch) if ch.is_ascii_alphabetic() => {
                let ch = ch as char;
                match self.var {
                    None => self.var = Some(ch),
                    Some(v) if v != ch => return Err(self.err("more than one variable letter")),
                    _ => {}
                }
                self.pos += 1;
                exp = 1;
                if self.peek() == Some(b'^') {
                    self.pos += 1;
                    let e = self.integer().ok_or_else(|| self.err("expected exponent"))?;
                    exp = e
                        .to_usize()
                        .filter(|&e| e <= 10_000)
                        .ok_or_else(|| self.err("exponent too large"))?;
                }
            }
            _ => {
                if saw_star {
                    return Err(self.err("expected variable after '*'"));
                }
                if coef.is_none() {
                    return Err(self.err("expected a term"));
                }
            }
        }
        let mut c = coef.unwrap_or_else(|| Integer::from(1));
        if sign < 0 {
            c = -c;
        }
        if coeffs.len() <= exp {
            coeffs.resize(exp + 1, Integer::new());
        }
        coeffs[exp] += c;
        Ok(())
    }

    fn parse(mut self) -> Result<IntPolynomial> {
        let mut coeffs = Vec::new();
        let mut sign = 1;
        match self.peek() {
            Some(b'-') => {
                sign = -1;
                self.pos += 1;
            }
            Some(b'+') => self.pos += 1,
            None => return Err(self.err("empty input")),
            _ => {}
        }
        self.term(&mut coeffs, sign)?;
        while let Some(ch) = self.peek() {
            sign = match ch {
                b'+' => 1,
                b'-' => -1,
                _ => return Err(self.err("expected '+' or '-'")),
            };
            self.pos += 1;
            self.term(&mut coeffs, sign)?;
        }
        IntPolynomial::new(coeffs, self.var.unwrap_or('k'))
    }
}

/// Resultant of two nonzero integer polynomials by the subresultant
/// pseudo-remainder sequence.
pub fn resultant(a: &IntPolynomial, b: &IntPolynomial) -> Integer {
    let mut a = a.coeffs.clone();
    let mut b = b.coeffs.clone();
    let deg = |v: &Vec<Integer>| v.len() - 1;
    let mut s = 1i32;
    if deg(&a) < deg(&b) {
        if deg(&a) % 2 == 1 && deg(&b) % 2 == 1 {
            s = -s;
        }
        std::mem::swap(&mut a, &mut b);
    }
    if deg(&b) == 0 {
        return b[0].pow_ref(deg(&a) as u32);
    }
    let ca = content(&a);
    let cb = content(&b);
    let t = ca.pow_ref(deg(&b) as u32) * cb.pow_ref(deg(&a) as u32);
    for c in a.iter_mut() {
        c.div_exact_mut(&ca);
    }
    for c in b.iter_mut() {
        c.div_exact_mut(&cb);
    }
    let mut g = Integer::from(1);
    let mut h = Integer::from(1);
    loop {
        let delta = deg(&a) - deg(&b);
        if deg(&a) % 2 == 1 && deg(&b) % 2 == 1 {
            s = -s;
        }
        let r = pseudo_rem(&a, &b);
        a = b;
        if r.is_empty() {
            return Integer::new();
        }
        let div = g.clone() * h.pow_ref(delta as u32);
        b = r.into_iter().map(|c| c.div_exact(&div)).collect();
        g = a.last().unwrap().clone();
        // h <- g^delta / h^(delta - 1)
        h = if delta == 0 {
            h
        } else {
            g.pow_ref(delta as u32).div_exact(&h.pow_ref(delta as u32 - 1))
        };
        if deg(&b) == 0 {
            let da = deg(&a) as u32;
            let num = b[0].pow_ref(da);
            let h_final = if da == 0 {
                Integer::from(1)
            } else {
                num.div_exact(&h.pow_ref(da - 1))
            };
            return Integer::from(s) * t * h_final;
        }
    }
}

fn content(v: &[Integer]) -> Integer {
    let g = v.iter().fold(Integer::new(), |g, c| g.gcd(c));
    if g == 0 {
        Integer::from(1)
    } else {
        g
    }
}

/// `lc(b)^(deg a - deg b + 1) * a mod b`, trimmed.
fn pseudo_rem(a: &[Integer], b: &[Integer]) -> Vec<Integer> {
    let mut r: Vec<Integer> = a.to_vec();
    let db = b.len() - 1;
    let lb = &b[db];
    let mut e = a.len() - b.len() + 1;
    while r.len() >= b.len() {
        let lr = r.last().unwrap().clone();
        let shift = r.len() - b.len();
        for c in r.iter_mut() {
            *c *= lb;
        }
        for (j, bj) in b.iter().enumerate() {
            r[shift + j] -= Integer::from(&lr * bj);
        }
        r.pop();
        while r.last().is_some_and(|c| *c == 0) {
            r.pop();
        }
        e -= 1;
    }
    if e > 0 {
        let f = lb.pow_ref(e as u32);
        for c in r.iter_mut() {
            *c *= &f;
        }
    }
    r
}

/// Discriminant data for a polynomial of degree at least one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscriminantData {
    #[serde(with = "int_str")]
    pub disc: Integer,
    #[serde(with = "int_str")]
    pub abs_disc: Integer,
    #[serde(with = "int_str")]
    pub weighted_disc: Integer,
}

impl DiscriminantData {
    pub fn of(f: &IntPolynomial) -> Result<Self> {
        let d = f.degree();
        if d == 0 {
            return Err(Error::Invalid("constant polynomial has no discriminant".into()));
        }
        let disc = if d == 1 {
            Integer::from(1)
        } else {
            let fp = f.derivative().expect("degree >= 1");
            let res = resultant(f, &fp);
            let sign: i32 = if (d * (d - 1) / 2) % 2 == 1 { -1 } else { 1 };
            (res * sign).div_exact(f.leading())
        };
        if disc == 0 {
            return Err(Error::NotSquarefree);
        }
        let abs_disc = Integer::from(disc.abs_ref());
        let e = ((d - 1) * d.saturating_sub(2)) as u32;
        let weighted_disc = Integer::from(f.leading().abs_ref()).pow_ref(e) * &abs_disc;
        Ok(DiscriminantData {
            disc,
            abs_disc,
            weighted_disc,
        })
    }

    /// `max(2, sqrt(weighted_disc))` enclosed outward.
    pub fn m_f(&self, prec: Precision) -> XInterval {
        let two = XInterval::from_int(2, prec);
        let root = XInterval::from_integer(&self.weighted_disc, prec)
            .sqrt()
            .expect("nonnegative");
        two.max(&root)
    }
}

pub(crate) mod int_str {
    use rug::Integer;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Integer, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Integer, D::Error> {
        let s = String::deserialize(d)?;
        Integer::from_str_radix(&s, 10).map_err(serde::de::Error::custom)
    }
}

/// Outcome of the opportunistic irreducibility test.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Irreducibility {
    /// Degree patterns modulo the listed primes leave no room for a factor.
    Proven { primes: Vec<u64> },
    Unproven { primes_tried: usize },
    Reducible { reason: String },
}

impl Irreducibility {
    pub fn is_proven(&self) -> bool {
        matches!(self, Irreducibility::Proven { .. })
    }
}

/// Subset sums of a degree multiset, as a bitmask over `0..=d`.
fn subset_sums(degs: &[usize], d: usize) -> Vec<bool> {
    let mut ok = vec![false; d + 1];
    ok[0] = true;
    for &k in degs {
        for s in (k..=d).rev() {
            if ok[s - k] {
                ok[s] = true;
            }
        }
    }
    ok
}

fn small_divisors(n: &Integer, limit: u64) -> Option<Vec<Integer>> {
    let n = n.to_u64().filter(|&v| v <= limit)?;
    let mut out = Vec::new();
    let mut i = 1u64;
    while i * i <= n {
        if n % i == 0 {
            out.push(Integer::from(i));
            if i * i != n {
                out.push(Integer::from(n / i));
            }
        }
        i += 1;
    }
    Some(out)
}

/// Looks for a rational root `p/q` with `p | a_0` and `q | c`.
fn find_rational_root(f: &IntPolynomial) -> Option<(Integer, Integer)> {
    let a0 = Integer::from(f.constant().abs_ref());
    if a0 == 0 {
        return Some((Integer::new(), Integer::from(1)));
    }
    let c = Integer::from(f.leading().abs_ref());
    let ps = small_divisors(&a0, 1 << 40)?;
    let qs = small_divisors(&c, 1 << 40)?;
    for q in &qs {
        for p in &ps {
            if Integer::from(p.gcd_ref(q)) != 1 {
                continue;
            }
            for num in [p.clone(), Integer::from(-p)] {
                // q^d F(p/q) = sum a_j p^j q^(d-j)
                let d = f.degree() as u32;
                let mut acc = Integer::new();
                for (j, a) in f.coeffs().iter().enumerate() {
                    let j = j as u32;
                    acc += (a * num.pow_ref(j)) * q.pow_ref(d - j);
                }
                if acc == 0 {
                    return Some((num, q.clone()));
                }
            }
        }
    }
    None
}

/// Tries to certify irreducibility over the rationals using factor-degree
/// patterns modulo primes up to `prime_budget`.
pub fn irreducibility_certificate(f: &IntPolynomial, prime_budget: u64) -> Result<Irreducibility> {
    let data = DiscriminantData::of(f)?;
    let d = f.degree();
    let cont = f.content();
    if cont != 1 {
        return Ok(Irreducibility::Reducible {
            reason: format!("content {cont} divides every coefficient"),
        });
    }
    if d == 1 {
        return Ok(Irreducibility::Proven { primes: Vec::new() });
    }
    if let Some((p, q)) = find_rational_root(f) {
        return Ok(Irreducibility::Reducible {
            reason: format!("rational root {p}/{q}"),
        });
    }
    let bad = Integer::from(f.leading() * &data.disc);
    let mut possible = vec![true; d + 1];
    let mut used = Vec::new();
    let mut tried = 0usize;
    for p in primes_up_to(prime_budget) {
        if bad.is_divisible(&Integer::from(p)) {
            continue;
        }
        tried += 1;
        let degs = f.reduce(p).ddf_degrees();
        let sums = subset_sums(&degs, d);
        let before: usize = possible.iter().filter(|&&b| b).count();
        for (k, ok) in possible.iter_mut().enumerate() {
            *ok &= sums[k];
        }
        if possible.iter().filter(|&&b| b).count() < before {
            used.push(p);
        }
        if possible[1..d].iter().all(|&b| !b) {
            return Ok(Irreducibility::Proven { primes: used });
        }
    }
    Ok(Irreducibility::Unproven { primes_tried: tried })
}

/// Smallest prime `p` with `F(n) = 0 mod p` for every `n`, if any.
pub fn fixed_divisor_check(f: &IntPolynomial) -> Option<u64> {
    let mut candidates: BTreeSet<u64> = primes_up_to(f.degree() as u64).into_iter().collect();
    let cont = f.content();
    if cont != 1 {
        let mut c = cont;
        let mut q = 2u64;
        while c > 1 && q < 1_000_000 {
            if c.is_divisible(&Integer::from(q)) {
                candidates.insert(q);
                while c.is_divisible(&Integer::from(q)) {
                    c /= q as u32;
                }
            }
            q += 1;
        }
        if let Some(rest) = c.to_u64().filter(|&r| r > 1) {
            candidates.insert(rest);
        }
    }
    candidates
        .into_iter()
        .find(|&p| (0..p).all(|n| f.eval(&Integer::from(n)).is_divisible(&Integer::from(p))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn poly(s: &str) -> IntPolynomial {
        IntPolynomial::parse(s).unwrap()
    }

    #[test]
    fn parses_case_studies() {
        let f = poly("k^2 + 3");
        assert_eq!(f.coeffs(), &[Integer::from(3), Integer::new(), Integer::from(1)]);
        assert_eq!(poly("k").degree(), 1);
        let g = poly("2*k^6 + 3");
        assert_eq!(g.degree(), 6);
        assert_eq!(*g.leading(), 2);
        assert_eq!(poly("-x^3+2x - 7").to_string(), "-x^3 + 2*x - 7");
    }

    #[test]
    fn parse_errors_carry_positions() {
        assert!(matches!(IntPolynomial::parse("k^2 + + 3"), Err(Error::Parse { pos: 6, .. })));
        assert!(matches!(IntPolynomial::parse("k - k"), Err(Error::ZeroPolynomial)));
        assert!(IntPolynomial::parse("k + x").is_err());
        assert!(IntPolynomial::parse("").is_err());
    }

    #[test]
    fn discriminants_of_case_studies() {
        let d0 = poly("k^2+3").discriminant().unwrap();
        assert_eq!(d0.abs_disc, 12);
        assert_eq!(d0.weighted_disc, 12);
        let d1 = poly("k^3-5").discriminant().unwrap();
        assert_eq!(d1.abs_disc, 675);
        assert_eq!(d1.weighted_disc, 675);
        let d3 = poly("2*k^6+3").discriminant().unwrap();
        assert_eq!(d3.abs_disc, 362_797_056u64);
        assert_eq!(d3.weighted_disc, 380_420_285_792_256u64);
        let lin = poly("2*k+1").discriminant().unwrap();
        assert_eq!(lin.weighted_disc, 1);
    }

    #[test]
    fn squarefree_failure() {
        assert!(matches!(poly("k^2+2k+1").discriminant(), Err(Error::NotSquarefree)));
    }

    #[test]
    fn irreducibility_examples() {
        assert!(irreducibility_certificate(&poly("k^2+3"), 200).unwrap().is_proven());
        assert!(matches!(
            irreducibility_certificate(&poly("k^2-1"), 200).unwrap(),
            Irreducibility::Reducible { .. }
        ));
        assert!(matches!(
            irreducibility_certificate(&poly("k^4+1"), 200).unwrap(),
            Irreducibility::Unproven { .. }
        ));
        assert!(irreducibility_certificate(&poly("2k^6+3"), 200).unwrap().is_proven());
        // Reducible with no rational root.
        let q = poly("k^2+1").mul(&poly("k^2+2"));
        assert!(!irreducibility_certificate(&q, 500).unwrap().is_proven());
    }

    #[test]
    fn fixed_divisors() {
        assert_eq!(fixed_divisor_check(&poly("k^2+k")), Some(2));
        assert_eq!(fixed_divisor_check(&poly("k^2+3")), None);
        assert_eq!(fixed_divisor_check(&poly("2k^2+k")), None);
        assert_eq!(fixed_divisor_check(&poly("k^3-k")), Some(2));
        assert_eq!(fixed_divisor_check(&poly("6k+6")), Some(2));
    }

    /// Sylvester-matrix determinant by fraction-free elimination.
    fn sylvester_resultant(a: &IntPolynomial, b: &IntPolynomial) -> Integer {
        let (m, n) = (a.degree(), b.degree());
        let size = m + n;
        let mut mat = vec![vec![Integer::new(); size]; size];
        for i in 0..n {
            for (j, c) in a.coeffs().iter().rev().enumerate() {
                mat[i][i + j] = c.clone();
            }
        }
        for i in 0..m {
            for (j, c) in b.coeffs().iter().rev().enumerate() {
                mat[n + i][i + j] = c.clone();
            }
        }
        let mut sign = Integer::from(1);
        let mut prev = Integer::from(1);
        for k in 0..size {
            if mat[k][k] == 0 {
                let Some(r) = (k + 1..size).find(|&r| mat[r][k] != 0) else {
                    return Integer::new();
                };
                mat.swap(k, r);
                sign = -sign;
            }
            for i in k + 1..size {
                for j in k + 1..size {
                    let v = Integer::from(&mat[i][j] * &mat[k][k]) - Integer::from(&mat[i][k] * &mat[k][j]);
                    mat[i][j] = v.div_exact(&prev);
                }
            }
            prev = mat[k][k].clone();
        }
        sign * prev
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn quadratic_and_cubic_closed_forms(a in 1i64..20, b in -20i64..20, c in -20i64..20, p in -20i64..20, q in -20i64..20) {
            let f = IntPolynomial::from_i64(&[c, b, a]).unwrap();
            let expect = b * b - 4 * a * c;
            match f.discriminant() {
                Ok(d) => prop_assert_eq!(d.disc, expect),
                Err(_) => prop_assert_eq!(expect, 0),
            }
            let g = IntPolynomial::from_i64(&[q, p, 0, 1]).unwrap();
            let expect = -4 * p * p * p - 27 * q * q;
            match g.discriminant() {
                Ok(d) => prop_assert_eq!(d.disc, expect),
                Err(_) => prop_assert_eq!(expect, 0),
            }
        }

        #[test]
        fn subresultant_matches_sylvester(
            a in proptest::collection::vec(-9i64..10, 2..7),
            b in proptest::collection::vec(-9i64..10, 2..6),
        ) {
            let (Ok(fa), Ok(fb)) = (IntPolynomial::from_i64(&a), IntPolynomial::from_i64(&b)) else {
                return Ok(());
            };
            if fa.degree() == 0 || fb.degree() == 0 {
                return Ok(());
            }
            prop_assert_eq!(resultant(&fa, &fb), sylvester_resultant(&fa, &fb));
        }

        #[test]
        fn print_parse_round_trip(c in proptest::collection::vec(-1000i64..1000, 1..9)) {
            if let Ok(f) = IntPolynomial::from_i64(&c) {
                prop_assert_eq!(IntPolynomial::parse(&f.to_string()).unwrap(), f);
            }
        }

        #[test]
        fn weighted_equals_plain_for_low_degree(c in proptest::collection::vec(-50i64..50, 2..4)) {
            if let Ok(f) = IntPolynomial::from_i64(&c) {
                if let Ok(d) = f.discriminant() {
                    prop_assert_eq!(d.weighted_disc, d.abs_disc);
                }
            }
        }
    }
}
