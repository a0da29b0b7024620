use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use rand::Rng;

use super::{primes, FieldConstants, GlobalField, GlobalFieldDesc, PrimeOfK};
use crate::error::{Error, Result};
use crate::heights::HeightValue;

/// Polynomial over `F_q`, coefficients low-to-high, no trailing zeros.
/// Ordered by degree, then lexicographically from the leading coefficient,
/// which is the same as ordering by the base-`q` index.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct FpPoly(pub Vec<u64>);

impl PartialOrd for FpPoly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FpPoly {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.iter().rev().cmp(other.0.iter().rev()))
    }
}

impl FpPoly {
    pub fn zero() -> Self {
        FpPoly(Vec::new())
    }

    pub fn constant(c: u64) -> Self {
        FpPoly::new(vec![c])
    }

    pub fn x() -> Self {
        FpPoly(vec![0, 1])
    }

    pub fn new(mut coeffs: Vec<u64>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        FpPoly(coeffs)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn lead(&self) -> u64 {
        *self.0.last().unwrap_or(&0)
    }

    pub fn coeff(&self, i: usize) -> u64 {
        *self.0.get(i).unwrap_or(&0)
    }

    /// Polynomial whose base-`q` digits are those of `idx`.
    pub fn from_index(mut idx: u128, q: u64) -> Self {
        let mut c = Vec::new();
        while idx > 0 {
            c.push((idx % q as u128) as u64);
            idx /= q as u128;
        }
        FpPoly(c)
    }

    pub fn to_index(&self, q: u64) -> u128 {
        self.0.iter().rev().fold(0u128, |acc, &c| acc * q as u128 + c as u128)
    }

    pub fn display(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut terms = Vec::new();
        for (i, &c) in self.0.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let t = match (i, c) {
                (0, c) => c.to_string(),
                (1, 1) => "T".to_string(),
                (1, c) => format!("{c}T"),
                (i, 1) => format!("T^{i}"),
                (i, c) => format!("{c}T^{i}"),
            };
            terms.push(t);
        }
        terms.join("+")
    }
}

impl fmt::Display for FpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display())
    }
}

pub(crate) fn inv_mod(x: u64, q: u64) -> u64 {
    let (mut a, mut b) = (x as i128, q as i128);
    let (mut u, mut v) = (1i128, 0i128);
    while b != 0 {
        let t = a / b;
        (a, b) = (b, a - t * b);
        (u, v) = (v, u - t * v);
    }
    assert_eq!(a, 1, "{x} not invertible mod {q}");
    u.rem_euclid(q as i128) as u64
}

fn mulmod(a: u64, b: u64, q: u64) -> u64 {
    ((a as u128 * b as u128) % q as u128) as u64
}

pub(crate) fn padd(a: &FpPoly, b: &FpPoly, q: u64) -> FpPoly {
    let n = a.0.len().max(b.0.len());
    FpPoly::new((0..n).map(|i| (a.coeff(i) + b.coeff(i)) % q).collect())
}

pub(crate) fn pneg(a: &FpPoly, q: u64) -> FpPoly {
    FpPoly(a.0.iter().map(|&c| (q - c) % q).collect())
}

pub(crate) fn psub(a: &FpPoly, b: &FpPoly, q: u64) -> FpPoly {
    padd(a, &pneg(b, q), q)
}

pub(crate) fn pscale(a: &FpPoly, s: u64, q: u64) -> FpPoly {
    FpPoly::new(a.0.iter().map(|&c| mulmod(c, s, q)).collect())
}

pub(crate) fn pmul(a: &FpPoly, b: &FpPoly, q: u64) -> FpPoly {
    if a.is_zero() || b.is_zero() {
        return FpPoly::zero();
    }
    let mut out = vec![0u128; a.0.len() + b.0.len() - 1];
    for (i, &x) in a.0.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.0.iter().enumerate() {
            out[i + j] = (out[i + j] + x as u128 * y as u128) % q as u128;
        }
    }
    FpPoly::new(out.into_iter().map(|c| c as u64).collect())
}

pub(crate) fn pdivrem(a: &FpPoly, b: &FpPoly, q: u64) -> (FpPoly, FpPoly) {
    assert!(!b.is_zero(), "division by zero polynomial");
    let db = b.0.len() - 1;
    if a.0.len() <= db {
        return (FpPoly::zero(), a.clone());
    }
    let inv = inv_mod(b.lead(), q);
    let mut r = a.0.clone();
    let mut quo = vec![0u64; a.0.len() - db];
    for i in (0..quo.len()).rev() {
        let c = mulmod(r[i + db], inv, q);
        quo[i] = c;
        if c != 0 {
            for (j, &bj) in b.0.iter().enumerate() {
                r[i + j] = (r[i + j] + q - mulmod(c, bj, q)) % q;
            }
        }
    }
    r.truncate(db);
    (FpPoly::new(quo), FpPoly::new(r))
}

pub(crate) fn pmonic(a: &FpPoly, q: u64) -> FpPoly {
    if a.is_zero() {
        return a.clone();
    }
    pscale(a, inv_mod(a.lead(), q), q)
}

pub(crate) fn pgcd(a: &FpPoly, b: &FpPoly, q: u64) -> FpPoly {
    let (mut x, mut y) = (a.clone(), b.clone());
    while !y.is_zero() {
        let r = pdivrem(&x, &y, q).1;
        x = y;
        y = r;
    }
    pmonic(&x, q)
}

/// `base^e mod m`.
pub(crate) fn ppowmod(base: &FpPoly, e: &BigUint, m: &FpPoly, q: u64) -> FpPoly {
    let mut acc = pdivrem(&FpPoly::constant(1), m, q).1;
    let b = pdivrem(base, m, q).1;
    for i in (0..e.bits()).rev() {
        acc = pdivrem(&pmul(&acc, &acc, q), m, q).1;
        if e.bit(i) {
            acc = pdivrem(&pmul(&acc, &b, q), m, q).1;
        }
    }
    acc
}

fn prime_divisors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Rabin's irreducibility test for a polynomial of positive degree.
pub fn is_irreducible(f: &FpPoly, q: u64) -> bool {
    let n = match f.degree() {
        Some(0) | None => return false,
        Some(n) => n as u64,
    };
    let f = pmonic(f, q);
    let qb = BigUint::from(q);
    // frob[k] = T^{q^k} mod f
    let mut frob = vec![pdivrem(&FpPoly::x(), &f, q).1];
    for _ in 0..n {
        let next = ppowmod(frob.last().unwrap(), &qb, &f, q);
        frob.push(next);
    }
    let t = pdivrem(&FpPoly::x(), &f, q).1;
    if frob[n as usize] != t {
        return false;
    }
    for r in prime_divisors(n) {
        let h = psub(&frob[(n / r) as usize], &FpPoly::x(), q);
        if pgcd(&h, &f, q).degree() != Some(0) {
            return false;
        }
    }
    true
}

/// `K = F_q(T)` with ring of integers `F_q[T]`; the place at infinity is the
/// distinguished infinite place.
#[derive(Clone, Debug)]
pub struct FunctionField {
    q: u64,
    constants: FieldConstants,
}

impl FunctionField {
    pub fn new(q: u64) -> Result<Self> {
        if !(2..1 << 31).contains(&q) || !primes::is_prime_u64(q) {
            return Err(Error::InvalidField(format!("q = {q} must be a prime below 2^31")));
        }
        Ok(FunctionField { q, constants: FieldConstants::function_field(q) })
    }

    pub fn with_constants(q: u64, constants: FieldConstants) -> Result<Self> {
        let mut f = Self::new(q)?;
        f.constants = constants;
        Ok(f)
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn poly(&self, coeffs: &[u64]) -> FpPoly {
        FpPoly::new(coeffs.iter().map(|c| c % self.q).collect())
    }

    fn box_degree(&self, bound: &HeightValue) -> Option<u32> {
        bound.floor_log(self.q).map(|k| k as u32)
    }

    fn encode(&self, r: &FpPoly) -> u64 {
        r.to_index(self.q) as u64
    }

    fn decode(&self, idx: u64) -> FpPoly {
        FpPoly::from_index(idx as u128, self.q)
    }

    pub fn parse_poly_str(&self, s: &str) -> Result<FpPoly> {
        let bad = || Error::Parse(format!("bad polynomial `{s}`"));
        let cleaned: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if cleaned.is_empty() {
            return Err(bad());
        }
        let cleaned = cleaned.replace('-', "+-");
        let mut acc = FpPoly::zero();
        for term in cleaned.split('+').filter(|t| !t.is_empty()) {
            let (neg, term) = match term.strip_prefix('-') {
                Some(t) => (true, t),
                None => (false, term),
            };
            let (coef, exp) = match term.find(['T', 'x', 't']) {
                None => (term.parse::<u64>().map_err(|_| bad())?, 0usize),
                Some(pos) => {
                    let c = if pos == 0 { 1 } else { term[..pos].trim_end_matches('*').parse::<u64>().map_err(|_| bad())? };
                    let rest = &term[pos + 1..];
                    let e = if rest.is_empty() { 1 } else { rest.strip_prefix('^').ok_or_else(bad)?.parse::<usize>().map_err(|_| bad())? };
                    (c, e)
                }
            };
            let mut coeffs = vec![0u64; exp + 1];
            coeffs[exp] = coef % self.q;
            let mut t = FpPoly::new(coeffs);
            if neg {
                t = pneg(&t, self.q);
            }
            acc = padd(&acc, &t, self.q);
        }
        Ok(acc)
    }
}

impl GlobalField for FunctionField {
    type Elem = FpPoly;

    fn desc(&self) -> GlobalFieldDesc {
        GlobalFieldDesc::FunctionField { q: self.q }
    }

    fn constants(&self) -> &FieldConstants {
        &self.constants
    }

    fn zero(&self) -> FpPoly {
        FpPoly::zero()
    }

    fn one(&self) -> FpPoly {
        FpPoly::constant(1)
    }

    fn from_i64(&self, n: i64) -> FpPoly {
        FpPoly::constant(n.rem_euclid(self.q as i64) as u64)
    }

    fn is_zero(&self, a: &FpPoly) -> bool {
        a.is_zero()
    }

    fn add(&self, a: &FpPoly, b: &FpPoly) -> FpPoly {
        padd(a, b, self.q)
    }

    fn sub(&self, a: &FpPoly, b: &FpPoly) -> FpPoly {
        psub(a, b, self.q)
    }

    fn mul(&self, a: &FpPoly, b: &FpPoly) -> FpPoly {
        pmul(a, b, self.q)
    }

    fn neg(&self, a: &FpPoly) -> FpPoly {
        pneg(a, self.q)
    }

    fn div_rem(&self, a: &FpPoly, b: &FpPoly) -> (FpPoly, FpPoly) {
        pdivrem(a, b, self.q)
    }

    fn normalize(&self, a: &FpPoly) -> (FpPoly, FpPoly) {
        if a.is_zero() {
            return (FpPoly::constant(1), FpPoly::zero());
        }
        (FpPoly::constant(a.lead()), pmonic(a, self.q))
    }

    fn unit_inverse(&self, u: &FpPoly) -> FpPoly {
        FpPoly::constant(inv_mod(u.lead(), self.q))
    }

    fn characteristic(&self) -> u64 {
        self.q
    }

    fn norm(&self, a: &FpPoly) -> Result<HeightValue> {
        match a.degree() {
            None => Err(Error::ZeroElement),
            Some(d) => Ok(HeightValue::power(self.q, d as i64)),
        }
    }

    fn log_size(&self, a: &FpPoly) -> f64 {
        a.degree().unwrap_or(0) as f64 * (self.q as f64).ln()
    }

    fn gcd(&self, a: &FpPoly, b: &FpPoly) -> FpPoly {
        pgcd(a, b, self.q)
    }

    fn primes_up_to(&self, bound: u64) -> Vec<PrimeOfK<FpPoly>> {
        let mut out = Vec::new();
        let mut norm = self.q;
        while norm <= bound {
            // Monic polynomials of degree n have indices in [q^n, 2 q^n).
            for idx in norm as u128..2 * norm as u128 {
                let f = FpPoly::from_index(idx, self.q);
                if is_irreducible(&f, self.q) {
                    out.push(PrimeOfK { generator: f, norm });
                }
            }
            match norm.checked_mul(self.q) {
                Some(n) => norm = n,
                None => break,
            }
        }
        out
    }

    fn reduce(&self, a: &FpPoly, p: &PrimeOfK<FpPoly>) -> u64 {
        self.encode(&pdivrem(a, &p.generator, self.q).1)
    }

    fn residue_add(&self, x: u64, y: u64, p: &PrimeOfK<FpPoly>) -> u64 {
        let _ = p;
        self.encode(&padd(&self.decode(x), &self.decode(y), self.q))
    }

    fn residue_mul(&self, x: u64, y: u64, p: &PrimeOfK<FpPoly>) -> u64 {
        let prod = pmul(&self.decode(x), &self.decode(y), self.q);
        self.encode(&pdivrem(&prod, &p.generator, self.q).1)
    }

    fn residue_inv(&self, x: u64, p: &PrimeOfK<FpPoly>) -> u64 {
        // x^{N(p) - 2} in the residue field
        let e = BigUint::from(p.norm - 2);
        self.encode(&ppowmod(&self.decode(x), &e, &p.generator, self.q))
    }

    fn residue_lift(&self, r: u64, _p: &PrimeOfK<FpPoly>) -> FpPoly {
        self.decode(r)
    }

    fn prime_from_generator(&self, g: &FpPoly) -> Result<PrimeOfK<FpPoly>> {
        let g = pmonic(g, self.q);
        if !is_irreducible(&g, self.q) {
            return Err(Error::Parse(format!("{g} is not irreducible over F_{}", self.q)));
        }
        let deg = g.degree().unwrap() as u32;
        let norm = self
            .q
            .checked_pow(deg)
            .ok_or_else(|| Error::Parse(format!("norm of {g} overflows")))?;
        Ok(PrimeOfK { generator: g, norm })
    }

    fn box_count(&self, bound: &HeightValue) -> BigUint {
        match self.box_degree(bound) {
            None => BigUint::from(0u32),
            Some(k) => BigUint::from(self.q).pow(k + 1),
        }
    }

    fn box_elements(&self, bound: &HeightValue) -> Vec<FpPoly> {
        match self.box_degree(bound) {
            None => Vec::new(),
            Some(k) => {
                let total = (self.q as u128).pow(k + 1);
                (0..total).map(|i| FpPoly::from_index(i, self.q)).collect()
            }
        }
    }

    fn scan_order(&self, bound: &HeightValue) -> Vec<FpPoly> {
        self.box_elements(bound)
    }

    fn random_in_box<R: Rng + ?Sized>(&self, rng: &mut R, bound: &HeightValue) -> FpPoly {
        let k = self.box_degree(bound).expect("bound >= 1");
        FpPoly::new((0..=k).map(|_| rng.gen_range(0..self.q)).collect())
    }

    fn format_elem(&self, a: &FpPoly) -> serde_json::Value {
        serde_json::Value::Array(a.0.iter().map(|&c| serde_json::Value::from(c)).collect())
    }

    fn parse_elem(&self, v: &serde_json::Value) -> Result<FpPoly> {
        match v {
            serde_json::Value::Array(items) => {
                let mut coeffs = Vec::with_capacity(items.len());
                for it in items {
                    let c = match it {
                        serde_json::Value::Number(n) => n.as_i64(),
                        serde_json::Value::String(s) => s.trim().parse::<i64>().ok(),
                        _ => None,
                    }
                    .ok_or_else(|| Error::Parse(format!("bad coefficient {it}")))?;
                    coeffs.push(c.rem_euclid(self.q as i64) as u64);
                }
                Ok(FpPoly::new(coeffs))
            }
            serde_json::Value::String(s) => self.parse_poly_str(s),
            serde_json::Value::Number(n) => {
                let c = n.as_i64().ok_or_else(|| Error::Parse(format!("bad constant {n}")))?;
                Ok(self.from_i64(c))
            }
            other => Err(Error::Parse(format!("bad polynomial {other}"))),
        }
    }

    fn display_elem(&self, a: &FpPoly) -> String {
        a.display()
    }

    fn small_kernel_vector(&self, rows: &[Vec<FpPoly>]) -> Result<Vec<FpPoly>> {
        crate::siegel::polynomial::small_kernel_vector(self.q, rows)
    }

    fn small_kernel_basis(&self, rows: &[Vec<FpPoly>]) -> Result<Vec<Vec<FpPoly>>> {
        crate::siegel::polynomial::small_kernel_basis(self.q, rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_is_degree_then_lex() {
        let a = FpPoly::new(vec![1, 1]);
        let b = FpPoly::new(vec![0, 0, 1]);
        let c = FpPoly::new(vec![1, 0, 1]);
        assert!(a < b && b < c);
        assert_eq!(FpPoly::from_index(5, 2), c);
        assert_eq!(c.to_index(2), 5);
    }

    #[test]
    fn division_round_trip() {
        let q = 5;
        let a = FpPoly::new(vec![3, 4, 0, 2, 1]);
        let b = FpPoly::new(vec![2, 0, 3]);
        let (qu, r) = pdivrem(&a, &b, q);
        assert_eq!(padd(&pmul(&qu, &b, q), &r, q), a);
        assert!(r.degree().unwrap_or(0) < 2);
    }

    #[test]
    fn rabin_on_known_cases() {
        assert!(is_irreducible(&FpPoly::new(vec![1, 1, 1]), 2));
        assert!(!is_irreducible(&FpPoly::new(vec![1, 0, 1]), 2));
        assert!(is_irreducible(&FpPoly::new(vec![1, 1, 0, 1]), 2));
        assert!(!is_irreducible(&FpPoly::new(vec![1, 1, 1, 1]), 2));
        assert!(is_irreducible(&FpPoly::new(vec![1, 0, 1]), 3));
    }

    #[test]
    fn parse_polynomial_strings() {
        let f = FunctionField::new(2).unwrap();
        assert_eq!(f.parse_poly_str("T^2+T+1").unwrap(), FpPoly::new(vec![1, 1, 1]));
        assert_eq!(f.parse_poly_str("T").unwrap(), FpPoly::x());
        let g = FunctionField::new(3).unwrap();
        assert_eq!(g.parse_poly_str("2T-1").unwrap(), FpPoly::new(vec![2, 2]));
    }
}
