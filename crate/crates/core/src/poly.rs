//! Multivariate polynomials over `O_K` and their monomial bases.

use std::collections::BTreeMap;

use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::field::GlobalField;
use crate::heights::{height_affine, HeightValue};

/// Exponent vector of a monomial.
pub type Monomial = Vec<u32>;

/// `C(n, k)` as `usize`, saturating on overflow.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > usize::MAX as u128 {
            return usize::MAX;
        }
    }
    acc as usize
}

/// Number of monomials in `nvars` variables of degree exactly `r` (homogeneous)
/// or at most `r` (affine).
pub fn monomial_count(nvars: usize, r: usize, homogeneous: bool) -> usize {
    if nvars == 0 {
        return usize::from(r == 0 || !homogeneous);
    }
    if homogeneous {
        binomial(r + nvars - 1, nvars - 1)
    } else {
        binomial(r + nvars, nvars)
    }
}

fn push_exact(nvars: usize, r: u32, prefix: &mut Vec<u32>, out: &mut Vec<Monomial>) {
    if prefix.len() + 1 == nvars {
        prefix.push(r);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for e in (0..=r).rev() {
        prefix.push(e);
        push_exact(nvars, r - e, prefix, out);
        prefix.pop();
    }
}

/// Monomials ordered by descending degree, then descending lex.
///
/// `x^2, xy, y^2, x, y, 1` for two variables and `r = 2`.
pub fn monomials(nvars: usize, r: usize, homogeneous: bool) -> Vec<Monomial> {
    let mut out = Vec::new();
    if nvars == 0 {
        if r == 0 || !homogeneous {
            out.push(Vec::new());
        }
        return out;
    }
    let degrees: Vec<usize> = if homogeneous { vec![r] } else { (0..=r).rev().collect() };
    for deg in degrees {
        push_exact(nvars, deg as u32, &mut Vec::with_capacity(nvars), &mut out);
    }
    out
}

/// `x^e` for a point `x`.
pub fn eval_monomial<F: GlobalField>(field: &F, x: &[F::Elem], e: &[u32]) -> F::Elem {
    x.iter().zip(e).fold(field.one(), |acc, (xi, &ei)| {
        if ei == 0 {
            acc
        } else {
            field.mul(&acc, &field.pow(xi, ei))
        }
    })
}

/// Sparse polynomial; zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MPoly<E> {
    pub nvars: usize,
    pub terms: BTreeMap<Monomial, E>,
}

impl<E: Clone + Ord> MPoly<E> {
    pub fn zero(nvars: usize) -> Self {
        MPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn from_terms<F: GlobalField<Elem = E>>(field: &F, nvars: usize, terms: impl IntoIterator<Item = (Monomial, E)>) -> Self {
        let mut p = MPoly::zero(nvars);
        for (m, c) in terms {
            assert_eq!(m.len(), nvars, "monomial arity");
            let cur = p.terms.remove(&m).unwrap_or_else(|| field.zero());
            let sum = field.add(&cur, &c);
            if !field.is_zero(&sum) {
                p.terms.insert(m, sum);
            }
        }
        p
    }

    /// Polynomial with coefficient `coeffs[i]` on `basis[i]`.
    pub fn from_coefficients<F: GlobalField<Elem = E>>(field: &F, nvars: usize, basis: &[Monomial], coeffs: &[E]) -> Self {
        Self::from_terms(field, nvars, basis.iter().cloned().zip(coeffs.iter().cloned()))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(|m| m.iter().sum::<u32>() as usize).max().unwrap_or(0)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|m| m.iter().sum::<u32>());
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn eval<F: GlobalField<Elem = E>>(&self, field: &F, x: &[E]) -> E {
        self.terms
            .iter()
            .fold(field.zero(), |acc, (m, c)| field.add(&acc, &field.mul(c, &eval_monomial(field, x, m))))
    }

    pub fn vanishes_at<F: GlobalField<Elem = E>>(&self, field: &F, x: &[E]) -> bool {
        field.is_zero(&self.eval(field, x))
    }

    pub fn mul<F: GlobalField<Elem = E>>(&self, field: &F, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let prods = self.terms.iter().flat_map(|(m1, c1)| {
            other.terms.iter().map(move |(m2, c2)| {
                let m: Monomial = m1.iter().zip(m2).map(|(a, b)| a + b).collect();
                (m, field.mul(c1, c2))
            })
        });
        Self::from_terms(field, self.nvars, prods.collect::<Vec<_>>())
    }

    /// `H_K(1 : coefficients)`.
    pub fn coefficient_height<F: GlobalField<Elem = E>>(&self, field: &F) -> HeightValue {
        let cs: Vec<E> = self.terms.values().cloned().collect();
        height_affine(field, &cs)
    }

    /// Divides out the content and makes the leading coefficient (largest monomial
    /// in the basis order) positive or monic.
    pub fn primitive<F: GlobalField<Elem = E>>(&self, field: &F) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let cs: Vec<E> = self.terms.values().cloned().collect();
        let g = field.gcd_all(&cs);
        let lead = self.leading_coefficient().expect("nonzero");
        let (unit, _) = field.normalize(lead);
        let uinv = field.unit_inverse(&unit);
        let terms = self.terms.iter().map(|(m, c)| (m.clone(), field.mul(&field.div_exact(c, &g), &uinv)));
        Self::from_terms(field, self.nvars, terms.collect::<Vec<_>>())
    }

    /// Coefficient of the largest monomial in (degree, lex) order.
    pub fn leading_coefficient(&self) -> Option<&E> {
        self.terms
            .iter()
            .max_by(|(a, _), (b, _)| {
                let da: u32 = a.iter().sum();
                let db: u32 = b.iter().sum();
                da.cmp(&db).then_with(|| a.cmp(b))
            })
            .map(|(_, c)| c)
    }

    /// `{"2,1": coeff, ...}` keyed by comma-joined exponents.
    pub fn to_json<F: GlobalField<Elem = E>>(&self, field: &F) -> Value {
        let mut map = Map::new();
        for (m, c) in &self.terms {
            map.insert(monomial_key(m), field.format_elem(c));
        }
        Value::Object(map)
    }

    pub fn from_json<F: GlobalField<Elem = E>>(field: &F, nvars: usize, v: &Value) -> Result<Self> {
        let obj = v.as_object().ok_or_else(|| Error::Parse("polynomial must be a JSON object".into()))?;
        let mut terms = Vec::with_capacity(obj.len());
        for (k, c) in obj {
            let m = parse_monomial_key(k)?;
            if m.len() != nvars {
                return Err(Error::Parse(format!("monomial {k} has {} exponents, expected {nvars}", m.len())));
            }
            terms.push((m, field.parse_elem(c)?));
        }
        Ok(Self::from_terms(field, nvars, terms))
    }

    /// Human-readable form with variables `x1, x2, ...`.
    pub fn display<F: GlobalField<Elem = E>>(&self, field: &F) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut keys: Vec<&Monomial> = self.terms.keys().collect();
        keys.sort_by(|a, b| {
            let da: u32 = a.iter().sum();
            let db: u32 = b.iter().sum();
            db.cmp(&da).then_with(|| b.cmp(a))
        });
        let parts: Vec<String> = keys
            .into_iter()
            .map(|m| {
                let mono: Vec<String> = m
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(i, &e)| if e == 1 { format!("x{}", i + 1) } else { format!("x{}^{}", i + 1, e) })
                    .collect();
                let c = field.display_elem(&self.terms[m]);
                if mono.is_empty() {
                    format!("({c})")
                } else {
                    format!("({c})*{}", mono.join("*"))
                }
            })
            .collect();
        parts.join(" + ")
    }
}

pub fn monomial_key(m: &[u32]) -> String {
    m.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(",")
}

pub fn parse_monomial_key(k: &str) -> Result<Monomial> {
    if k.is_empty() {
        return Ok(Vec::new());
    }
    k.split(',')
        .map(|t| t.trim().parse::<u32>().map_err(|_| Error::Parse(format!("bad exponent in {k:?}"))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Rationals;
    use num_bigint::BigInt;

    #[test]
    fn monomial_bases() {
        assert_eq!(monomials(2, 2, false), vec![vec![2, 0], vec![1, 1], vec![0, 2], vec![1, 0], vec![0, 1], vec![0, 0]]);
        for (n, r) in [(1, 3), (2, 4), (3, 3), (4, 2)] {
            assert_eq!(monomials(n, r, false).len(), monomial_count(n, r, false));
            assert_eq!(monomials(n, r, true).len(), monomial_count(n, r, true));
        }
        assert_eq!(monomial_count(3, 2, true), 6);
        assert_eq!(monomial_count(2, 3, false), 10);
    }

    #[test]
    fn eval_and_json_round_trip() {
        let q = Rationals::new();
        let z = |n: i64| BigInt::from(n);
        // y - x^2
        let p = MPoly::from_terms(&q, 2, vec![(vec![0, 1], z(1)), (vec![2, 0], z(-1))]);
        assert!(p.vanishes_at(&q, &[z(3), z(9)]));
        assert!(!p.vanishes_at(&q, &[z(3), z(8)]));
        assert_eq!(p.degree(), 2);
        assert!(!p.is_homogeneous());
        let j = p.to_json(&q);
        assert_eq!(MPoly::from_json(&q, 2, &j).unwrap(), p);
        let sq = p.mul(&q, &p);
        assert_eq!(sq.degree(), 4);
        assert_eq!(sq.eval(&q, &[z(2), z(1)]), z(9));
    }
}
