//! Global fields `K = Q` and `K = F_q(T)`, their rings of integers, primes
//! and residue maps.

use std::cmp::Ordering;
use std::fmt;
use std::hash::Hash;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heights::HeightValue;

pub mod constants;
pub mod fqt;
pub mod fraction;
pub mod primes;
pub mod rational;

pub use constants::FieldConstants;
pub use fqt::{FpPoly, FunctionField};
pub use fraction::{abs_value, factor, product_formula_holds, support, Fraction, Place};
pub use primes::{weight_w, PrimeSet};
pub use rational::Rationals;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum GlobalFieldDesc {
    #[serde(rename = "Q")]
    Rational,
    #[serde(rename = "FqT")]
    FunctionField { q: u64 },
}

impl GlobalFieldDesc {
    /// Degree over the prime field of the base (`d_K`); 1 for both supported fields.
    pub fn degree(&self) -> u32 {
        1
    }

    pub fn label(&self) -> String {
        match self {
            GlobalFieldDesc::Rational => "Q".to_string(),
            GlobalFieldDesc::FunctionField { q } => format!("F_{q}(T)"),
        }
    }
}

impl std::str::FromStr for GlobalFieldDesc {
    type Err = Error;

    /// Accepts `Q`, `F2T`, `FqT:3`, `F_5(T)` or the JSON form.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.starts_with('{') {
            return serde_json::from_str(t).map_err(|e| Error::Parse(e.to_string()));
        }
        if t == "Q" || t == "q" {
            return Ok(GlobalFieldDesc::Rational);
        }
        let digits: String = t.chars().filter(|c| c.is_ascii_digit()).collect();
        let looks_fqt = t.starts_with('F') || t.starts_with("Fq");
        match (looks_fqt, digits.parse::<u64>()) {
            (true, Ok(q)) => Ok(GlobalFieldDesc::FunctionField { q }),
            _ => Err(Error::Parse(format!("unknown field `{s}`"))),
        }
    }
}

/// A prime of `O_K` with its norm. Residues mod the prime are encoded as
/// integers in `[0, norm)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PrimeOfK<E> {
    pub generator: E,
    pub norm: u64,
}

impl<E: Ord> PartialOrd for PrimeOfK<E> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<E: Ord> Ord for PrimeOfK<E> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.norm.cmp(&other.norm).then_with(|| self.generator.cmp(&other.generator))
    }
}

impl<E> PrimeOfK<E> {
    pub fn log_norm(&self) -> f64 {
        (self.norm as f64).ln()
    }
}

/// Arithmetic interface shared by `Z ⊂ Q` and `F_q[T] ⊂ F_q(T)`.
///
/// Elements of the ring of integers are plain values; every operation goes
/// through the field object, which carries `q` for function fields.
pub trait GlobalField: Clone + fmt::Debug + Send + Sync {
    type Elem: Clone + fmt::Debug + Eq + Ord + Hash + Send + Sync;

    fn desc(&self) -> GlobalFieldDesc;
    fn constants(&self) -> &FieldConstants;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_i64(&self, n: i64) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    /// Euclidean division; `b` nonzero.
    fn div_rem(&self, a: &Self::Elem, b: &Self::Elem) -> (Self::Elem, Self::Elem);
    /// Splits `a = u * n` with `u` a unit and `n` positive (Z) or monic (F_q[T]).
    fn normalize(&self, a: &Self::Elem) -> (Self::Elem, Self::Elem);
    /// Inverse of a unit.
    fn unit_inverse(&self, u: &Self::Elem) -> Self::Elem;
    fn characteristic(&self) -> u64;

    /// `N_K(a)`: `|a|` or `q^deg a`. Zero is rejected.
    fn norm(&self, a: &Self::Elem) -> Result<HeightValue>;
    /// `ln N_K(a)` for nonzero `a`.
    fn log_size(&self, a: &Self::Elem) -> f64;

    fn primes_up_to(&self, bound: u64) -> Vec<PrimeOfK<Self::Elem>>;
    fn reduce(&self, a: &Self::Elem, p: &PrimeOfK<Self::Elem>) -> u64;
    fn residue_add(&self, x: u64, y: u64, p: &PrimeOfK<Self::Elem>) -> u64;
    fn residue_mul(&self, x: u64, y: u64, p: &PrimeOfK<Self::Elem>) -> u64;
    fn residue_inv(&self, x: u64, p: &PrimeOfK<Self::Elem>) -> u64;
    /// Canonical representative of a residue index.
    fn residue_lift(&self, r: u64, p: &PrimeOfK<Self::Elem>) -> Self::Elem;
    /// Builds the prime generated by an irreducible element (sign/monic normalised).
    fn prime_from_generator(&self, g: &Self::Elem) -> Result<PrimeOfK<Self::Elem>>;

    /// Number of elements of `[N]_{O_K}`.
    fn box_count(&self, bound: &HeightValue) -> num_bigint::BigUint;
    /// Elements of `[N]_{O_K}` in ascending canonical order.
    fn box_elements(&self, bound: &HeightValue) -> Vec<Self::Elem>;
    /// Elements of `[N]_{O_K}` in small-first scan order
    /// (`0, 1, -1, 2, -2, ...` over Z; degree-then-lex over F_q[T]).
    fn scan_order(&self, bound: &HeightValue) -> Vec<Self::Elem>;
    fn random_in_box<R: Rng + ?Sized>(&self, rng: &mut R, bound: &HeightValue) -> Self::Elem;

    fn format_elem(&self, a: &Self::Elem) -> serde_json::Value;
    fn parse_elem(&self, v: &serde_json::Value) -> Result<Self::Elem>;
    fn display_elem(&self, a: &Self::Elem) -> String;

    /// Nonzero kernel vector of small height of an `s x t` system with `t > s`.
    fn small_kernel_vector(&self, rows: &[Vec<Self::Elem>]) -> Result<Vec<Self::Elem>>;
    /// Basis of the kernel (over `K`) made of vectors of small height.
    fn small_kernel_basis(&self, rows: &[Vec<Self::Elem>]) -> Result<Vec<Vec<Self::Elem>>>;

    // Provided helpers.

    fn height(&self, a: &Self::Elem) -> HeightValue {
        if self.is_zero(a) {
            HeightValue::one()
        } else {
            self.norm(a).expect("nonzero")
        }
    }

    fn is_unit(&self, a: &Self::Elem) -> bool {
        !self.is_zero(a) && self.norm(a).map(|n| n.is_one()).unwrap_or(false)
    }

    fn divides(&self, d: &Self::Elem, a: &Self::Elem) -> bool {
        if self.is_zero(d) {
            return self.is_zero(a);
        }
        self.is_zero(&self.div_rem(a, d).1)
    }

    /// Exact quotient; panics in debug builds if `b` does not divide `a`.
    fn div_exact(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let (q, r) = self.div_rem(a, b);
        debug_assert!(self.is_zero(&r), "inexact division");
        q
    }

    fn gcd(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let mut x = a.clone();
        let mut y = b.clone();
        while !self.is_zero(&y) {
            let r = self.div_rem(&x, &y).1;
            x = y;
            y = r;
        }
        if self.is_zero(&x) {
            x
        } else {
            self.normalize(&x).1
        }
    }

    fn pow(&self, a: &Self::Elem, e: u32) -> Self::Elem {
        let mut acc = self.one();
        let mut base = a.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    fn gcd_all(&self, xs: &[Self::Elem]) -> Self::Elem {
        xs.iter().fold(self.zero(), |g, x| self.gcd(&g, x))
    }
}

pub fn prime_norm<E>(p: &PrimeOfK<E>) -> u64 {
    p.norm
}

/// `ord_p(x)` for nonzero `x`.
pub fn ord_at<F: GlobalField>(field: &F, x: &F::Elem, p: &PrimeOfK<F::Elem>) -> Result<u32> {
    if field.is_zero(x) {
        return Err(Error::ZeroElement);
    }
    let mut k = 0;
    let mut cur = x.clone();
    loop {
        let (q, r) = field.div_rem(&cur, &p.generator);
        if !field.is_zero(&r) {
            return Ok(k);
        }
        cur = q;
        k += 1;
    }
}

/// Coordinatewise reduction of an affine point.
pub fn reduce_mod<F: GlobalField>(field: &F, x: &[F::Elem], p: &PrimeOfK<F::Elem>) -> Vec<u64> {
    x.iter().map(|c| field.reduce(c, p)).collect()
}

/// Reduction of a projective point, scaled so that its first nonzero residue is 1.
/// A common power of `p` is divided out first.
pub fn reduce_mod_projective<F: GlobalField>(
    field: &F,
    x: &[F::Elem],
    p: &PrimeOfK<F::Elem>,
) -> Result<Vec<u64>> {
    if x.iter().all(|c| field.is_zero(c)) {
        return Err(Error::AllCoordinatesVanish);
    }
    let mut coords: Vec<F::Elem> = x.to_vec();
    let m = coords
        .iter()
        .filter(|c| !field.is_zero(c))
        .map(|c| ord_at(field, c, p).unwrap())
        .min()
        .unwrap();
    if m > 0 {
        let pm = field.pow(&p.generator, m);
        coords = coords.iter().map(|c| field.div_exact(c, &pm)).collect();
    }
    let mut r = reduce_mod(field, &coords, p);
    let lead = *r.iter().find(|&&v| v != 0).expect("primitive point has a unit coordinate");
    let inv = field.residue_inv(lead, p);
    for v in r.iter_mut() {
        *v = field.residue_mul(*v, inv, p);
    }
    Ok(r)
}

/// Canonical ordering of points: lexicographic on coordinates.
pub fn cmp_points<E: Ord>(a: &[E], b: &[E]) -> Ordering {
    a.cmp(b)
}
