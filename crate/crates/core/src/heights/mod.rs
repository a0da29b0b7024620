//! Exact heights on `K` and `P^n(K)`, and boxes of bounded height.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Fraction, GlobalField, GlobalFieldDesc};

pub mod value;

pub use value::HeightValue;

/// Default cap on the number of points a box enumeration may produce.
pub const DEFAULT_BOX_BUDGET: u64 = 100_000_000;

/// `H_K(x) = H_K(1:x)` for a field element.
pub fn height_scalar<F: GlobalField>(field: &F, x: &Fraction<F::Elem>) -> HeightValue {
    let d = field.norm(&x.den).expect("denominator is nonzero");
    HeightValue::max(field.height(&x.num), d)
}

/// Projective height of a tuple over `O_K`: the largest coordinate size
/// after dividing out the gcd.
pub fn height_projective<F: GlobalField>(field: &F, x: &[F::Elem]) -> Result<HeightValue> {
    if x.iter().all(|c| field.is_zero(c)) {
        return Err(Error::ZeroPoint);
    }
    let g = field.gcd_all(x);
    let mut best = HeightValue::one();
    for c in x.iter().filter(|c| !field.is_zero(c)) {
        let n = field.norm(&field.div_exact(c, &g))?;
        if n > best {
            best = n;
        }
    }
    Ok(best)
}

/// Projective height of a tuple of field elements.
pub fn height_projective_fractions<F: GlobalField>(field: &F, x: &[Fraction<F::Elem>]) -> Result<HeightValue> {
    height_projective(field, &clear_denominators(field, x))
}

/// `H_K(1 : x_1 : ... : x_n)` for an affine point over `O_K`.
pub fn height_affine<F: GlobalField>(field: &F, x: &[F::Elem]) -> HeightValue {
    x.iter().map(|c| field.height(c)).fold(HeightValue::one(), HeightValue::max)
}

/// Scales a tuple of fractions by the lcm of the denominators.
pub fn clear_denominators<F: GlobalField>(field: &F, x: &[Fraction<F::Elem>]) -> Vec<F::Elem> {
    let mut l = field.one();
    for c in x {
        let g = field.gcd(&l, &c.den);
        l = field.mul(&field.div_exact(&l, &g), &c.den);
    }
    x.iter().map(|c| field.mul(&c.num, &field.div_exact(&l, &c.den))).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoxKind {
    Scalar,
    Affine,
    Projective,
}

/// `[N]^dim` (affine, scalar) or the points of `P^dim` of height at most `N`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundedBox {
    pub field: GlobalFieldDesc,
    #[serde(rename = "N")]
    pub n: HeightValue,
    pub dim: usize,
    pub kind: BoxKind,
}

impl BoundedBox {
    pub fn affine(field: GlobalFieldDesc, n: HeightValue, dim: usize) -> Self {
        BoundedBox { field, n, dim, kind: BoxKind::Affine }
    }

    pub fn scalar(field: GlobalFieldDesc, n: HeightValue) -> Self {
        BoundedBox { field, n, dim: 1, kind: BoxKind::Scalar }
    }

    pub fn projective(field: GlobalFieldDesc, n: HeightValue, dim: usize) -> Self {
        BoundedBox { field, n, dim, kind: BoxKind::Projective }
    }

    fn tuple_len(&self) -> usize {
        match self.kind {
            BoxKind::Scalar => 1,
            BoxKind::Affine => self.dim,
            BoxKind::Projective => self.dim + 1,
        }
    }
}

/// Enumerates a box in lexicographic order together with its exact size.
pub fn enumerate_bounded<F: GlobalField>(
    field: &F,
    bx: &BoundedBox,
    budget: u64,
) -> Result<(Vec<Vec<F::Elem>>, BigUint)> {
    if field.desc() != bx.field {
        return Err(Error::InvalidField(format!("box over {:?} used with {:?}", bx.field, field.desc())));
    }
    let per = field.box_count(&bx.n);
    let len = bx.tuple_len();
    let raw = per.pow(len as u32);
    if raw > BigUint::from(budget) {
        return Err(Error::BoxTooLarge { count: raw.to_string(), budget });
    }
    let elems = field.box_elements(&bx.n);
    let mut out: Vec<Vec<F::Elem>> = vec![Vec::new()];
    for _ in 0..len {
        let mut next = Vec::with_capacity(out.len() * elems.len());
        for prefix in &out {
            for e in &elems {
                let mut p = prefix.clone();
                p.push(e.clone());
                next.push(p);
            }
        }
        out = next;
    }
    if bx.kind == BoxKind::Projective {
        out.retain(|x| is_canonical_projective(field, x));
    }
    let count = BigUint::from(out.len());
    Ok((out, count))
}

/// Primitive tuple whose first nonzero coordinate is positive or monic.
pub fn is_canonical_projective<F: GlobalField>(field: &F, x: &[F::Elem]) -> bool {
    let Some(first) = x.iter().find(|c| !field.is_zero(c)) else {
        return false;
    };
    field.normalize(first).1 == *first && field.is_unit(&field.gcd_all(x))
}

/// Canonical representative of a projective point over `O_K`.
pub fn canonical_projective<F: GlobalField>(field: &F, x: &[F::Elem]) -> Result<Vec<F::Elem>> {
    if x.iter().all(|c| field.is_zero(c)) {
        return Err(Error::ZeroPoint);
    }
    let g = field.gcd_all(x);
    let mut y: Vec<F::Elem> = x.iter().map(|c| field.div_exact(c, &g)).collect();
    let first = y.iter().find(|c| !field.is_zero(c)).unwrap().clone();
    let (u, _) = field.normalize(&first);
    let ui = field.unit_inverse(&u);
    for c in y.iter_mut() {
        *c = field.mul(c, &ui);
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{FpPoly, FunctionField, Rationals};
    use num_bigint::BigInt;

    fn z(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn scalar_heights() {
        let q = Rationals::new();
        assert_eq!(height_scalar(&q, &Fraction::from_elem(&q, z(-5))), HeightValue::from_int(5));
        let x = Fraction::new(&q, z(4), z(6)).unwrap();
        assert_eq!(height_scalar(&q, &x), HeightValue::from_int(3));
        assert_eq!(height_scalar(&q, &Fraction::from_elem(&q, z(0))), HeightValue::one());
        let k = FunctionField::new(2).unwrap();
        let t3 = Fraction::from_elem(&k, FpPoly::new(vec![1, 0, 0, 1]));
        assert_eq!(height_scalar(&k, &t3), HeightValue::from_int(8));
    }

    #[test]
    fn projective_heights() {
        let q = Rationals::new();
        assert_eq!(height_projective(&q, &[z(1), z(0)]).unwrap(), HeightValue::one());
        assert_eq!(height_projective(&q, &[z(4), z(6)]).unwrap(), HeightValue::from_int(3));
        assert!(matches!(height_projective(&q, &[z(0), z(0)]), Err(Error::ZeroPoint)));
        let k = FunctionField::new(2).unwrap();
        let h = height_projective(&k, &[FpPoly::new(vec![0, 0, 1]), FpPoly::x()]).unwrap();
        assert_eq!(h, HeightValue::from_int(2));
    }

    #[test]
    fn box_examples() {
        let q = Rationals::new();
        let b = BoundedBox::scalar(GlobalFieldDesc::Rational, HeightValue::from_int(10));
        let (pts, n) = enumerate_bounded(&q, &b, DEFAULT_BOX_BUDGET).unwrap();
        assert_eq!(n, BigUint::from(21u32));
        assert_eq!(pts.first().unwrap()[0], z(-10));
        let b = BoundedBox::affine(GlobalFieldDesc::Rational, HeightValue::from_int(2), 2);
        assert_eq!(enumerate_bounded(&q, &b, DEFAULT_BOX_BUDGET).unwrap().1, BigUint::from(25u32));
        let k = FunctionField::new(2).unwrap();
        let b = BoundedBox::scalar(k.desc(), HeightValue::from_int(8));
        assert_eq!(enumerate_bounded(&k, &b, DEFAULT_BOX_BUDGET).unwrap().1, BigUint::from(16u32));
    }

    #[test]
    fn box_budget_is_enforced() {
        let q = Rationals::new();
        let b = BoundedBox::affine(GlobalFieldDesc::Rational, HeightValue::from_int(1000), 3);
        assert!(matches!(enumerate_bounded(&q, &b, 1_000_000), Err(Error::BoxTooLarge { .. })));
    }

    #[test]
    fn projective_box_counts_primitive_classes() {
        // P^1(Q) points of height <= 2: (0:1),(1:0),(1:±1),(1:±2),(2:±1)
        let q = Rationals::new();
        let b = BoundedBox::projective(GlobalFieldDesc::Rational, HeightValue::from_int(2), 1);
        let (pts, _) = enumerate_bounded(&q, &b, DEFAULT_BOX_BUDGET).unwrap();
        assert_eq!(pts.len(), 8);
    }
}
