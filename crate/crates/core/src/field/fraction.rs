use num_traits::ToPrimitive;

use super::{ord_at, GlobalField, PrimeOfK};
use crate::error::{Error, Result};
use crate::heights::HeightValue;

/// Element of `K` as a reduced fraction of `O_K` elements with a positive
/// (Q) or monic (F_q(T)) denominator.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fraction<E> {
    pub num: E,
    pub den: E,
}

impl<E: Clone> Fraction<E> {
    pub fn new<F: GlobalField<Elem = E>>(field: &F, num: E, den: E) -> Result<Self> {
        if field.is_zero(&den) {
            return Err(Error::ZeroElement);
        }
        if field.is_zero(&num) {
            return Ok(Fraction { num, den: field.one() });
        }
        let g = field.gcd(&num, &den);
        let n = field.div_exact(&num, &g);
        let d = field.div_exact(&den, &g);
        let (u, d) = field.normalize(&d);
        let n = field.mul(&n, &field.unit_inverse(&u));
        Ok(Fraction { num: n, den: d })
    }

    pub fn from_elem<F: GlobalField<Elem = E>>(field: &F, a: E) -> Self {
        Fraction { num: a, den: field.one() }
    }

    pub fn is_zero<F: GlobalField<Elem = E>>(&self, field: &F) -> bool {
        field.is_zero(&self.num)
    }

    pub fn mul<F: GlobalField<Elem = E>>(&self, other: &Self, field: &F) -> Self {
        Fraction::new(field, field.mul(&self.num, &other.num), field.mul(&self.den, &other.den)).unwrap()
    }

    pub fn add<F: GlobalField<Elem = E>>(&self, other: &Self, field: &F) -> Self {
        let num = field.add(&field.mul(&self.num, &other.den), &field.mul(&other.num, &self.den));
        Fraction::new(field, num, field.mul(&self.den, &other.den)).unwrap()
    }

    pub fn neg<F: GlobalField<Elem = E>>(&self, field: &F) -> Self {
        Fraction { num: field.neg(&self.num), den: self.den.clone() }
    }

    pub fn inv<F: GlobalField<Elem = E>>(&self, field: &F) -> Result<Self> {
        if field.is_zero(&self.num) {
            return Err(Error::ZeroElement);
        }
        Fraction::new(field, self.den.clone(), self.num.clone())
    }
}

/// A place of `K`: the distinguished infinite place or a finite prime.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Place<E> {
    Infinite,
    Finite(PrimeOfK<E>),
}

/// Normalised absolute value `||x||_v` of a nonzero element.
pub fn abs_value<F: GlobalField>(field: &F, x: &Fraction<F::Elem>, place: &Place<F::Elem>) -> Result<HeightValue> {
    if field.is_zero(&x.num) {
        return Err(Error::ZeroElement);
    }
    match place {
        Place::Infinite => Ok(field.norm(&x.num)?.mul(&field.norm(&x.den)?.recip())),
        Place::Finite(p) => {
            let e = ord_at(field, &x.num, p)? as i64 - ord_at(field, &x.den, p)? as i64;
            Ok(field.norm(&p.generator)?.pow(-e))
        }
    }
}

/// Prime factorisation of a nonzero element by trial division.
pub fn factor<F: GlobalField>(field: &F, a: &F::Elem) -> Result<Vec<(PrimeOfK<F::Elem>, u32)>> {
    let n = field.norm(a)?;
    let n64 = n
        .to_rational()
        .to_integer()
        .to_u64()
        .ok_or_else(|| Error::BudgetExceeded("factorisation limited to norms below 2^64".into()))?;
    let root = (n64 as f64).sqrt() as u64 + 1;
    let mut rest = field.normalize(a).1;
    let mut out = Vec::new();
    for p in field.primes_up_to(root) {
        if field.is_unit(&rest) {
            break;
        }
        let mut e = 0;
        loop {
            let (q, r) = field.div_rem(&rest, &p.generator);
            if !field.is_zero(&r) {
                break;
            }
            rest = q;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
    }
    if !field.is_unit(&rest) {
        out.push((field.prime_from_generator(&rest)?, 1));
    }
    out.sort();
    Ok(out)
}

/// Places where `x` has a nontrivial absolute value, infinity first.
pub fn support<F: GlobalField>(field: &F, x: &Fraction<F::Elem>) -> Result<Vec<Place<F::Elem>>> {
    let mut places = vec![Place::Infinite];
    let mut ps: Vec<PrimeOfK<F::Elem>> = factor(field, &x.num)?.into_iter().map(|(p, _)| p).collect();
    ps.extend(factor(field, &x.den)?.into_iter().map(|(p, _)| p));
    ps.sort();
    ps.dedup();
    places.extend(ps.into_iter().map(Place::Finite));
    Ok(places)
}

/// Exact check of `prod_v ||x||_v = 1` over all places.
pub fn product_formula_holds<F: GlobalField>(field: &F, x: &Fraction<F::Elem>) -> Result<bool> {
    let mut acc = HeightValue::one();
    for v in support(field, x)? {
        acc = acc.mul(&abs_value(field, x, &v)?);
    }
    Ok(acc.is_one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{FpPoly, FunctionField, Rationals};
    use num_bigint::BigInt;

    #[test]
    fn fractions_reduce() {
        let q = Rationals::new();
        let f = Fraction::new(&q, BigInt::from(4), BigInt::from(-6)).unwrap();
        assert_eq!(f.num, BigInt::from(-2));
        assert_eq!(f.den, BigInt::from(3));
    }

    #[test]
    fn factor_integers_and_polys() {
        let q = Rationals::new();
        let f = factor(&q, &BigInt::from(-360)).unwrap();
        let v: Vec<(u64, u32)> = f.iter().map(|(p, e)| (p.norm, *e)).collect();
        assert_eq!(v, vec![(2, 3), (3, 2), (5, 1)]);
        let k = FunctionField::new(2).unwrap();
        // (T+1)^2 (T^2+T+1) = T^4 + T^3 + T + 1
        let g = FpPoly::new(vec![1, 1, 0, 1, 1]);
        let f = factor(&k, &g).unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!(f[0].1, 2);
        assert_eq!(f[1].0.norm, 4);
    }

    #[test]
    fn product_formula_examples() {
        let q = Rationals::new();
        let x = Fraction::new(&q, BigInt::from(12), BigInt::from(35)).unwrap();
        assert!(product_formula_holds(&q, &x).unwrap());
        let k = FunctionField::new(3).unwrap();
        let y = Fraction::new(&k, FpPoly::new(vec![1, 2, 1]), FpPoly::new(vec![0, 0, 0, 1])).unwrap();
        assert!(product_formula_holds(&k, &y).unwrap());
    }
}
