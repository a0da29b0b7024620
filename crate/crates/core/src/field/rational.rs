use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

use super::{primes, FieldConstants, GlobalField, GlobalFieldDesc, PrimeOfK};
use crate::error::{Error, Result};
use crate::heights::value::ln_bigint;
use crate::heights::HeightValue;

/// `K = Q` with ring of integers `Z`.
#[derive(Clone, Debug)]
pub struct Rationals {
    constants: FieldConstants,
}

impl Default for Rationals {
    fn default() -> Self {
        Rationals { constants: FieldConstants::rationals() }
    }
}

impl Rationals {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_constants(constants: FieldConstants) -> Self {
        Rationals { constants }
    }

    fn bound_int(bound: &HeightValue) -> BigInt {
        bound.floor()
    }
}

fn mod_u64(a: &BigInt, p: u64) -> u64 {
    a.mod_floor(&BigInt::from(p)).to_u64().unwrap()
}

fn mod_inv(x: u64, p: u64) -> u64 {
    let (mut a, mut b) = (x as i128, p as i128);
    let (mut u, mut v) = (1i128, 0i128);
    while b != 0 {
        let t = a / b;
        (a, b) = (b, a - t * b);
        (u, v) = (v, u - t * v);
    }
    assert_eq!(a, 1, "residue {x} not invertible mod {p}");
    u.rem_euclid(p as i128) as u64
}

impl GlobalField for Rationals {
    type Elem = BigInt;

    fn desc(&self) -> GlobalFieldDesc {
        GlobalFieldDesc::Rational
    }

    fn constants(&self) -> &FieldConstants {
        &self.constants
    }

    fn zero(&self) -> BigInt {
        BigInt::zero()
    }

    fn one(&self) -> BigInt {
        BigInt::one()
    }

    fn from_i64(&self, n: i64) -> BigInt {
        BigInt::from(n)
    }

    fn is_zero(&self, a: &BigInt) -> bool {
        a.is_zero()
    }

    fn add(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a + b
    }

    fn sub(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a - b
    }

    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a * b
    }

    fn neg(&self, a: &BigInt) -> BigInt {
        -a
    }

    fn div_rem(&self, a: &BigInt, b: &BigInt) -> (BigInt, BigInt) {
        a.div_mod_floor(b)
    }

    fn normalize(&self, a: &BigInt) -> (BigInt, BigInt) {
        if a.is_negative() {
            (BigInt::from(-1), -a)
        } else {
            (BigInt::one(), a.clone())
        }
    }

    fn unit_inverse(&self, u: &BigInt) -> BigInt {
        u.clone()
    }

    fn characteristic(&self) -> u64 {
        0
    }

    fn norm(&self, a: &BigInt) -> Result<HeightValue> {
        if a.is_zero() {
            return Err(Error::ZeroElement);
        }
        Ok(HeightValue::from_int(a.abs()))
    }

    fn log_size(&self, a: &BigInt) -> f64 {
        ln_bigint(a)
    }

    fn gcd(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a.gcd(b)
    }

    fn primes_up_to(&self, bound: u64) -> Vec<PrimeOfK<BigInt>> {
        primes::segmented_sieve(bound)
            .into_iter()
            .map(|p| PrimeOfK { generator: BigInt::from(p), norm: p })
            .collect()
    }

    fn reduce(&self, a: &BigInt, p: &PrimeOfK<BigInt>) -> u64 {
        mod_u64(a, p.norm)
    }

    fn residue_add(&self, x: u64, y: u64, p: &PrimeOfK<BigInt>) -> u64 {
        ((x as u128 + y as u128) % p.norm as u128) as u64
    }

    fn residue_mul(&self, x: u64, y: u64, p: &PrimeOfK<BigInt>) -> u64 {
        ((x as u128 * y as u128) % p.norm as u128) as u64
    }

    fn residue_inv(&self, x: u64, p: &PrimeOfK<BigInt>) -> u64 {
        mod_inv(x, p.norm)
    }

    fn residue_lift(&self, r: u64, _p: &PrimeOfK<BigInt>) -> BigInt {
        BigInt::from(r)
    }

    fn prime_from_generator(&self, g: &BigInt) -> Result<PrimeOfK<BigInt>> {
        let g = g.abs();
        let n = g.to_u64().ok_or_else(|| Error::Parse(format!("prime {g} too large")))?;
        if !primes::is_prime_u64(n) {
            return Err(Error::Parse(format!("{g} is not prime")));
        }
        Ok(PrimeOfK { generator: g, norm: n })
    }

    fn box_count(&self, bound: &HeightValue) -> BigUint {
        let n = Self::bound_int(bound);
        if n.is_negative() {
            return BigUint::zero();
        }
        (n * 2u32 + 1u32).to_biguint().unwrap()
    }

    fn box_elements(&self, bound: &HeightValue) -> Vec<BigInt> {
        let n = Self::bound_int(bound).to_i64().expect("box bound fits i64");
        (-n..=n).map(BigInt::from).collect()
    }

    fn scan_order(&self, bound: &HeightValue) -> Vec<BigInt> {
        let n = Self::bound_int(bound).to_i64().expect("box bound fits i64");
        let mut out = vec![BigInt::zero()];
        for k in 1..=n {
            out.push(BigInt::from(k));
            out.push(BigInt::from(-k));
        }
        out
    }

    fn random_in_box<R: Rng + ?Sized>(&self, rng: &mut R, bound: &HeightValue) -> BigInt {
        let n = Self::bound_int(bound);
        match n.to_i64() {
            Some(n) => BigInt::from(rng.gen_range(-n..=n)),
            None => {
                // Rejection sampling on random bits for huge boxes.
                let span: BigInt = &n * 2 + 1;
                let bits = span.bits();
                loop {
                    let words: Vec<u32> = (0..bits.div_ceil(32)).map(|_| rng.gen()).collect();
                    let mut v = BigInt::from_slice(Sign::Plus, &words);
                    v %= BigInt::one() << bits ;
                    if v < span {
                        return v - &n;
                    }
                }
            }
        }
    }

    fn format_elem(&self, a: &BigInt) -> serde_json::Value {
        serde_json::Value::String(a.to_string())
    }

    fn parse_elem(&self, v: &serde_json::Value) -> Result<BigInt> {
        match v {
            serde_json::Value::String(s) => {
                s.trim().parse().map_err(|_| Error::Parse(format!("bad integer `{s}`")))
            }
            serde_json::Value::Number(n) if n.is_i64() || n.is_u64() => {
                Ok(n.to_string().parse().unwrap())
            }
            other => Err(Error::Parse(format!("bad integer {other}"))),
        }
    }

    fn display_elem(&self, a: &BigInt) -> String {
        a.to_string()
    }

    fn small_kernel_vector(&self, rows: &[Vec<BigInt>]) -> Result<Vec<BigInt>> {
        crate::siegel::integer::small_kernel_vector(rows)
    }

    fn small_kernel_basis(&self, rows: &[Vec<BigInt>]) -> Result<Vec<Vec<BigInt>>> {
        crate::siegel::integer::small_kernel_basis(rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residues_are_canonical() {
        let q = Rationals::new();
        let p = q.prime_from_generator(&BigInt::from(7)).unwrap();
        assert_eq!(q.reduce(&BigInt::from(-1), &p), 6);
        assert_eq!(q.residue_inv(3, &p), 5);
        assert_eq!(q.residue_mul(3, 5, &p), 1);
    }

    #[test]
    fn scan_order_is_symmetric() {
        let q = Rationals::new();
        let s: Vec<i64> = q.scan_order(&HeightValue::from_int(2)).iter().map(|x| x.to_i64().unwrap()).collect();
        assert_eq!(s, vec![0, 1, -1, 2, -2]);
    }
}
