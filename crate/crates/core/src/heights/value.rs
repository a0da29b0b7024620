use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// An exact positive real of the kind heights and absolute values take:
/// a rational over Q, or an integral power `q^exp` over `F_q(T)`.
#[derive(Clone, Debug)]
pub enum HeightValue {
    Rational(BigRational),
    Power { q: u64, exp: i64 },
}

pub(crate) fn ln_bigint(n: &BigInt) -> f64 {
    let n = n.abs();
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().unwrap().ln();
    }
    let shift = bits - 64;
    let top: BigInt = &n >> shift;
    top.to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

impl HeightValue {
    pub fn one() -> Self {
        HeightValue::Rational(BigRational::one())
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        HeightValue::Rational(BigRational::from_integer(n.into()))
    }

    pub fn from_ratio(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Self {
        HeightValue::Rational(BigRational::new(num.into(), den.into()))
    }

    pub fn power(q: u64, exp: i64) -> Self {
        HeightValue::Power { q, exp }
    }

    pub fn to_rational(&self) -> BigRational {
        match self {
            HeightValue::Rational(r) => r.clone(),
            HeightValue::Power { q, exp } => {
                let base = BigInt::from(*q).pow(exp.unsigned_abs() as u32);
                if *exp >= 0 {
                    BigRational::from_integer(base)
                } else {
                    BigRational::new(BigInt::one(), base)
                }
            }
        }
    }

    pub fn ln(&self) -> f64 {
        match self {
            HeightValue::Rational(r) => ln_bigint(r.numer()) - ln_bigint(r.denom()),
            HeightValue::Power { q, exp } => *exp as f64 * (*q as f64).ln(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.ln().exp()
    }

    pub fn is_one(&self) -> bool {
        match self {
            HeightValue::Rational(r) => r.is_one(),
            HeightValue::Power { exp, .. } => *exp == 0,
        }
    }

    pub fn is_positive(&self) -> bool {
        match self {
            HeightValue::Rational(r) => r.is_positive(),
            HeightValue::Power { .. } => true,
        }
    }

    pub fn mul(&self, other: &HeightValue) -> HeightValue {
        match (self, other) {
            (HeightValue::Power { q: a, exp: e }, HeightValue::Power { q: b, exp: f }) if a == b => {
                HeightValue::Power { q: *a, exp: e + f }
            }
            (HeightValue::Power { exp: 0, .. }, x) | (x, HeightValue::Power { exp: 0, .. }) => x.clone(),
            _ => HeightValue::Rational(self.to_rational() * other.to_rational()),
        }
    }

    pub fn recip(&self) -> HeightValue {
        match self {
            HeightValue::Rational(r) => HeightValue::Rational(r.recip()),
            HeightValue::Power { q, exp } => HeightValue::Power { q: *q, exp: -exp },
        }
    }

    pub fn pow(&self, e: i64) -> HeightValue {
        match self {
            HeightValue::Power { q, exp } => HeightValue::Power { q: *q, exp: exp * e },
            HeightValue::Rational(r) => {
                let p = num_traits::pow(r.clone(), e.unsigned_abs() as usize);
                HeightValue::Rational(if e >= 0 { p } else { p.recip() })
            }
        }
    }

    /// `floor(self)` as an integer.
    pub fn floor(&self) -> BigInt {
        self.to_rational().floor().to_integer()
    }

    /// Largest `k` with `q^k <= self`; `None` when `self < 1`.
    pub fn floor_log(&self, q: u64) -> Option<i64> {
        if let HeightValue::Power { q: b, exp } = self {
            if *b == q {
                return (*exp >= 0).then_some(*exp);
            }
        }
        let r = self.to_rational();
        if r < BigRational::one() {
            return None;
        }
        let n = r.floor().to_integer();
        let qb = BigInt::from(q);
        let mut k = 0i64;
        let mut acc = qb.clone();
        while acc <= n {
            acc *= &qb;
            k += 1;
        }
        Some(k)
    }

    pub fn max(a: HeightValue, b: HeightValue) -> HeightValue {
        if a >= b {
            a
        } else {
            b
        }
    }
}

impl PartialEq for HeightValue {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for HeightValue {}

impl PartialOrd for HeightValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeightValue {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (HeightValue::Power { q: a, exp: e }, HeightValue::Power { q: b, exp: f }) if a == b => e.cmp(f),
            _ => self.to_rational().cmp(&other.to_rational()),
        }
    }
}

impl fmt::Display for HeightValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HeightValue::Rational(r) => {
                if r.is_integer() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            HeightValue::Power { q, exp } => write!(f, "{q}^{exp}"),
        }
    }
}

impl FromStr for HeightValue {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("bad height value `{s}`"));
        let v = if let Some((b, e)) = s.split_once('^') {
            let q: u64 = b.trim().parse().map_err(|_| bad())?;
            let exp: i64 = e.trim().parse().map_err(|_| bad())?;
            if q < 2 {
                return Err(bad());
            }
            HeightValue::Power { q, exp }
        } else if let Some((n, d)) = s.split_once('/') {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            HeightValue::Rational(BigRational::new(n, d))
        } else if s.contains('e') || s.contains('.') {
            let x: f64 = s.parse().map_err(|_| bad())?;
            let r = BigRational::from_float(x).ok_or_else(bad)?;
            HeightValue::Rational(r)
        } else {
            let n: BigInt = s.parse().map_err(|_| bad())?;
            HeightValue::Rational(BigRational::from_integer(n))
        };
        if !v.is_positive() {
            return Err(bad());
        }
        Ok(v)
    }
}

impl Serialize for HeightValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for HeightValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        let s = match v {
            serde_json::Value::String(s) => s,
            serde_json::Value::Number(n) => n.to_string(),
            other => return Err(serde::de::Error::custom(format!("bad height value {other}"))),
        };
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_order() {
        let a: HeightValue = "1000".parse().unwrap();
        let b: HeightValue = "2^10".parse().unwrap();
        assert!(a < b);
        assert_eq!(b.to_string(), "2^10");
        assert_eq!("7/2".parse::<HeightValue>().unwrap(), HeightValue::from_ratio(7, 2));
        assert!("0".parse::<HeightValue>().is_err());
        assert!("-3".parse::<HeightValue>().is_err());
    }

    #[test]
    fn floor_log_matches_powers() {
        let n = HeightValue::from_int(16);
        assert_eq!(n.floor_log(2), Some(4));
        assert_eq!(HeightValue::from_int(15).floor_log(2), Some(3));
        assert_eq!(HeightValue::from_ratio(1, 2).floor_log(2), None);
        assert_eq!(HeightValue::power(3, 5).floor_log(3), Some(5));
    }

    #[test]
    fn ln_of_huge_integer() {
        let big = HeightValue::power(2, 5000).to_rational();
        let v = HeightValue::Rational(big);
        assert!((v.ln() - 5000.0 * std::f64::consts::LN_2).abs() < 1e-6);
    }
}
