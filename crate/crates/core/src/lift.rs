//! Lifting projective points to primitive integral tuples, and the S-unit
//! log-lattice reduction over `Q`.

use num_bigint::BigInt;
use num_traits::One;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::primes::is_prime_u64;
use crate::field::{abs_value, Fraction, GlobalField, Place, Rationals};
use crate::heights::{canonical_projective, clear_denominators, height_projective, HeightValue};

#[derive(Clone, Debug)]
pub struct Lift<E> {
    /// Coordinates in `O_K` with unit gcd, first nonzero coordinate normalised.
    pub coords: Vec<E>,
    pub height: HeightValue,
    pub log: Vec<String>,
}

/// Integral primitive representative of a projective point given by fractions.
pub fn lift_point<F: GlobalField>(field: &F, x: &[Fraction<F::Elem>]) -> Result<Lift<F::Elem>> {
    if x.iter().all(|c| c.is_zero(field)) {
        return Err(Error::ZeroPoint);
    }
    let mut log = Vec::new();
    let cleared = clear_denominators(field, x);
    log.push("denominators cleared by their lcm".to_string());
    // O_K is a PID here, so the ideal generated by the coordinates is principal
    // and the class representative is the unit ideal.
    log.push("coordinate ideal is principal: class representative is O_K".to_string());
    let coords = canonical_projective(field, &cleared)?;
    log.push("common factor removed and leading coordinate normalised".to_string());
    let height = height_projective(field, &coords)?;
    Ok(Lift { coords, height, log })
}

/// `S = {inf} ∪ {p_1, ..., p_r}` with positive targets, `targets[0]` at infinity.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SUnitTarget {
    pub primes: Vec<u64>,
    pub targets: Vec<f64>,
}

impl SUnitTarget {
    pub fn new(primes: Vec<u64>, targets: Vec<f64>) -> Result<Self> {
        if targets.len() != primes.len() + 1 {
            return Err(Error::Parse(format!("{} targets for {} places", targets.len(), primes.len() + 1)));
        }
        if let Some(t) = targets.iter().find(|t| !(t.is_finite() && **t > 0.0)) {
            return Err(Error::Parse(format!("target {t} is not a positive real")));
        }
        let mut sorted = primes.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != primes.len() {
            return Err(Error::Parse("repeated prime in S".into()));
        }
        if let Some(p) = primes.iter().find(|&&p| !is_prime_u64(p)) {
            return Err(Error::Parse(format!("{p} is not prime")));
        }
        Ok(SUnitTarget { primes, targets })
    }

    /// `C_W = 1/2 sum log p_i`, half the sum of the basis distances.
    pub fn covering_constant(&self) -> f64 {
        0.5 * self.primes.iter().map(|&p| (p as f64).ln()).sum::<f64>()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SUnitReduction {
    pub exponents: Vec<i64>,
    pub sign: i8,
    pub t: f64,
    /// `max_v |log x_v - log t - log ||eps||_v|`.
    pub distance: f64,
    pub covering_constant: f64,
    /// Closest vector found by exhaustive enumeration.
    pub exact: bool,
    /// Candidates examined.
    pub examined: u64,
}

impl SUnitReduction {
    pub fn epsilon(&self, target: &SUnitTarget) -> Fraction<BigInt> {
        let (mut num, mut den) = (BigInt::one(), BigInt::one());
        for (&p, &a) in target.primes.iter().zip(&self.exponents) {
            let pa = num_traits::pow(BigInt::from(p), a.unsigned_abs() as usize);
            if a >= 0 {
                num *= pa;
            } else {
                den *= pa;
            }
        }
        if self.sign < 0 {
            num = -num;
        }
        Fraction { num, den }
    }

    /// `prod_{v in S} ||eps||_v`, computed exactly.
    pub fn s_product(&self, target: &SUnitTarget) -> Result<HeightValue> {
        let q = Rationals::new();
        let eps = self.epsilon(target);
        let mut acc = abs_value(&q, &eps, &Place::Infinite)?;
        for &p in &target.primes {
            let prime = q.prime_from_generator(&BigInt::from(p))?;
            acc = acc.mul(&abs_value(&q, &eps, &Place::Finite(prime))?);
        }
        Ok(acc)
    }
}

/// Candidate budget for exact enumeration.
const ENUMERATION_BUDGET: u64 = 4_000_000;

/// Log-vector of `prod p_i^{a_i}` on `S`, infinity first.
fn log_vector(logs: &[f64], a: &[i64]) -> Vec<f64> {
    let mut v = Vec::with_capacity(logs.len() + 1);
    v.push(logs.iter().zip(a).map(|(l, &e)| l * e as f64).sum());
    v.extend(logs.iter().zip(a).map(|(l, &e)| -l * e as f64));
    v
}

/// Half the spread of `y - l(a)`, and the optimal `log t`.
fn spread(y: &[f64], logs: &[f64], a: &[i64]) -> (f64, f64) {
    let l = log_vector(logs, a);
    let z: Vec<f64> = y.iter().zip(&l).map(|(u, w)| u - w).collect();
    let hi = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = z.iter().cloned().fold(f64::INFINITY, f64::min);
    ((hi - lo) / 2.0, (hi + lo) / 2.0)
}

fn better(cand: (f64, &[i64]), best: (f64, &[i64])) -> bool {
    const TOL: f64 = 1e-12;
    if cand.0 < best.0 - TOL {
        return true;
    }
    if cand.0 > best.0 + TOL {
        return false;
    }
    let n1: i64 = cand.1.iter().map(|a| a.abs()).sum();
    let n2: i64 = best.1.iter().map(|a| a.abs()).sum();
    n1 < n2 || (n1 == n2 && cand.1 < best.1)
}

/// Closest S-unit to the target in the log-lattice, up to the scale `t`.
pub fn sunit_reduce<F: GlobalField>(field: &F, target: &SUnitTarget) -> Result<SUnitReduction> {
    if field.characteristic() != 0 {
        return Err(Error::UnsupportedField("S-unit reduction is implemented over Q only".into()));
    }
    let logs: Vec<f64> = target.primes.iter().map(|&p| (p as f64).ln()).collect();
    let y: Vec<f64> = target.targets.iter().map(|t| t.ln()).collect();
    let r = logs.len();
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    // Real solution: distance zero at tau = mean.
    let real: Vec<f64> = (0..r).map(|i| (mean - y[i + 1]) / logs[i]).collect();
    let mut best: Vec<i64> = real.iter().map(|a| a.round() as i64).collect();
    let (mut best_d, _) = spread(&y, &logs, &best);
    let mut examined = 1u64;

    // Any better vector has |a_i - real_i| <= 2 D / log p_i.
    let ranges: Vec<(i64, i64)> = (0..r)
        .map(|i| {
            let rad = 2.0 * best_d / logs[i] + 1e-9;
            ((real[i] - rad).ceil() as i64, (real[i] + rad).floor() as i64)
        })
        .collect();
    let total = ranges.iter().try_fold(1u64, |acc, (lo, hi)| acc.checked_mul((hi - lo + 1).max(1) as u64));
    let exact = r <= 4 && total.is_some_and(|t| t <= ENUMERATION_BUDGET);

    if exact {
        let mut a: Vec<i64> = ranges.iter().map(|r| r.0).collect();
        if r > 0 && ranges.iter().all(|(lo, hi)| lo <= hi) {
            loop {
                examined += 1;
                let (d, _) = spread(&y, &logs, &a);
                if better((d, &a), (best_d, &best)) {
                    best_d = d;
                    best = a.clone();
                }
                let mut k = 0;
                while k < r {
                    a[k] += 1;
                    if a[k] <= ranges[k].1 {
                        break;
                    }
                    a[k] = ranges[k].0;
                    k += 1;
                }
                if k == r {
                    break;
                }
            }
        }
    } else {
        // Rounding is already within C_W; improve by unit steps.
        loop {
            let mut improved = false;
            for i in 0..r {
                for step in [-1, 1] {
                    let mut a = best.clone();
                    a[i] += step;
                    examined += 1;
                    let (d, _) = spread(&y, &logs, &a);
                    if better((d, &a), (best_d, &best)) {
                        best_d = d;
                        best = a;
                        improved = true;
                    }
                }
            }
            if !improved {
                break;
            }
        }
    }
    let (distance, tau) = spread(&y, &logs, &best);
    Ok(SUnitReduction {
        exponents: best,
        sign: 1,
        t: tau.exp(),
        distance,
        covering_constant: target.covering_constant(),
        exact,
        examined,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{product_formula_holds, FpPoly, FunctionField};

    fn fr(q: &Rationals, n: i64, d: i64) -> Fraction<BigInt> {
        Fraction::new(q, BigInt::from(n), BigInt::from(d)).unwrap()
    }

    #[test]
    fn lifts() {
        let q = Rationals::new();
        let l = lift_point(&q, &[fr(&q, 4, 1), fr(&q, 6, 1)]).unwrap();
        assert_eq!(l.coords, vec![BigInt::from(2), BigInt::from(3)]);
        assert_eq!(l.height, HeightValue::from_int(3));
        let l = lift_point(&q, &[fr(&q, 1, 1), fr(&q, 0, 1)]).unwrap();
        assert_eq!(l.coords, vec![BigInt::from(1), BigInt::from(0)]);
        let l = lift_point(&q, &[fr(&q, -1, 2), fr(&q, 1, 3)]).unwrap();
        assert_eq!(l.coords, vec![BigInt::from(3), BigInt::from(-2)]);
        assert!(matches!(lift_point(&q, &[fr(&q, 0, 1)]), Err(Error::ZeroPoint)));

        let k = FunctionField::new(2).unwrap();
        let t = FpPoly::new(vec![0, 1]);
        let t2 = FpPoly::new(vec![0, 0, 1]);
        let l = lift_point(&k, &[Fraction::from_elem(&k, t2), Fraction::from_elem(&k, t.clone())]).unwrap();
        assert_eq!(l.coords, vec![t, k.one()]);
        assert_eq!(l.height, HeightValue::from_int(2));
    }

    #[test]
    fn exact_sunit() {
        let q = Rationals::new();
        let target = SUnitTarget::new(vec![2, 3], vec![6.0, 0.5, 1.0 / 3.0]).unwrap();
        let r = sunit_reduce(&q, &target).unwrap();
        assert_eq!(r.exponents, vec![1, 1]);
        assert!(r.distance < 1e-12 && (r.t - 1.0).abs() < 1e-12);
        assert!(r.s_product(&target).unwrap().is_one());
        assert!(product_formula_holds(&q, &r.epsilon(&target)).unwrap());

        let ones = SUnitTarget::new(vec![2, 3, 5], vec![1.0; 4]).unwrap();
        let r = sunit_reduce(&q, &ones).unwrap();
        assert_eq!(r.exponents, vec![0, 0, 0]);
        assert!(r.distance < 1e-12);
    }

    #[test]
    fn single_prime_matches_scan() {
        let q = Rationals::new();
        let target = SUnitTarget::new(vec![2], vec![3.0, 1.0]).unwrap();
        let r = sunit_reduce(&q, &target).unwrap();
        // independent scan over |a| <= 8
        let (mut best_a, mut best_d) = (0i64, f64::INFINITY);
        for a in -8i64..=8 {
            let z = [3f64.ln() - a as f64 * 2f64.ln(), a as f64 * 2f64.ln()];
            let d = (z[0] - z[1]).abs() / 2.0;
            if d < best_d - 1e-12 {
                best_d = d;
                best_a = a;
            }
        }
        assert_eq!(r.exponents, vec![best_a]);
        assert!((r.distance - best_d).abs() < 1e-12);
        assert!(r.distance <= r.covering_constant);
    }

    #[test]
    fn rejects_function_fields_and_bad_targets() {
        let k = FunctionField::new(3).unwrap();
        let t = SUnitTarget::new(vec![2], vec![1.0, 1.0]).unwrap();
        assert!(matches!(sunit_reduce(&k, &t), Err(Error::UnsupportedField(_))));
        assert!(SUnitTarget::new(vec![4], vec![1.0, 1.0]).is_err());
        assert!(SUnitTarget::new(vec![2], vec![1.0, -1.0]).is_err());
        assert!(SUnitTarget::new(vec![2], vec![1.0]).is_err());
    }
}
