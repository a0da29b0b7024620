//! Small solutions of homogeneous linear systems over `O_K`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{FieldConstants, GlobalField};
use crate::heights::{height_affine, HeightValue};

pub mod integer;
pub mod polynomial;

/// Tolerance for comparing logarithms of exact heights against real bounds.
pub const LOG_TOLERANCE: f64 = 1e-9;

/// `s x t` homogeneous system `A c = 0` over `O_K`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearSystem<E> {
    pub rows: Vec<Vec<E>>,
}

impl<E: Clone> LinearSystem<E> {
    pub fn new(rows: Vec<Vec<E>>) -> Result<Self> {
        let t = rows.first().map(|r| r.len()).ok_or_else(|| Error::Parse("empty system".into()))?;
        if t == 0 || rows.iter().any(|r| r.len() != t) {
            return Err(Error::Parse("ragged or empty system".into()));
        }
        Ok(LinearSystem { rows })
    }

    pub fn s(&self) -> usize {
        self.rows.len()
    }

    pub fn t(&self) -> usize {
        self.rows[0].len()
    }

    /// `C = max H_K(a_ij)`.
    pub fn coefficient_height<F: GlobalField<Elem = E>>(&self, field: &F) -> HeightValue {
        self.rows.iter().flatten().map(|a| field.height(a)).fold(HeightValue::one(), HeightValue::max)
    }

    pub fn residual<F: GlobalField<Elem = E>>(&self, field: &F, c: &[E]) -> Vec<E> {
        self.rows
            .iter()
            .map(|r| r.iter().zip(c).fold(field.zero(), |acc, (a, x)| field.add(&acc, &field.mul(a, x))))
            .collect()
    }
}

/// The real bound `c6 (t C)^{8 s / (t - 2 s)}`, kept with its logarithm.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SiegelBound {
    pub value: f64,
    pub ln_value: f64,
}

impl SiegelBound {
    pub fn admits(&self, h: &HeightValue) -> bool {
        h.ln() <= self.ln_value + LOG_TOLERANCE
    }
}

pub fn siegel_exponent(s: usize, t: usize) -> Result<f64> {
    if t <= 2 * s {
        return Err(Error::HypothesisViolated(format!("need t > 2s, got s = {s}, t = {t}")));
    }
    Ok(8.0 * s as f64 / (t - 2 * s) as f64)
}

pub fn siegel_bound(s: usize, t: usize, c: &HeightValue, constants: &FieldConstants) -> Result<SiegelBound> {
    let e = siegel_exponent(s, t)?;
    let ln_value = constants.c6.ln() + e * ((t as f64).ln() + c.ln());
    Ok(SiegelBound { value: ln_value.exp(), ln_value })
}

#[derive(Clone, Debug)]
pub struct SmallSolution<E> {
    pub vector: Vec<E>,
    pub height: HeightValue,
    /// Present when `t > 2s`.
    pub bound: Option<SiegelBound>,
}

impl<E> SmallSolution<E> {
    pub fn within_bound(&self) -> bool {
        self.bound.map(|b| b.admits(&self.height)).unwrap_or(true)
    }
}

/// Exact nonzero kernel vector of small height `H_K(1 : c)`.
pub fn small_solution<F: GlobalField>(field: &F, sys: &LinearSystem<F::Elem>) -> Result<SmallSolution<F::Elem>> {
    let vector = field.small_kernel_vector(&sys.rows)?;
    debug_assert!(sys.residual(field, &vector).iter().all(|x| field.is_zero(x)));
    if sys.residual(field, &vector).iter().any(|x| !field.is_zero(x)) {
        return Err(Error::NoKernel);
    }
    let height = height_affine(field, &vector);
    let bound = if sys.t() > 2 * sys.s() {
        Some(siegel_bound(sys.s(), sys.t(), &sys.coefficient_height(field), field.constants())?)
    } else {
        None
    };
    Ok(SmallSolution { vector, height, bound })
}

/// One calibration observation: system shape, coefficient height, solution height.
#[derive(Clone, Debug, Serialize)]
pub struct CalibrationSample {
    pub s: usize,
    pub t: usize,
    pub ln_c: f64,
    pub ln_height: f64,
}

/// Smallest power of two `c6` (at least `2^-20`) with `ln H <= ln c6 + e ln(tC)`
/// on every sample.
pub fn calibrate_c6(samples: &[CalibrationSample]) -> f64 {
    let need = samples
        .iter()
        .map(|x| {
            let e = 8.0 * x.s as f64 / (x.t - 2 * x.s) as f64;
            x.ln_height - e * ((x.t as f64).ln() + x.ln_c)
        })
        .fold(f64::NEG_INFINITY, f64::max);
    let k = (need / std::f64::consts::LN_2 - LOG_TOLERANCE).ceil().max(-20.0);
    2f64.powi(k as i32)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_examples() {
        let c = FieldConstants::rationals();
        let b = siegel_bound(1, 9, &HeightValue::from_int(10), &c).unwrap();
        assert!((b.value - 90f64.powf(8.0 / 7.0)).abs() < 1e-9 * b.value);
        assert!((b.value - 171.167).abs() < 1e-2);
        let b = siegel_bound(1, 3, &HeightValue::one(), &c).unwrap();
        assert!((b.value - 6561.0).abs() < 1e-6);
        let b2 = siegel_bound(1, 9, &HeightValue::from_int(20), &c).unwrap();
        let ratio = b2.value / siegel_bound(1, 9, &HeightValue::from_int(10), &c).unwrap().value;
        assert!((ratio - 2f64.powf(8.0 / 7.0)).abs() < 1e-9);
        assert!(matches!(siegel_bound(2, 4, &HeightValue::one(), &c), Err(Error::HypothesisViolated(_))));
    }
}
