//! Closed-form constant recursions for the generic-family and
//! characteristic-set constructions, exactly as printed.

use serde::Serialize;

use crate::field::FieldConstants;
use crate::sieve::{sieve_constant, SieveConstant};

/// Parameters of one recursion level.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Level {
    pub d: usize,
    pub h: usize,
    pub epsilon: f64,
    pub kappa: f64,
    pub alpha: f64,
    pub c: f64,
}

impl Level {
    pub fn nu(&self) -> f64 {
        (self.d as f64 - 1.0) / self.d as f64
    }

    /// `C_1(kappa/4, 1/4, eps/(2d))`.
    pub fn c1_big(&self, k: &FieldConstants) -> f64 {
        self.kappa * self.epsilon / (128.0 * k.c5() * self.d as f64)
    }

    pub(crate) fn descend(&self, alpha: f64, c: f64) -> Level {
        Level {
            d: self.d - 1,
            h: self.h,
            epsilon: self.nu() * self.epsilon,
            kappa: self.kappa / 2.0,
            alpha,
            c,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LemmaConstants {
    pub b: f64,
    pub kappa1: f64,
    pub c1: f64,
}

/// `B_1 = 2^8 alpha c5 d / (kappa eps)` for the generic family.
pub fn lemma_b1(level: &Level, k: &FieldConstants) -> f64 {
    256.0 * level.alpha * k.c5() * level.d as f64 / (level.kappa * level.epsilon)
}

/// `c'(K, nu) = c / (8 c'') ((1 - nu) eps)^{d_K}`.
pub fn lemma_cprime(level: &Level, k: &FieldConstants) -> f64 {
    level.c / (8.0 * k.c_count) * ((1.0 - level.nu()) * level.epsilon)
}

/// Sub-level used on the sections of the pruned set.
pub fn lemma_sublevel(level: &Level, k: &FieldConstants) -> Level {
    let cp = lemma_cprime(level, k) / 2f64.powi(level.d as i32);
    level.descend(2.0 * level.alpha / level.c1_big(k), cp)
}

pub fn lemma_constants(level: &Level, k: &FieldConstants) -> LemmaConstants {
    if level.d <= level.h {
        return LemmaConstants { b: 2.0, kappa1: 1.0, c1: 1.0 };
    }
    let s = lemma_constants(&lemma_sublevel(level, k), k);
    let d = level.d as f64;
    LemmaConstants {
        b: 4096.0 * d * k.c5() * s.b / (level.kappa * level.epsilon * s.kappa1 * s.c1),
        kappa1: s.kappa1 / 4.0,
        c1: s.kappa1 * s.c1 / 2f64.powi(level.d as i32 + 4),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropConstants {
    pub delta: f64,
    pub c2: f64,
    /// Only set above the base case.
    pub detail: Option<PropDetail>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropDetail {
    pub b1: f64,
    pub cprime: f64,
    pub delta0: f64,
    pub c2_sub: f64,
    pub generic: LemmaConstants,
    pub beta: f64,
    pub kappa3: f64,
    pub c4: f64,
    pub c5: f64,
    pub delta1: f64,
}

/// `B_1 = 2^7 alpha c5 d / (kappa eps)` for the characteristic set.
pub fn prop_b1(level: &Level, k: &FieldConstants) -> f64 {
    128.0 * level.alpha * k.c5() * level.d as f64 / (level.kappa * level.epsilon)
}

/// `c'(K, nu) = 3c / (2^{3d+4} c'') ((1 - nu) eps)^{d_K}`.
pub fn prop_cprime(level: &Level, k: &FieldConstants) -> f64 {
    3.0 * level.c / (2f64.powi(3 * level.d as i32 + 4) * k.c_count) * ((1.0 - level.nu()) * level.epsilon)
}

pub fn prop_sublevel(level: &Level, k: &FieldConstants) -> Level {
    level.descend(prop_b1(level, k), prop_cprime(level, k))
}

/// Level at which generic families are built on the witness sections.
pub fn prop_generic_level(level: &Level, delta0: f64, k: &FieldConstants) -> Level {
    level.descend(prop_b1(level, k), delta0 * prop_cprime(level, k))
}

pub fn prop_constants(level: &Level, k: &FieldConstants) -> PropConstants {
    if level.d <= level.h {
        let gamma = level.epsilon / (2.0 * level.d.max(1) as f64);
        let c2 = sieve_constant(SieveConstant::C2 { alpha: level.alpha, kappa: level.kappa, gamma }, k);
        return PropConstants { delta: 1.0, c2, detail: None };
    }
    let b1 = prop_b1(level, k);
    let cprime = prop_cprime(level, k);
    let sub = prop_constants(&prop_sublevel(level, k), k);
    let generic = lemma_constants(&prop_generic_level(level, sub.delta, k), k);
    let beta = generic.kappa1 / 4.0;
    let kappa3 = beta * generic.c1 / (16.0 * b1 * generic.b);
    let c4 = beta * generic.c1 / (32.0 * (b1 * generic.b).powi(2));
    let d = level.d as f64;
    let c5 = level.kappa / 2f64.powi(3 * level.d as i32 + 6) * k.c2 * level.epsilon / d * c4 * generic.kappa1 * kappa3 * sub.delta;
    let delta1 = c5 / 4.0;
    PropConstants {
        delta: delta1,
        c2: 4.0 / delta1 * sub.c2,
        detail: Some(PropDetail { b1, cprime, delta0: sub.delta, c2_sub: sub.c2, generic, beta, kappa3, c4, c5, delta1 }),
    }
}

/// `m = ceil(4 r d_K / delta_1)`.
pub fn prop_section_count(delta1: f64, r: usize) -> f64 {
    (4.0 * r as f64 / delta1).ceil()
}

/// Degree from `r > (18 d_K^2 c_2 (d-1)!)^{1/(h-1)}`; `None` when `h <= 1`.
pub fn paper_degree(c2: f64, d: usize, h: usize) -> Option<f64> {
    if h <= 1 {
        return None;
    }
    let fact: f64 = (1..d).map(|i| i as f64).product();
    Some((18.0 * c2 * fact).powf(1.0 / (h as f64 - 1.0)).ceil())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn level(d: usize, h: usize) -> Level {
        Level { d, h, epsilon: 0.5, kappa: 0.5, alpha: 1.0, c: 1.0 }
    }

    #[test]
    fn base_cases() {
        let k = FieldConstants::rationals();
        assert_eq!(lemma_constants(&level(1, 1), &k), LemmaConstants { b: 2.0, kappa1: 1.0, c1: 1.0 });
        let p = prop_constants(&level(1, 1), &k);
        assert_eq!(p.delta, 1.0);
        assert!(p.detail.is_none());
    }

    #[test]
    fn one_step_matches_hand_evaluation() {
        let k = FieldConstants::rationals();
        let l = level(2, 1);
        let c = lemma_constants(&l, &k);
        // Sections are base cases: kappa1 = 1/4, c1 = 1/64, B = 2^12 * 2 * 18 * 2 / (0.25).
        assert_eq!(c.kappa1, 0.25);
        assert_eq!(c.c1, 1.0 / 64.0);
        assert!((c.b - 4096.0 * 2.0 * 18.0 * 2.0 / 0.25).abs() < 1e-6);
        assert!((lemma_b1(&l, &k) - 256.0 * 18.0 * 2.0 / 0.25).abs() < 1e-9);
        let p = prop_constants(&l, &k);
        let det = p.detail.unwrap();
        assert_eq!(det.delta0, 1.0);
        assert!(p.delta > 0.0 && p.delta < 1e-10);
        assert!((p.c2 - 4.0 / det.delta1 * det.c2_sub).abs() <= 1e-9 * p.c2);
    }

    #[test]
    fn degree_formula() {
        assert_eq!(paper_degree(1.0, 3, 2), Some(36.0));
        assert_eq!(paper_degree(1.0, 2, 1), None);
    }
}
