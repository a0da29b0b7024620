use serde::{Deserialize, Serialize};

/// Explicit constants of a global field.
///
/// `c1..c4` bracket `w(P(Q))` and `sum_{N(p) <= Q} log N(p)`:
/// `c1 log Q <= w(P(Q)) <= c2 log Q` and `c3 Q <= sum log N(p) <= c4 Q`
/// for `Q >= valid_from`. `c6` is the small-solution constant and
/// `c_count` bounds `|[N]_{O_K}| <= c_count * N * log N`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldConstants {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub c6: f64,
    pub c_count: f64,
    pub valid_from: u64,
}

/// Number of monic irreducibles of degree `n` over `F_q` (necklace formula).
pub fn irreducible_count(q: u64, n: u32) -> u128 {
    let mut total: i128 = 0;
    for d in 1..=n {
        if !n.is_multiple_of(d) {
            continue;
        }
        let mu = mobius(d);
        if mu != 0 {
            total += mu as i128 * (q as i128).pow(n / d);
        }
    }
    (total / n as i128) as u128
}

fn mobius(mut n: u32) -> i32 {
    let mut sign = 1;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            sign = -sign;
        }
        p += 1;
    }
    if n > 1 {
        sign = -sign;
    }
    sign
}

impl FieldConstants {
    pub fn rationals() -> Self {
        FieldConstants { c1: 0.5, c2: 1.5, c3: 0.5, c4: 1.5, c6: 1.0, c_count: 3.0, valid_from: 5 }
    }

    /// Constants for `F_q(T)` read off from the exact irreducible counts.
    ///
    /// Both prime sums are constant on `[q^K, q^{K+1})`, so the extreme
    /// ratios sit at the interval ends; the scan runs until `q^K` leaves
    /// the f64 range and the result is widened by 1%.
    pub fn function_field(q: u64) -> Self {
        let lq = (q as f64).ln();
        let qf = q as f64;
        let (mut c1, mut c2, mut c3, mut c4) = (f64::MAX, 0.0f64, f64::MAX, 0.0f64);
        let mut w = 0.0;
        let mut theta = 0.0;
        let mut k = 1u32;
        while qf.powi(k as i32 + 1) < 1e280 && k <= 200 {
            let count = if k <= 40 {
                irreducible_count(q, k) as f64
            } else {
                qf.powi(k as i32) / k as f64
            };
            w += count * k as f64 * lq / qf.powi(k as i32);
            theta += count * k as f64 * lq;
            c1 = c1.min(w / ((k + 1) as f64 * lq));
            c2 = c2.max(w / (k as f64 * lq));
            c3 = c3.min(theta / qf.powi(k as i32 + 1));
            c4 = c4.max(theta / qf.powi(k as i32));
            k += 1;
        }
        FieldConstants {
            c1: c1 * 0.99,
            c2: c2 * 1.01,
            c3: c3 * 0.99,
            c4: c4 * 1.01,
            c6: 1.0,
            c_count: 2.0 * qf,
            valid_from: q,
        }
    }

    pub fn custom(c1: f64, c2: f64, c3: f64, c4: f64) -> Self {
        FieldConstants { c1, c2, c3, c4, ..FieldConstants::rationals() }
    }

    /// The sieve constant `c5 = 2 (c4 + 3) / c1`.
    pub fn c5(&self) -> f64 {
        2.0 * (self.c4 + 3.0) / self.c1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn necklace_small_cases() {
        assert_eq!(irreducible_count(2, 1), 2);
        assert_eq!(irreducible_count(2, 2), 1);
        assert_eq!(irreducible_count(2, 3), 2);
        assert_eq!(irreducible_count(2, 4), 3);
        assert_eq!(irreducible_count(3, 2), 3);
    }

    #[test]
    fn default_c5_is_eighteen() {
        assert!((FieldConstants::rationals().c5() - 18.0).abs() < 1e-12);
        assert!((FieldConstants::custom(1.0, 1.5, 0.5, 4.0).c5() - 14.0).abs() < 1e-12);
    }

    #[test]
    fn function_field_constants_are_sane() {
        for q in [2u64, 3, 5, 7] {
            let c = FieldConstants::function_field(q);
            assert!(c.c1 > 0.3 && c.c1 <= c.c2 && c.c2 < 1.1, "{q}: {c:?}");
            assert!(c.c3 > 0.0 && c.c3 <= c.c4, "{q}: {c:?}");
            let exact_c4 = q as f64 * (q as f64).ln() / (q as f64 - 1.0);
            assert!(c.c4 <= exact_c4 * 1.011, "{q}: {c:?}");
        }
    }
}
