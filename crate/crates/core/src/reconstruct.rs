//! End-to-end reconstruction: a characteristic subset `A`, a small
//! polynomial through `A`, and an exact count of where it vanishes.
//!
//! Rounds are repeated on the points not yet explained, and the product
//! of the accepted polynomials is measured over the whole set.

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::{GlobalField, PrimeSet};
use crate::poly::{eval_monomial, monomial_count, monomials, MPoly};
use crate::siegel::{small_solution, LinearSystem, SiegelBound};
use crate::sieve::PointSet;
use crate::structure::{
    build_characteristic_set, build_characteristic_set_with_budget, paper_degree, prop_constants, Mode, SieveParams,
};

/// Polynomial of degree at most `r` (exactly `r` when homogeneous) with its
/// height telemetry.
#[derive(Clone, Debug)]
pub struct RPolynomial<E> {
    pub poly: MPoly<E>,
    pub r: usize,
    pub homogeneous: bool,
    /// `ln H(1 : coefficients)`.
    pub ln_coefficient_height: f64,
    pub siegel: Option<SiegelBound>,
    pub within_siegel: bool,
    /// `ln(M H(1:beta) N^r) < 3 r d_K ln N`, which bounds `H(f(x))` on the box.
    pub certified: bool,
    pub certificate_margin: f64,
}

impl<E: Clone + Ord> RPolynomial<E> {
    pub fn to_json<F: GlobalField<Elem = E>>(&self, field: &F) -> Value {
        json!({
            "poly": self.poly.to_json(field),
            "display": self.poly.display(field),
            "r": self.r,
            "degree": self.poly.degree(),
            "homogeneous": self.homogeneous,
            "ln_coefficient_height": self.ln_coefficient_height,
            "siegel_bound_ln": self.siegel.map(|b| b.ln_value),
            "within_siegel": self.within_siegel,
            "certified": self.certified,
            "certificate_margin": self.certificate_margin,
        })
    }
}

fn certify_degree<F: GlobalField>(field: &F, f: &MPoly<F::Elem>, r: usize, monomials: usize, ln_n: f64) -> (bool, f64) {
    let dk = field.desc().degree() as f64;
    let ln_h = f.coefficient_height(field).ln();
    let lhs = dk * (monomials as f64).ln() + ln_h + r as f64 * dk * ln_n;
    let rhs = 3.0 * r as f64 * dk * ln_n;
    (lhs < rhs, rhs - lhs)
}

/// Small nonzero polynomial of degree `r` vanishing on every point of `a`.
///
/// Needs more than `d_K^2 |A|` monomials, otherwise `DegreeTooSmall`; the
/// Siegel bound is attached only when there are more than `2 |A|`.
pub fn vanishing_polynomial<F: GlobalField>(
    field: &F,
    dim: usize,
    a: &[Vec<F::Elem>],
    r: usize,
    homogeneous: bool,
    ln_n: f64,
) -> Result<RPolynomial<F::Elem>> {
    let dk = field.desc().degree() as usize;
    let count = monomial_count(dim, r, homogeneous);
    let required = dk * dk * a.len();
    if count <= required {
        return Err(Error::DegreeTooSmall { monomials: count, points: a.len(), required });
    }
    let basis = monomials(dim, r, homogeneous);
    let (poly, siegel, within) = if a.is_empty() {
        let p = MPoly::from_terms(field, dim, [(basis[0].clone(), field.one())]);
        (p, None, true)
    } else {
        let rows: Vec<Vec<F::Elem>> =
            a.iter().map(|x| basis.iter().map(|m| eval_monomial(field, x, m)).collect()).collect();
        let sys = LinearSystem::new(rows)?;
        let sol = small_solution(field, &sys)?;
        let p = MPoly::from_coefficients(field, dim, &basis, &sol.vector).primitive(field);
        (p, sol.bound, sol.within_bound())
    };
    if poly.is_zero() || a.iter().any(|x| !poly.vanishes_at(field, x)) {
        return Err(Error::NoKernel);
    }
    let (certified, margin) = certify_degree(field, &poly, r, count, ln_n);
    Ok(RPolynomial {
        ln_coefficient_height: poly.coefficient_height(field).ln(),
        poly,
        r,
        homogeneous,
        siegel,
        within_siegel: within,
        certified,
        certificate_margin: margin,
    })
}

/// Knobs for the round loop.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReconstructOptions {
    pub homogeneous: bool,
    /// Largest degree tried in one round.
    pub max_degree: usize,
    pub max_rounds: usize,
    /// A round is kept when its polynomial vanishes on this share of the remainder.
    pub accept_fraction: f64,
    /// Largest degree attempted in paper mode.
    pub paper_degree_cap: usize,
}

impl Default for ReconstructOptions {
    fn default() -> Self {
        ReconstructOptions { homogeneous: false, max_degree: 6, max_rounds: 8, accept_fraction: 0.25, paper_degree_cap: 64 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Attempt {
    pub r: usize,
    pub monomials: usize,
    pub budget: usize,
    pub outcome: String,
    pub a_size: Option<usize>,
    pub sections: Option<usize>,
    pub delta: Option<f64>,
    /// `monomials / |A|`.
    pub siegel_margin: Option<f64>,
    pub fraction: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct Round<E> {
    pub remainder: usize,
    pub attempts: Vec<Attempt>,
    pub accepted: Option<RPolynomial<E>>,
    pub vanishing: usize,
}

#[derive(Clone, Debug)]
pub enum ReconstructionOutcome<E> {
    Small {
        size: usize,
        /// `|S| / (c N^{k-1+eps})`.
        ratio: f64,
    },
    Structured {
        poly: RPolynomial<E>,
        factors: Vec<RPolynomial<E>>,
        fraction: f64,
        vanishing: usize,
        rounds: Vec<Round<E>>,
    },
    NoStructureFound {
        best_fraction: f64,
        rounds: Vec<Round<E>>,
        diagnostics: Vec<String>,
    },
}

impl<E: Clone + Ord> ReconstructionOutcome<E> {
    pub fn kind(&self) -> &'static str {
        match self {
            ReconstructionOutcome::Small { .. } => "Small",
            ReconstructionOutcome::Structured { .. } => "Structured",
            ReconstructionOutcome::NoStructureFound { .. } => "NoStructureFound",
        }
    }

    pub fn to_json<F: GlobalField<Elem = E>>(&self, field: &F) -> Value {
        let rounds_json = |rounds: &[Round<E>]| -> Value {
            rounds
                .iter()
                .map(|r| {
                    json!({
                        "remainder": r.remainder,
                        "attempts": r.attempts,
                        "accepted": r.accepted.as_ref().map(|p| p.to_json(field)),
                        "vanishing": r.vanishing,
                    })
                })
                .collect()
        };
        match self {
            ReconstructionOutcome::Small { size, ratio } => json!({"kind": "Small", "size": size, "ratio": ratio}),
            ReconstructionOutcome::Structured { poly, factors, fraction, vanishing, rounds } => json!({
                "kind": "Structured",
                "poly": poly.poly.to_json(field),
                "polynomial": poly.to_json(field),
                "factors": factors.iter().map(|f| f.to_json(field)).collect::<Vec<_>>(),
                "fraction": fraction,
                "vanishing": vanishing,
                "transcript": rounds_json(rounds),
            }),
            ReconstructionOutcome::NoStructureFound { best_fraction, rounds, diagnostics } => json!({
                "kind": "NoStructureFound",
                "best_fraction": best_fraction,
                "diagnostics": diagnostics,
                "transcript": rounds_json(rounds),
            }),
        }
    }
}

/// Indices of `s` (restricted to `members`) where `f` vanishes.
fn zeros<F: GlobalField>(s: &PointSet<F>, members: &[usize], f: &MPoly<F::Elem>) -> Vec<usize> {
    let field = s.field();
    members.par_iter().copied().filter(|&i| f.vanishes_at(field, s.point(i))).collect()
}

/// Exact count of points of `s` where `f` vanishes.
pub fn vanish_count<F: GlobalField>(s: &PointSet<F>, f: &MPoly<F::Elem>) -> usize {
    let all: Vec<usize> = (0..s.len()).collect();
    zeros(s, &all, f).len()
}

/// `ln(c N^{k-1+eps})`.
pub fn ln_small_threshold(params: &SieveParams) -> f64 {
    params.c.ln() + (params.k as f64 - 1.0 + params.epsilon) * params.n.ln()
}

pub fn reconstruct<F: GlobalField>(
    s: &PointSet<F>,
    params: &SieveParams,
    primes: &PrimeSet<F::Elem>,
    opts: &ReconstructOptions,
) -> Result<ReconstructionOutcome<F::Elem>> {
    params.validate()?;
    if s.dim() != params.d {
        return Err(Error::Parse(format!("set has dimension {}, parameters say d = {}", s.dim(), params.d)));
    }
    let ln_n = params.n.ln();
    let ln_t = ln_small_threshold(params);
    if s.is_empty() || (s.len() as f64).ln() < ln_t {
        return Ok(ReconstructionOutcome::Small { size: s.len(), ratio: (s.len() as f64).ln().exp() / ln_t.exp() });
    }
    if params.mode == Mode::Paper {
        return reconstruct_paper(s, params, primes, opts);
    }

    let field = s.field();
    let dk = field.desc().degree() as usize;
    let mut remainder: Vec<usize> = (0..s.len()).collect();
    let mut rounds = Vec::new();
    let mut factors: Vec<RPolynomial<F::Elem>> = Vec::new();
    let target = ((1.0 - params.eta) * s.len() as f64).ceil() as usize;
    let mut explained = 0usize;
    let mut diagnostics = Vec::new();

    while rounds.len() < opts.max_rounds && explained < target && !remainder.is_empty() {
        let sub = s.subset(&remainder);
        let mut round = Round { remainder: remainder.len(), attempts: vec![], accepted: None, vanishing: 0 };
        for r in 1..=opts.max_degree {
            let count = monomial_count(s.dim(), r, opts.homogeneous);
            let budget = (count - 1) / (2 * dk * dk);
            let mut at = Attempt {
                r,
                monomials: count,
                budget,
                outcome: String::new(),
                a_size: None,
                sections: None,
                delta: None,
                siegel_margin: None,
                fraction: None,
            };
            if budget == 0 {
                at.outcome = "budget is zero".into();
                round.attempts.push(at);
                continue;
            }
            let w = match build_characteristic_set_with_budget(&sub, primes, r, params, budget) {
                Ok(w) => w,
                Err(e) => {
                    at.outcome = format!("{}: {e}", e.kind());
                    round.attempts.push(at);
                    continue;
                }
            };
            at.a_size = Some(w.a.len());
            at.sections = w.stages.as_ref().map(|st| st.m);
            at.delta = Some(w.delta);
            at.siegel_margin = Some(count as f64 / w.a.len().max(1) as f64);
            let a: Vec<Vec<F::Elem>> = w.a.iter().map(|&i| sub.point(i).to_vec()).collect();
            let f = match vanishing_polynomial(field, s.dim(), &a, r, opts.homogeneous, ln_n) {
                Ok(f) => f,
                Err(e) => {
                    at.outcome = format!("{}: {e}", e.kind());
                    round.attempts.push(at);
                    continue;
                }
            };
            let hit = zeros(s, &remainder, &f.poly);
            let frac = hit.len() as f64 / remainder.len() as f64;
            at.fraction = Some(frac);
            if frac >= opts.accept_fraction {
                at.outcome = "accepted".into();
                round.attempts.push(at);
                round.vanishing = hit.len();
                explained += hit.len();
                let hit: std::collections::HashSet<usize> = hit.into_iter().collect();
                remainder.retain(|i| !hit.contains(i));
                factors.push(f.clone());
                round.accepted = Some(f);
                break;
            }
            at.outcome = "too few zeros".into();
            round.attempts.push(at);
        }
        let stop = round.accepted.is_none();
        rounds.push(round);
        if stop {
            diagnostics.push(format!("no degree up to {} explained a quarter of the remainder", opts.max_degree));
            break;
        }
    }

    if factors.is_empty() {
        return Ok(ReconstructionOutcome::NoStructureFound { best_fraction: 0.0, rounds, diagnostics });
    }
    let product = factors.iter().skip(1).fold(factors[0].poly.clone(), |acc, f| acc.mul(field, &f.poly));
    let product = product.primitive(field);
    // Measured again from scratch over all of S.
    let vanishing = vanish_count(s, &product);
    let fraction = vanishing as f64 / s.len() as f64;
    let r: usize = factors.iter().map(|f| f.r).sum();
    let count = monomial_count(s.dim(), r, opts.homogeneous);
    let (certified, margin) = certify_degree(field, &product, r, count, ln_n);
    let poly = RPolynomial {
        ln_coefficient_height: product.coefficient_height(field).ln(),
        poly: product,
        r,
        homogeneous: opts.homogeneous,
        siegel: None,
        within_siegel: factors.iter().all(|f| f.within_siegel),
        certified,
        certificate_margin: margin,
    };
    if fraction >= 1.0 - params.eta && !poly.poly.is_zero() {
        Ok(ReconstructionOutcome::Structured { poly, factors, fraction, vanishing, rounds })
    } else {
        diagnostics.push(format!("product vanishes on {vanishing} of {} points", s.len()));
        Ok(ReconstructionOutcome::NoStructureFound { best_fraction: fraction, rounds, diagnostics })
    }
}

/// Single pass at the degree given by the closed-form constants.
fn reconstruct_paper<F: GlobalField>(
    s: &PointSet<F>,
    params: &SieveParams,
    primes: &PrimeSet<F::Elem>,
    opts: &ReconstructOptions,
) -> Result<ReconstructionOutcome<F::Elem>> {
    let h = params.h();
    let level = params.top_level();
    let k = s.field().constants();
    let c2 = prop_constants(&level, k).c2;
    let r = if opts.homogeneous {
        paper_degree(c2, params.d, h)
            .ok_or_else(|| Error::hypothesis("degree", format!("homogeneous path needs h > 1, got h = {h}")))?
    } else {
        // Affine count C(r+d, d) > 18 d_K^2 c2 r^{d-h} once r^h > 18 c2 d!.
        let fact: f64 = (1..=params.d).map(|i| i as f64).product();
        (18.0 * c2 * fact).powf(1.0 / h as f64).ceil()
    };
    if !(r <= opts.paper_degree_cap as f64) {
        return Err(Error::hypothesis(
            "degree",
            format!("degree r = {r:.3e} from c2 = {c2:.3e} exceeds the cap {}", opts.paper_degree_cap),
        ));
    }
    let r = r as usize;
    let dk = s.field().desc().degree() as usize;
    let w = build_characteristic_set(s, primes, r, params)?;
    let count = monomial_count(s.dim(), r, opts.homogeneous);
    if count <= 18 * dk * dk * w.a.len() {
        return Err(Error::hypothesis(
            "siegel-margin",
            format!("{count} monomials against 18 |A| = {}", 18 * w.a.len()),
        ));
    }
    let a: Vec<Vec<F::Elem>> = w.a.iter().map(|&i| s.point(i).to_vec()).collect();
    let f = vanishing_polynomial(s.field(), s.dim(), &a, r, opts.homogeneous, params.n.ln())?;
    let vanishing = vanish_count(s, &f.poly);
    let fraction = vanishing as f64 / s.len() as f64;
    if fraction >= 1.0 - params.eta {
        Ok(ReconstructionOutcome::Structured { poly: f.clone(), factors: vec![f], fraction, vanishing, rounds: vec![] })
    } else {
        Ok(ReconstructionOutcome::NoStructureFound {
            best_fraction: fraction,
            rounds: vec![],
            diagnostics: vec![format!("degree {r} polynomial vanishes on {vanishing} of {} points", s.len())],
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Rationals;
    use crate::heights::HeightValue;
    use num_bigint::BigInt;

    fn pts(v: &[&[i64]]) -> Vec<Vec<BigInt>> {
        v.iter().map(|p| p.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    #[test]
    fn vanishing_examples() {
        let q = Rationals::new();
        let a = pts(&[&[0, 0], &[1, 1], &[2, 4]]);
        let f = vanishing_polynomial(&q, 2, &a, 2, false, 10f64.ln()).unwrap();
        assert!(a.iter().all(|x| f.poly.vanishes_at(&q, x)));
        assert!(f.siegel.is_none());
        // y - x^2 lies in the solution space.
        let rows: Vec<Vec<BigInt>> = a.iter().map(|x| monomials(2, 2, false).iter().map(|m| eval_monomial(&q, x, m)).collect()).collect();
        let y_minus_x2 = [-1i64, 0, 0, 0, 1, 0];
        assert!(rows.iter().all(|r| r.iter().zip(y_minus_x2).map(|(c, e)| c * e).sum::<BigInt>() == BigInt::from(0)));

        let f = vanishing_polynomial(&q, 1, &pts(&[&[5]]), 1, false, 5f64.ln()).unwrap();
        let want = MPoly::from_terms(&q, 1, [(vec![1], BigInt::from(1)), (vec![0], BigInt::from(-5))]);
        assert_eq!(f.poly, want);

        let f = vanishing_polynomial(&q, 2, &[], 1, false, 1.0).unwrap();
        assert_eq!(f.poly.term_count(), 1);
        assert!(f.poly.coefficient_height(&q).is_one());

        let err = vanishing_polynomial(&q, 2, &pts(&[&[0, 0], &[1, 1], &[2, 4]]), 1, false, 1.0).unwrap_err();
        assert!(matches!(err, Error::DegreeTooSmall { monomials: 3, points: 3, required: 3 }));
    }

    #[test]
    fn small_sets_are_small() {
        let q = Rationals::new();
        let s = PointSet::new(q.clone(), 2, pts(&[&[1, 5], &[7, 3], &[100, 2]]), Some(HeightValue::from_int(1_000_000))).unwrap();
        let params = SieveParams::new(2, 1, s.bound().clone());
        let out = reconstruct(&s, &params, &PrimeSet::up_to(&q, params.q_bound()), &ReconstructOptions::default()).unwrap();
        assert_eq!(out.kind(), "Small");
    }

    #[test]
    fn parabola_is_structured() {
        let q = Rationals::new();
        let s = PointSet::new(q.clone(), 2, (-300..=300).map(|x| vec![BigInt::from(x), BigInt::from(x * x)]).collect(), None).unwrap();
        let params = SieveParams::new(2, 1, s.bound().clone());
        let out = reconstruct(&s, &params, &PrimeSet::up_to(&q, params.q_bound()), &ReconstructOptions::default()).unwrap();
        match out {
            ReconstructionOutcome::Structured { poly, fraction, .. } => {
                assert_eq!(fraction, 1.0);
                assert!(poly.poly.degree() <= 2);
            }
            other => panic!("{:?}", other.kind()),
        }
    }
}
