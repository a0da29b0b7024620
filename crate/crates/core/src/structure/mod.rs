//! Sections, genericity, exceptional classes, generic families,
//! characteristic subsets and the weight `Psi_L`.
//!
//! Everything here works on *views*: a list of member indices into one
//! parent [`PointSet`] plus the list of still-active coordinates. Fibres drop
//! the leading active coordinate, so indices stay global all the way down
//! the recursion and witnesses can be checked against the parent set.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::{GlobalField, PrimeOfK, PrimeSet};
use crate::heights::HeightValue;
use crate::sieve::{occupancy, PointSet};

mod characteristic;
pub mod constants;
mod generic;

pub use characteristic::{
    build_characteristic_set, build_characteristic_set_with_budget, BRecord, CharSection, Certification,
    CharacteristicWitness, ClassRecord, Stages,
};
pub use constants::{
    lemma_constants, paper_degree, prop_constants, prop_section_count, Level, LemmaConstants, PropConstants, PropDetail,
};
pub use generic::{build_generic_family, GenericFamily, GenericityWitness, SectionFamily};

/// Which constants drive the thresholds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Printed formulas; density claims that fail at this `N` are errors.
    Paper,
    /// Calibrated thresholds; failed density claims are logged and skipped.
    Pragmatic,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(Mode::Paper),
            "pragmatic" => Ok(Mode::Pragmatic),
            other => Err(Error::Parse(format!("unknown mode {other:?}"))),
        }
    }
}

/// Knobs used only in pragmatic mode.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PragmaticKnobs {
    /// `B_1 = b1_factor * alpha`.
    pub b1_factor: f64,
    /// `gamma = gamma_fraction * theta(Q)` for the final weight cut.
    pub gamma_fraction: f64,
    /// Upper bound on the number of glued sections.
    pub max_sections: usize,
}

impl Default for PragmaticKnobs {
    fn default() -> Self {
        PragmaticKnobs { b1_factor: 2.0, gamma_fraction: 0.5, max_sections: 64 }
    }
}

/// Parameters shared by the structure and reconstruction stages.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SieveParams {
    pub d: usize,
    pub k: usize,
    pub epsilon: f64,
    pub alpha: f64,
    pub eta: f64,
    pub kappa: f64,
    /// Size constant in `|S| >= c N^{d-h-1+eps}`.
    pub c: f64,
    #[serde(rename = "N")]
    pub n: HeightValue,
    pub mode: Mode,
    #[serde(default)]
    pub pragmatic: PragmaticKnobs,
}

impl SieveParams {
    pub fn new(d: usize, k: usize, n: HeightValue) -> Self {
        SieveParams {
            d,
            k,
            epsilon: 0.5,
            alpha: 1.0,
            eta: 0.1,
            kappa: 0.5,
            c: 1.0,
            n,
            mode: Mode::Pragmatic,
            pragmatic: PragmaticKnobs::default(),
        }
    }

    pub fn h(&self) -> usize {
        self.d - self.k
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Parse(m.to_string()));
        if self.d == 0 {
            return bad("d must be positive");
        }
        if self.k >= self.d {
            return bad("need 0 <= k < d");
        }
        if !(self.eta > 0.0 && self.eta < 1.0) {
            return bad("need 0 < eta < 1");
        }
        if !(self.epsilon > 0.0 && self.alpha > 0.0 && self.kappa > 0.0 && self.c > 0.0) {
            return bad("eps, alpha, kappa and c must be positive");
        }
        Ok(())
    }

    /// `Q = floor(N^{eps/(2d)})`, at least 1.
    pub fn q_bound(&self) -> u64 {
        let target = self.n.ln() * self.epsilon / (2.0 * self.d as f64);
        let mut q = target.exp().floor().max(1.0) as u64;
        while ((q + 1) as f64).ln() <= target + 1e-12 {
            q += 1;
        }
        while q > 1 && (q as f64).ln() > target + 1e-12 {
            q -= 1;
        }
        q
    }

    /// `ln(c N^{d-h-1+eps})` at a given level.
    pub fn ln_size_floor(&self, level: &Level) -> f64 {
        level.c.ln() + (level.d as f64 - level.h as f64 - 1.0 + level.epsilon) * self.n.ln()
    }

    pub fn top_level(&self) -> Level {
        Level { d: self.d, h: self.h(), epsilon: self.epsilon, kappa: self.kappa, alpha: self.alpha, c: self.c }
    }
}

/// A subset of a parent set restricted to some active coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct View {
    pub idx: Vec<usize>,
    pub coords: Vec<usize>,
}

impl View {
    pub fn all<F: GlobalField>(s: &PointSet<F>) -> Self {
        View { idx: (0..s.len()).collect(), coords: (0..s.dim()).collect() }
    }

    pub fn with(&self, idx: Vec<usize>) -> Self {
        View { idx, coords: self.coords.clone() }
    }

    pub fn lead(&self) -> usize {
        self.coords[0]
    }

    /// Fibres over the leading active coordinate, in ascending order of `x`.
    pub fn sections<F: GlobalField>(&self, s: &PointSet<F>) -> BTreeMap<F::Elem, Vec<usize>> {
        let mut out: BTreeMap<F::Elem, Vec<usize>> = BTreeMap::new();
        for &i in &self.idx {
            out.entry(s.point(i)[self.lead()].clone()).or_default().push(i);
        }
        out
    }

    /// Fibre view with the leading coordinate dropped.
    pub fn fibre(&self, members: Vec<usize>) -> Self {
        View { idx: members, coords: self.coords[1..].to_vec() }
    }
}

/// Shared state for one run of the recursive constructions.
pub(crate) struct Ctx<'a, F: GlobalField> {
    pub set: &'a PointSet<F>,
    pub params: &'a SieveParams,
    pub q: u64,
    /// `P(Q)`, used by `Psi_L`.
    pub all_primes: PrimeSet<F::Elem>,
}

impl<'a, F: GlobalField> Ctx<'a, F> {
    pub fn new(set: &'a PointSet<F>, params: &'a SieveParams) -> Self {
        let q = params.q_bound();
        Ctx { set, params, q, all_primes: PrimeSet::up_to(set.field(), q) }
    }

    pub fn paper(&self) -> bool {
        self.params.mode == Mode::Paper
    }

    pub fn ln_n(&self) -> f64 {
        self.params.n.ln()
    }

    /// A density claim from the proofs: fatal in paper mode, logged otherwise.
    pub fn claim(&self, ok: bool, stage: &str, detail: String, notes: &mut Vec<String>) -> Result<()> {
        if ok {
            return Ok(());
        }
        if self.paper() {
            Err(Error::hypothesis(stage, detail))
        } else {
            notes.push(format!("{stage}: {detail} (continuing)"));
            Ok(())
        }
    }
}

/// Outcome of the Claim-1 style pruning.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClaimOne {
    /// Original coordinate index chosen as the new first coordinate.
    pub coord: usize,
    /// Subsets of this fraction of the pruned set must project onto `>= Q` values.
    pub fraction: f64,
    pub q: u64,
    /// Pruned set (global indices, ascending).
    pub subset: Vec<usize>,
    /// `(coordinate, smallest possible projection size)` per attempt.
    pub attempts: Vec<(usize, usize)>,
}

/// Smallest `|pi(A)|` over `A` holding at least `need` members: the number of
/// largest fibres needed to reach `need`, with those fibres.
fn top_fibres<E: Ord + Clone>(values: &[(E, usize)], need: usize) -> (usize, Vec<usize>) {
    let mut fib: BTreeMap<&E, Vec<usize>> = BTreeMap::new();
    for (v, i) in values {
        fib.entry(v).or_default().push(*i);
    }
    let mut fibres: Vec<Vec<usize>> = fib.into_values().collect();
    // Stable sort keeps ascending value order among equal sizes.
    fibres.sort_by(|a, b| b.len().cmp(&a.len()));
    let mut acc = 0;
    let mut taken = Vec::new();
    for (j, f) in fibres.iter().enumerate() {
        if acc >= need {
            return (j, taken);
        }
        acc += f.len();
        taken.extend_from_slice(f);
    }
    (fibres.len(), taken)
}

pub(crate) fn claim_one<F: GlobalField>(s: &PointSet<F>, view: &View, q: u64, fraction: f64) -> Result<(ClaimOne, View)> {
    if view.idx.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut current = view.idx.clone();
    let mut attempts = Vec::new();
    for &c in &view.coords {
        let need = ((current.len() as f64) * fraction).ceil().max(1.0) as usize;
        let values: Vec<(F::Elem, usize)> = current.iter().map(|&i| (s.point(i)[c].clone(), i)).collect();
        let (j, mut witness) = top_fibres(&values, need);
        attempts.push((c, j));
        if j as u64 >= q {
            let mut coords = vec![c];
            coords.extend(view.coords.iter().copied().filter(|&x| x != c));
            let claim = ClaimOne { coord: c, fraction, q, subset: current.clone(), attempts };
            return Ok((claim, View { idx: current, coords }));
        }
        witness.sort_unstable();
        current = witness;
    }
    Err(Error::hypothesis(
        "claim-1",
        format!("every coordinate admits a dense subset projecting onto fewer than Q = {q} values; N too small"),
    ))
}

/// Re-check of a Claim-1 transcript on an explicit subset `A` of the pruned set.
pub fn claim_one_holds_for<F: GlobalField>(s: &PointSet<F>, claim: &ClaimOne, a: &[usize]) -> bool {
    if (a.len() as f64) < claim.fraction * claim.subset.len() as f64 {
        return true;
    }
    let distinct: HashSet<&F::Elem> = a.iter().map(|&i| &s.point(i)[claim.coord]).collect();
    distinct.len() as u64 >= claim.q
}

/// `S_x`: points whose first coordinate is `x`.
pub fn section<F: GlobalField>(s: &PointSet<F>, x: &F::Elem) -> PointSet<F> {
    let idx: Vec<usize> = (0..s.len()).filter(|&i| &s.point(i)[0] == x).collect();
    s.subset(&idx)
}

/// Result of testing `|S(a,p)| / |S| < B / N(p)^l` for every class `a`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GenericityCheck {
    pub generic: bool,
    pub worst_class: Vec<u64>,
    pub worst_density: f64,
    pub threshold: f64,
}

pub(crate) fn genericity_of<F: GlobalField>(
    s: &PointSet<F>,
    members: &[usize],
    coords: &[usize],
    p: &PrimeOfK<F::Elem>,
    b: f64,
    l: usize,
) -> Result<GenericityCheck> {
    if members.is_empty() {
        return Err(Error::EmptySet);
    }
    let t = s.residues(p);
    let mut counts: HashMap<u128, usize> = HashMap::new();
    for &i in members {
        *counts.entry(t.key(i, coords)).or_insert(0) += 1;
    }
    let (key, top) = counts
        .iter()
        .map(|(k, c)| (t.unpack(*k, coords.len()), *c))
        .max_by(|a, b| a.1.cmp(&b.1).then_with(|| b.0.cmp(&a.0)))
        .expect("nonempty");
    let threshold = b / (p.norm as f64).powi(l as i32);
    // Exact form of top/|S| < threshold, avoiding a division.
    let generic = (top as f64) < threshold * members.len() as f64;
    Ok(GenericityCheck { generic, worst_class: key, worst_density: top as f64 / members.len() as f64, threshold })
}

pub fn genericity_check<F: GlobalField>(s: &PointSet<F>, p: &PrimeOfK<F::Elem>, b: f64, l: usize) -> Result<GenericityCheck> {
    let members: Vec<usize> = (0..s.len()).collect();
    let coords: Vec<usize> = (0..s.dim()).collect();
    genericity_of(s, &members, &coords, p, b, l)
}

/// First-coordinate residues singled out by the occupancy and size thresholds.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Exceptional {
    /// `|[S(a,p)]_p| >= B_1 N(p)^{d-h-1}`.
    pub e1: Vec<u64>,
    /// `|S(a,p)| >= B_1 |S| / (alpha N(p))`.
    pub e2: Vec<u64>,
}

impl Exceptional {
    pub fn union(&self) -> HashSet<u64> {
        self.e1.iter().chain(&self.e2).copied().collect()
    }
}

pub(crate) fn exceptional_of<F: GlobalField>(
    s: &PointSet<F>,
    view: &View,
    p: &PrimeOfK<F::Elem>,
    b1: f64,
    d: usize,
    h: usize,
    alpha: f64,
) -> Exceptional {
    let t = s.residues(p);
    let mut sizes: BTreeMap<u64, usize> = BTreeMap::new();
    let mut classes: BTreeMap<u64, HashSet<u128>> = BTreeMap::new();
    for &i in &view.idx {
        let a = t.get(i, view.lead());
        *sizes.entry(a).or_insert(0) += 1;
        classes.entry(a).or_default().insert(t.key(i, &view.coords));
    }
    let n = p.norm as f64;
    let occ_cut = b1 * n.powi(d as i32 - h as i32 - 1);
    let size_cut = b1 * view.idx.len() as f64 / (alpha * n);
    Exceptional {
        e1: classes.iter().filter(|(_, c)| c.len() as f64 >= occ_cut).map(|(a, _)| *a).collect(),
        e2: sizes.iter().filter(|(_, &c)| c as f64 >= size_cut).map(|(a, _)| *a).collect(),
    }
}

pub fn exceptional_classes<F: GlobalField>(
    s: &PointSet<F>,
    p: &PrimeOfK<F::Elem>,
    b1: f64,
    h: usize,
    alpha: f64,
) -> Exceptional {
    exceptional_of(s, &View::all(s), p, b1, s.dim(), h, alpha)
}

/// `sum_{p in P} 1[x mod p in E(p)] log N(p) / N(p) >= w(P) / 2`.
pub(crate) fn is_concentrated<F: GlobalField>(
    field: &F,
    x: &F::Elem,
    primes: &PrimeSet<F::Elem>,
    exc: &[HashSet<u64>],
    half_weight: f64,
) -> bool {
    let w: f64 = primes
        .iter()
        .zip(exc)
        .filter(|(p, e)| !e.is_empty() && e.contains(&field.reduce(x, p)))
        .map(|(p, _)| p.log_norm() / p.norm as f64)
        .sum();
    w >= half_weight - 1e-12
}

/// The set `X` of first coordinates lying in exceptional classes for half of
/// the weight of `P`.
#[derive(Clone, Debug)]
pub struct Concentrated<E> {
    pub x: Vec<E>,
    /// True when the whole box `[N]_{O_K}` was scanned, false when only
    /// first coordinates of `S` were (box over budget).
    pub full_box: bool,
}

/// Box size up to which [`concentrated_lines`] scans all of `[N]_{O_K}`.
pub const CONCENTRATED_BOX_BUDGET: u64 = 2_000_000;

pub fn concentrated_lines<F: GlobalField>(
    s: &PointSet<F>,
    primes: &PrimeSet<F::Elem>,
    b1: f64,
    h: usize,
    alpha: f64,
) -> Concentrated<F::Elem> {
    let field = s.field();
    let view = View::all(s);
    let exc: Vec<HashSet<u64>> = primes.iter().map(|p| exceptional_of(s, &view, p, b1, s.dim(), h, alpha).union()).collect();
    let half = primes.weight() / 2.0;
    let count = field.box_count(s.bound());
    let full_box = count <= num_bigint::BigUint::from(CONCENTRATED_BOX_BUDGET);
    let candidates: Vec<F::Elem> = if full_box {
        field.box_elements(s.bound())
    } else {
        view.sections(s).into_keys().collect()
    };
    let x = if exc.iter().all(|e| e.is_empty()) {
        Vec::new()
    } else {
        candidates.into_iter().filter(|x| is_concentrated(field, x, primes, &exc, half)).collect()
    };
    Concentrated { x, full_box }
}

/// `Psi_L(s) = sum_{p in P(Q)} 1[exists x in L, s = x mod p] log N(p)`.
pub fn psi_weight<F: GlobalField>(field: &F, s: &[F::Elem], l: &[Vec<F::Elem>], primes: &PrimeSet<F::Elem>) -> f64 {
    let terms = primes.iter().filter_map(|p| {
        let rs: Vec<u64> = s.iter().map(|c| field.reduce(c, p)).collect();
        let hit = l.iter().any(|x| x.iter().zip(&rs).all(|(c, r)| field.reduce(c, p) == *r));
        hit.then(|| p.log_norm())
    });
    crate::field::primes::kahan_sum(terms)
}

/// Primes of `P` where `S` respects the occupancy hypothesis
/// `|[S]_p| <= alpha N(p)^{d-h}`.
pub fn hypothesis_primes<F: GlobalField>(s: &PointSet<F>, primes: &PrimeSet<F::Elem>, params: &SieveParams) -> PrimeSet<F::Elem> {
    let e = params.k as i32;
    primes.filter(|p| occupancy(s, p) as f64 <= params.alpha * (p.norm as f64).powi(e) + 1e-9)
}

/// Restricts `P` to the occupancy hypothesis and, in paper mode, checks
/// `w(P) >= kappa w(P(Q))`.
pub(crate) fn admissible_primes<F: GlobalField>(
    ctx: &Ctx<'_, F>,
    primes: &PrimeSet<F::Elem>,
    notes: &mut Vec<String>,
) -> Result<PrimeSet<F::Elem>> {
    let kept = hypothesis_primes(ctx.set, primes, ctx.params).filter(|p| p.norm <= ctx.q);
    if kept.len() < primes.len() {
        notes.push(format!(
            "{} of {} primes dropped (norm above Q = {} or occupancy above alpha N(p)^k)",
            primes.len() - kept.len(),
            primes.len(),
            ctx.q
        ));
    }
    let need = ctx.params.kappa * ctx.all_primes.weight();
    ctx.claim(
        kept.weight() + 1e-9 >= need,
        "prime-weight",
        format!("w(P) = {:.4} below kappa w(P(Q)) = {:.4}", kept.weight(), need),
        notes,
    )?;
    Ok(kept)
}

pub(crate) fn labels<F: GlobalField>(field: &F, xs: &[F::Elem]) -> Vec<Value> {
    xs.iter().map(|x| field.format_elem(x)).collect()
}

pub(crate) fn prime_labels<F: GlobalField>(field: &F, ps: &PrimeSet<F::Elem>) -> Value {
    json!(ps.iter().map(|p| field.display_elem(&p.generator)).collect::<Vec<_>>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Rationals;
    use num_bigint::BigInt;

    fn set(points: &[&[i64]]) -> PointSet<Rationals> {
        let pts = points.iter().map(|p| p.iter().map(|&v| BigInt::from(v)).collect()).collect();
        PointSet::new(Rationals::new(), points[0].len(), pts, None).unwrap()
    }

    fn prime(p: i64) -> PrimeOfK<BigInt> {
        Rationals::new().prime_from_generator(&BigInt::from(p)).unwrap()
    }

    #[test]
    fn sections() {
        let s = set(&[&[1, 2], &[1, 3], &[2, 2]]);
        assert_eq!(section(&s, &BigInt::from(1)).len(), 2);
        assert!(section(&s, &BigInt::from(7)).is_empty());
        let t = set(&[&[4, 1], &[4, 9]]);
        assert_eq!(section(&t, &BigInt::from(4)).len(), 2);
    }

    #[test]
    fn genericity_examples() {
        let s = set(&[&[0], &[1], &[2], &[3], &[4]]);
        assert!(genericity_check(&s, &prime(5), 2.0, 0).unwrap().generic);
        let one = set(&[&[3]]);
        assert!(!genericity_check(&one, &prime(5), 2.0, 1).unwrap().generic);
        let ten = set(&(0..10).map(|v| vec![v]).collect::<Vec<_>>().iter().map(|v| v.as_slice()).collect::<Vec<_>>());
        let g = genericity_check(&ten, &prime(2), 1.5, 1).unwrap();
        assert!(g.generic);
        assert_eq!(g.worst_density, 0.5);
        assert_eq!(g.worst_class, vec![0]);
    }

    #[test]
    fn psi_examples() {
        let q = Rationals::new();
        let ps = PrimeSet::up_to(&q, 10);
        let z = |v: i64| BigInt::from(v);
        let w = psi_weight(&q, &[z(0), z(0)], &[vec![z(6), z(6)]], &ps);
        assert!((w - 6f64.ln()).abs() < 1e-12);
        assert_eq!(psi_weight(&q, &[z(0), z(0)], &[], &ps), 0.0);
        let all = psi_weight(&q, &[z(3), z(5)], &[vec![z(3), z(5)]], &ps);
        assert!((all - 210f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn q_floor() {
        let mut p = SieveParams::new(2, 1, HeightValue::from_int(160000));
        p.epsilon = 1.0;
        assert_eq!(p.q_bound(), 20);
        p.n = HeightValue::from_int(10000);
        p.d = 1;
        assert_eq!(p.q_bound(), 100);
    }

    #[test]
    fn claim_one_prunes_to_a_spread_coordinate() {
        // First coordinate takes two values; the second is spread out.
        let pts: Vec<Vec<i64>> = (0..40).map(|i| vec![i % 2, i]).collect();
        let refs: Vec<&[i64]> = pts.iter().map(|p| p.as_slice()).collect();
        let s = set(&refs);
        let (c, view) = claim_one(&s, &View::all(&s), 5, 0.5).unwrap();
        assert_eq!(c.coord, 1);
        assert_eq!(view.coords, vec![1, 0]);
        assert_eq!(c.attempts[0], (0, 1));
        assert_eq!(c.subset.len(), 20);
        assert!(claim_one_holds_for(&s, &c, &c.subset));
    }
}
