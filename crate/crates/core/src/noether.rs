//! Effective Noether normalization for varieties cut out step by step by
//! hypersurfaces: pick a small point off the current hypersurface, project
//! from it with a small-height basis of its orthogonal complement, repeat.

use rand::Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::GlobalField;
use crate::heights::{canonical_projective, height_projective, HeightValue};
use crate::linalg::rank;
use crate::poly::MPoly;

/// Constant in front of `D^steps` in the shipped height bound.
pub const HEIGHT_CONSTANT: f64 = 2.0;

/// `Z(f)` for a nonzero homogeneous `f` in `m + 1` variables.
#[derive(Clone, Debug)]
pub struct Hypersurface<E> {
    pub f: MPoly<E>,
    pub degree: usize,
}

impl<E: Clone + Ord> Hypersurface<E> {
    pub fn new(f: MPoly<E>) -> Result<Self> {
        if f.is_zero() {
            return Err(Error::ChainInvalid("polynomial vanishes identically".into()));
        }
        if !f.is_homogeneous() {
            return Err(Error::ChainInvalid("polynomial is not homogeneous".into()));
        }
        let degree = f.degree();
        Ok(Hypersurface { f, degree })
    }

    /// Projective dimension of the ambient space.
    pub fn ambient(&self) -> usize {
        self.f.nvars - 1
    }
}

/// Box used for the off-point scan: `[D]` over `Q`, enlarged over `F_q(T)`
/// until it has more than `D` elements.
fn scan_box<F: GlobalField>(field: &F, d: usize) -> Vec<F::Elem> {
    let mut bound = HeightValue::from_int(d.max(1) as i64);
    loop {
        let elems = field.scan_order(&bound);
        if elems.len() > d {
            return elems;
        }
        bound = bound.mul(&HeightValue::from_int(field.characteristic().max(2) as i64));
    }
}

/// Lexicographically first point of the scan box with `f(x) != 0`.
pub fn point_off_hypersurface<F: GlobalField>(field: &F, h: &Hypersurface<F::Elem>) -> Result<Vec<F::Elem>> {
    let elems = scan_box(field, h.degree);
    let n = h.f.nvars;
    let mut idx = vec![0usize; n];
    loop {
        let x: Vec<F::Elem> = idx.iter().map(|&i| elems[i].clone()).collect();
        if x.iter().any(|c| !field.is_zero(c)) && !h.f.vanishes_at(field, &x) {
            return Ok(x);
        }
        // odometer, last coordinate fastest
        let mut k = n;
        loop {
            if k == 0 {
                return Err(Error::hypothesis("off-point", "scan box exhausted"));
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < elems.len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

#[derive(Clone, Debug)]
pub struct ComplementBasis<E> {
    /// `m` rows of length `m + 1`, each vanishing at the point.
    pub forms: Vec<Vec<E>>,
    pub heights: Vec<HeightValue>,
    pub point_height: HeightValue,
}

impl<E> ComplementBasis<E> {
    /// `ln prod H(L_i) - ln H(x)`.
    pub fn log_ratio(&self) -> f64 {
        self.heights.iter().map(|h| h.ln()).sum::<f64>() - self.point_height.ln()
    }
}

/// Small-height basis of `<x>^perp`, checked to cut out exactly `x`.
pub fn complement_small_basis<F: GlobalField>(field: &F, x: &[F::Elem]) -> Result<ComplementBasis<F::Elem>> {
    if x.iter().all(|c| field.is_zero(c)) {
        return Err(Error::ZeroPoint);
    }
    let m = x.len() - 1;
    let point_height = height_projective(field, x)?;
    if m == 0 {
        return Ok(ComplementBasis { forms: vec![], heights: vec![], point_height });
    }
    let forms = field.small_kernel_basis(&[x.to_vec()])?;
    if forms.len() != m || rank(field, &forms) != m {
        return Err(Error::hypothesis("complement", format!("kernel of rank {} instead of {m}", forms.len())));
    }
    for row in &forms {
        let v = row.iter().zip(x).fold(field.zero(), |acc, (a, b)| field.add(&acc, &field.mul(a, b)));
        if !field.is_zero(&v) {
            return Err(Error::hypothesis("complement", "form does not vanish at the point"));
        }
    }
    let heights = forms.iter().map(|r| height_projective(field, r)).collect::<Result<Vec<_>>>()?;
    Ok(ComplementBasis { forms, heights, point_height })
}

fn apply<F: GlobalField>(field: &F, rows: &[Vec<F::Elem>], v: &[F::Elem]) -> Vec<F::Elem> {
    rows.iter()
        .map(|r| r.iter().zip(v).fold(field.zero(), |acc, (a, b)| field.add(&acc, &field.mul(a, b))))
        .collect()
}

fn compose<F: GlobalField>(field: &F, outer: &[Vec<F::Elem>], inner: &[Vec<F::Elem>]) -> Vec<Vec<F::Elem>> {
    let cols = inner.first().map(|r| r.len()).unwrap_or(0);
    outer
        .iter()
        .map(|row| {
            (0..cols)
                .map(|j| row.iter().zip(inner).fold(field.zero(), |acc, (a, r)| field.add(&acc, &field.mul(a, &r[j]))))
                .collect()
        })
        .collect()
}

// Dense univariate polynomials in t, lowest degree first.

fn trim<F: GlobalField>(field: &F, mut a: Vec<F::Elem>) -> Vec<F::Elem> {
    while a.last().is_some_and(|c| field.is_zero(c)) {
        a.pop();
    }
    a
}

fn upoly_mul<F: GlobalField>(field: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![field.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = field.add(&out[i + j], &field.mul(x, y));
        }
    }
    trim(field, out)
}

fn primitive_part<F: GlobalField>(field: &F, a: Vec<F::Elem>) -> Vec<F::Elem> {
    let a = trim(field, a);
    if a.is_empty() {
        return a;
    }
    let g = field.gcd_all(&a);
    if field.is_unit(&g) {
        return a;
    }
    a.iter().map(|c| field.div_exact(c, &g)).collect()
}

/// `a` reduced modulo `b` up to constant factors.
fn pseudo_rem<F: GlobalField>(field: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
    let mut a = a.to_vec();
    let lb = b.last().expect("nonzero divisor").clone();
    while !a.is_empty() && a.len() >= b.len() {
        let la = a.last().unwrap().clone();
        let shift = a.len() - b.len();
        let mut next: Vec<F::Elem> = a.iter().map(|c| field.mul(c, &lb)).collect();
        for (i, c) in b.iter().enumerate() {
            next[i + shift] = field.sub(&next[i + shift], &field.mul(&la, c));
        }
        next.pop();
        a = primitive_part(field, next);
    }
    a
}

fn upoly_gcd<F: GlobalField>(field: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
    let (mut a, mut b) = (primitive_part(field, a.to_vec()), primitive_part(field, b.to_vec()));
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_empty() {
        let r = pseudo_rem(field, &a, &b);
        a = b;
        b = r;
    }
    a
}

fn derivative<F: GlobalField>(field: &F, a: &[F::Elem]) -> Vec<F::Elem> {
    let d = a.iter().enumerate().skip(1).map(|(i, c)| field.mul(c, &field.from_i64(i as i64))).collect();
    trim(field, d)
}

/// `g(t) = f(v + t x)`.
fn restrict_to_line<F: GlobalField>(field: &F, f: &MPoly<F::Elem>, v: &[F::Elem], x: &[F::Elem]) -> Vec<F::Elem> {
    let lines: Vec<Vec<F::Elem>> = v.iter().zip(x).map(|(a, b)| trim(field, vec![a.clone(), b.clone()])).collect();
    let mut out: Vec<F::Elem> = vec![];
    for (m, c) in &f.terms {
        let mut term = vec![c.clone()];
        for (line, &e) in lines.iter().zip(m) {
            for _ in 0..e {
                term = upoly_mul(field, &term, line);
            }
        }
        let len = out.len().max(term.len());
        out.resize(len, field.zero());
        for (i, t) in term.into_iter().enumerate() {
            out[i] = field.add(&out[i], &t);
        }
    }
    trim(field, out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FiberMethod {
    /// Distinct roots over the algebraic closure via `gcd(g, g')`.
    Exact,
    /// Roots counted over a bounded box of `K`; small characteristic only.
    Box,
}

/// Number of points of `Z(f)` on the line through `v` and the off-point `x`
/// other than `x` itself.
fn line_fiber<F: GlobalField>(field: &F, f: &MPoly<F::Elem>, v: &[F::Elem], x: &[F::Elem]) -> (usize, FiberMethod) {
    let g = restrict_to_line(field, f, v, x);
    if g.len() <= 1 {
        return (0, FiberMethod::Exact);
    }
    let deg = g.len() - 1;
    let p = field.characteristic();
    if p == 0 || p as usize > deg {
        let dg = derivative(field, &g);
        let common = upoly_gcd(field, &g, &dg);
        return (deg - (common.len() - 1), FiberMethod::Exact);
    }
    let bound = HeightValue::power(field.characteristic(), deg as i64);
    let hits = field
        .box_elements(&bound)
        .iter()
        .filter(|t| {
            let val = g.iter().rev().fold(field.zero(), |acc, c| field.add(&field.mul(&acc, t), c));
            field.is_zero(&val)
        })
        .count();
    (hits, FiberMethod::Box)
}

/// One projection from an off-point.
#[derive(Clone, Debug)]
pub struct NoetherStep<E> {
    pub hypersurface: Hypersurface<E>,
    pub off_point: Vec<E>,
    pub complement: ComplementBasis<E>,
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct FiberAudit {
    pub samples: usize,
    /// Per sample, the product over steps of the line fiber counts.
    pub fibers: Vec<usize>,
    pub max_fiber: usize,
    /// `prod D_i`; equals `D` for a single step.
    pub bound: usize,
    pub method: FiberMethod,
    pub within: bool,
}

#[derive(Clone, Debug)]
pub struct NoetherMap<E> {
    pub ambient: usize,
    pub dim: usize,
    /// `dim + 1` rows of length `ambient + 1`.
    pub forms: Vec<Vec<E>>,
    pub heights: Vec<HeightValue>,
    pub degree: usize,
    pub steps: Vec<NoetherStep<E>>,
    /// `HEIGHT_CONSTANT * D^steps`.
    pub height_bound: f64,
    /// `max H(L_i) / D^steps`.
    pub observed_constant: f64,
    pub within_bound: bool,
    pub independent: bool,
    pub audit: FiberAudit,
}

impl<E: Clone + Ord> NoetherMap<E> {
    pub fn apply<F: GlobalField<Elem = E>>(&self, field: &F, v: &[E]) -> Vec<E> {
        apply(field, &self.forms, v)
    }

    pub fn to_json<F: GlobalField<Elem = E>>(&self, field: &F) -> Value {
        let mat = |rows: &[Vec<E>]| -> Value {
            rows.iter().map(|r| r.iter().map(|c| Value::String(field.display_elem(c))).collect::<Vec<_>>()).collect()
        };
        json!({
            "ambient": self.ambient,
            "dim": self.dim,
            "degree": self.degree,
            "forms": mat(&self.forms),
            "heights": self.heights.iter().map(|h| h.to_string()).collect::<Vec<_>>(),
            "height_bound": self.height_bound,
            "observed_constant": self.observed_constant,
            "within_bound": self.within_bound,
            "independent": self.independent,
            "steps": self.steps.iter().map(|s| json!({
                "polynomial": s.hypersurface.f.display(field),
                "off_point": s.off_point.iter().map(|c| field.display_elem(c)).collect::<Vec<_>>(),
                "forms": mat(&s.complement.forms),
            })).collect::<Vec<_>>(),
            "audit": self.audit,
        })
    }
}

/// Projects `V` in `P^m` down to `P^{target_dim}` along `chain`, where
/// `chain[i]` is a hypersurface of the `i`-th image containing the image of `V`.
///
/// `samples` are points of `V`; each is checked against the chain and used
/// for the fiber audit.
pub fn noether_normalize<F: GlobalField>(
    field: &F,
    chain: &[MPoly<F::Elem>],
    m: usize,
    target_dim: usize,
    samples: &[Vec<F::Elem>],
) -> Result<NoetherMap<F::Elem>> {
    if target_dim > m || chain.len() != m - target_dim {
        return Err(Error::ChainInvalid(format!(
            "{} polynomials cannot take P^{m} to P^{target_dim}",
            chain.len()
        )));
    }
    for (i, s) in samples.iter().enumerate() {
        if s.len() != m + 1 || s.iter().all(|c| field.is_zero(c)) {
            return Err(Error::ChainInvalid(format!("sample {i} is not a point of P^{m}")));
        }
    }

    let mut steps = Vec::with_capacity(chain.len());
    let mut total: Vec<Vec<F::Elem>> = (0..=m)
        .map(|i| (0..=m).map(|j| if i == j { field.one() } else { field.zero() }).collect())
        .collect();
    let mut images: Vec<Vec<F::Elem>> = samples.to_vec();
    let mut degree = 1usize;
    for (i, f) in chain.iter().enumerate() {
        let cur = m - i;
        if f.nvars != cur + 1 {
            return Err(Error::ChainInvalid(format!("step {i}: polynomial has {} variables, expected {}", f.nvars, cur + 1)));
        }
        let h = Hypersurface::new(f.clone()).map_err(|e| match e {
            Error::ChainInvalid(msg) => Error::ChainInvalid(format!("step {i}: {msg}")),
            other => other,
        })?;
        if let Some(j) = images.iter().position(|v| !h.f.vanishes_at(field, v)) {
            return Err(Error::ChainInvalid(format!("step {i}: polynomial does not vanish at sample {j}")));
        }
        degree = degree.max(h.degree);
        let off_point = point_off_hypersurface(field, &h)?;
        let complement = complement_small_basis(field, &off_point)?;
        images = images.iter().map(|v| apply(field, &complement.forms, v)).collect();
        if let Some(j) = images.iter().position(|v| v.iter().all(|c| field.is_zero(c))) {
            return Err(Error::hypothesis("noether", format!("forms vanish simultaneously at sample {j}")));
        }
        total = compose(field, &complement.forms, &total);
        steps.push(NoetherStep { hypersurface: h, off_point, complement });
    }

    let forms = total.iter().map(|r| canonical_projective(field, r)).collect::<Result<Vec<_>>>()?;
    let heights = forms.iter().map(|r| height_projective(field, r)).collect::<Result<Vec<_>>>()?;
    let independent = rank(field, &forms) == target_dim + 1;
    let scale = (degree as f64).powi(steps.len() as i32);
    let height_bound = HEIGHT_CONSTANT * scale;
    let max_height = heights.iter().map(|h| h.to_f64()).fold(1.0, f64::max);
    let audit = fiber_audit(field, &steps, samples);

    Ok(NoetherMap {
        ambient: m,
        dim: target_dim,
        within_bound: heights.iter().all(|h| h.to_f64() <= height_bound),
        forms,
        heights,
        degree,
        steps,
        height_bound,
        observed_constant: max_height / scale,
        independent,
        audit,
    })
}

fn fiber_audit<F: GlobalField>(field: &F, steps: &[NoetherStep<F::Elem>], samples: &[Vec<F::Elem>]) -> FiberAudit {
    let per: Vec<(usize, bool)> = samples
        .par_iter()
        .map(|v| {
            let mut v = v.clone();
            let mut count = 1usize;
            let mut exact = true;
            for s in steps {
                let (c, method) = line_fiber(field, &s.hypersurface.f, &v, &s.off_point);
                count *= c;
                exact &= method == FiberMethod::Exact;
                v = apply(field, &s.complement.forms, &v);
            }
            (count, exact)
        })
        .collect();
    let bound = steps.iter().map(|s| s.hypersurface.degree).product::<usize>();
    let fibers: Vec<usize> = per.iter().map(|p| p.0).collect();
    let max_fiber = fibers.iter().copied().max().unwrap_or(0);
    FiberAudit {
        samples: samples.len(),
        max_fiber,
        bound,
        method: if per.iter().all(|p| p.1) { FiberMethod::Exact } else { FiberMethod::Box },
        within: max_fiber <= bound.max(1),
        fibers,
    }
}

/// The two plane conics used for audits, with rational parametrisations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Conic {
    /// `X0^2 + X1^2 - X2^2`.
    Pythagorean,
    /// `X0 X2 - X1^2`.
    RationalNormal,
}

impl std::str::FromStr for Conic {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pythagorean" => Ok(Conic::Pythagorean),
            "rational-normal" => Ok(Conic::RationalNormal),
            other => Err(Error::Parse(format!("unknown conic '{other}'"))),
        }
    }
}

impl Conic {
    pub fn polynomial<F: GlobalField>(&self, field: &F) -> MPoly<F::Elem> {
        let t = |e: [u32; 3], c: i64| (e.to_vec(), field.from_i64(c));
        match self {
            Conic::Pythagorean => MPoly::from_terms(field, 3, [t([2, 0, 0], 1), t([0, 2, 0], 1), t([0, 0, 2], -1)]),
            Conic::RationalNormal => MPoly::from_terms(field, 3, [t([1, 0, 1], 1), t([0, 2, 0], -1)]),
        }
    }

    /// Image of `(a : b)` under the parametrisation.
    pub fn point<F: GlobalField>(&self, field: &F, a: &F::Elem, b: &F::Elem) -> Vec<F::Elem> {
        let (aa, bb, ab) = (field.mul(a, a), field.mul(b, b), field.mul(a, b));
        match self {
            Conic::Pythagorean => vec![field.sub(&bb, &aa), field.add(&ab, &ab), field.add(&aa, &bb)],
            Conic::RationalNormal => vec![aa, ab, bb],
        }
    }

    /// As [`Conic::samples`] with a ChaCha stream seeded by `seed`.
    pub fn seeded_samples<F: GlobalField>(&self, field: &F, n: usize, bound: &HeightValue, seed: u64) -> Vec<Vec<F::Elem>> {
        use rand::SeedableRng;
        self.samples(field, n, bound, &mut rand_chacha::ChaCha8Rng::seed_from_u64(seed))
    }

    /// `n` nonzero points from parameters drawn in `[bound]`.
    pub fn samples<F: GlobalField, R: Rng + ?Sized>(&self, field: &F, n: usize, bound: &HeightValue, rng: &mut R) -> Vec<Vec<F::Elem>> {
        let mut out = Vec::with_capacity(n);
        while out.len() < n {
            let a = field.random_in_box(rng, bound);
            let b = field.random_in_box(rng, bound);
            let p = self.point(field, &a, &b);
            if p.iter().any(|c| !field.is_zero(c)) {
                out.push(p);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{FunctionField, Rationals};
    use num_bigint::BigInt;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn z(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn off_points() {
        let q = Rationals::new();
        let h = Hypersurface::new(Conic::Pythagorean.polynomial(&q)).unwrap();
        assert_eq!(point_off_hypersurface(&q, &h).unwrap(), z(&[0, 0, 1]));
        let h = Hypersurface::new(Conic::RationalNormal.polynomial(&q)).unwrap();
        assert_eq!(point_off_hypersurface(&q, &h).unwrap(), z(&[0, 1, 0]));
        let xy = MPoly::from_terms(&q, 2, [(vec![1, 1], BigInt::from(1))]);
        let p = point_off_hypersurface(&q, &Hypersurface::new(xy).unwrap()).unwrap();
        assert!(p.iter().all(|c| c != &BigInt::from(0)));
    }

    #[test]
    fn off_point_over_f3() {
        let k = FunctionField::new(3).unwrap();
        let f = MPoly::from_terms(&k, 2, [(vec![2, 0], k.one()), (vec![0, 2], k.one())]);
        let p = point_off_hypersurface(&k, &Hypersurface::new(f.clone()).unwrap()).unwrap();
        assert!(!f.vanishes_at(&k, &p));
    }

    #[test]
    fn complements() {
        let q = Rationals::new();
        let c = complement_small_basis(&q, &z(&[2, 3])).unwrap();
        assert_eq!(c.forms.len(), 1);
        let f = canonical_projective(&q, &c.forms[0]).unwrap();
        assert_eq!(f, z(&[3, -2]));
        assert_eq!(c.heights[0], HeightValue::from_int(3));
        let c = complement_small_basis(&q, &z(&[1, 1])).unwrap();
        assert_eq!(canonical_projective(&q, &c.forms[0]).unwrap(), z(&[1, -1]));
        let c = complement_small_basis(&q, &z(&[1, 0, 0])).unwrap();
        assert!(c.heights.iter().all(|h| h.is_one()));
        assert!(matches!(complement_small_basis(&q, &z(&[0, 0])), Err(Error::ZeroPoint)));
    }

    #[test]
    fn root_counts() {
        let q = Rationals::new();
        // (t - 1)^2 (t + 2)
        let g = z(&[2, -3, 0, 1]);
        let common = upoly_gcd(&q, &g, &derivative(&q, &g));
        assert_eq!(common.len() - 1, 1);
    }

    #[test]
    fn conics_project_with_small_fibers() {
        let q = Rationals::new();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for conic in [Conic::Pythagorean, Conic::RationalNormal] {
            let f = conic.polynomial(&q);
            let samples = conic.samples(&q, 50, &HeightValue::from_int(30), &mut rng);
            let map = noether_normalize(&q, &[f], 2, 1, &samples).unwrap();
            assert!(map.independent && map.within_bound);
            assert_eq!(map.forms.len(), 2);
            assert!(map.audit.within && map.audit.max_fiber <= 2, "{:?}", map.audit);
            assert_eq!(map.audit.method, FiberMethod::Exact);
        }
    }

    #[test]
    fn empty_chain_is_identity() {
        let q = Rationals::new();
        let map = noether_normalize(&q, &[], 2, 2, &[z(&[1, 2, 3])]).unwrap();
        assert_eq!(map.forms, vec![z(&[1, 0, 0]), z(&[0, 1, 0]), z(&[0, 0, 1])]);
        assert!(map.independent && map.within_bound);
        assert_eq!(map.audit.fibers, vec![1]);
    }

    #[test]
    fn bad_chains() {
        let q = Rationals::new();
        let f = Conic::Pythagorean.polynomial(&q);
        assert!(matches!(noether_normalize(&q, std::slice::from_ref(&f), 2, 1, &[z(&[1, 1, 1])]), Err(Error::ChainInvalid(_))));
        assert!(matches!(noether_normalize(&q, &[MPoly::zero(3)], 2, 1, &[]), Err(Error::ChainInvalid(_))));
        assert!(matches!(noether_normalize(&q, &[f], 2, 0, &[]), Err(Error::ChainInvalid(_))));
    }
}
