//! Families of `(B, d-h)`-generic subsets, one per surviving prime.

use std::collections::{BTreeMap, HashSet};

use rayon::prelude::*;
use serde_json::{json, Value};

use super::constants::{lemma_b1, lemma_constants, lemma_cprime, Level};
use super::{admissible_primes, claim_one, exceptional_of, genericity_of, is_concentrated, labels, prime_labels};
use super::{ClaimOne, Ctx, Exceptional, GenericityCheck, SieveParams, View};
use crate::error::{Error, Result};
use crate::field::{GlobalField, PrimeOfK, PrimeSet};
use crate::sieve::PointSet;

/// `G_p(S)` together with the parameters of its defining inequality.
#[derive(Clone, Debug)]
pub struct GenericityWitness<E> {
    pub prime: PrimeOfK<E>,
    pub b: f64,
    pub l: usize,
    /// Active coordinates the residue classes are taken over.
    pub coords: Vec<usize>,
    /// Global indices into the parent set, ascending.
    pub members: Vec<usize>,
    pub check: GenericityCheck,
}

impl<E: Clone + Ord> GenericityWitness<E> {
    /// Re-runs the defining inequality from scratch.
    pub fn verify<F: GlobalField<Elem = E>>(&self, s: &PointSet<F>) -> bool {
        genericity_of(s, &self.members, &self.coords, &self.prime, self.b, self.l)
            .map(|c| c.generic)
            .unwrap_or(false)
    }

    fn to_json<F: GlobalField<Elem = E>>(&self, field: &F) -> Value {
        json!({
            "prime": field.display_elem(&self.prime.generator),
            "norm": self.prime.norm,
            "B": self.b,
            "l": self.l,
            "size": self.members.len(),
            "worst_class": self.check.worst_class,
            "worst_density": self.check.worst_density,
            "threshold": self.check.threshold,
            "generic": self.check.generic,
            "members": self.members,
        })
    }
}

/// One retained section `S'_x` and the family built on it.
#[derive(Clone, Debug)]
pub struct SectionFamily<E> {
    pub x: E,
    pub members: Vec<usize>,
    /// `P_x`: primes where `x` avoids the exceptional classes.
    pub primes: PrimeSet<E>,
    pub family: GenericFamily<E>,
}

#[derive(Clone, Debug)]
pub struct GenericFamily<E> {
    pub level: Level,
    /// Active coordinates after pruning; the first one is sectioned.
    pub coords: Vec<usize>,
    pub input: Vec<usize>,
    pub input_primes: PrimeSet<E>,
    pub claim: Option<ClaimOne>,
    pub b1: Option<f64>,
    pub exceptional: Vec<Exceptional>,
    pub concentrated: Vec<E>,
    pub sections: Vec<SectionFamily<E>>,
    /// `P'`, aligned with `witnesses`.
    pub primes: PrimeSet<E>,
    pub witnesses: Vec<GenericityWitness<E>>,
    pub b: f64,
    pub kappa1: f64,
    pub c1: f64,
    pub beta: Option<f64>,
    pub notes: Vec<String>,
}

impl<E: Clone + Ord + Send + Sync> GenericFamily<E> {
    pub fn witness(&self, p: &PrimeOfK<E>) -> Option<&GenericityWitness<E>> {
        self.witnesses.iter().find(|w| w.prime == *p)
    }

    pub fn is_base(&self) -> bool {
        self.level.d <= self.level.h
    }

    /// Every witness here and in every nested section passes its inequality.
    pub fn verify_witnesses<F: GlobalField<Elem = E>>(&self, s: &PointSet<F>) -> bool {
        self.witnesses.iter().all(|w| w.verify(s)) && self.sections.iter().all(|sec| sec.family.verify_witnesses(s))
    }

    /// `G_p(S) ∩ pi_1^{-1}(x) = G_p(S'_x)` for every prime and section, at every depth.
    pub fn gluing_holds<F: GlobalField<Elem = E>>(&self, s: &PointSet<F>) -> bool {
        let Some(&lead) = self.coords.first() else { return true };
        for w in &self.witnesses {
            for sec in &self.sections {
                let lhs: Vec<usize> = w.members.iter().copied().filter(|&i| s.point(i)[lead] == sec.x).collect();
                let rhs: Vec<usize> = sec.family.witness(&w.prime).map(|g| g.members.clone()).unwrap_or_default();
                if lhs != rhs {
                    return false;
                }
            }
        }
        self.sections.iter().all(|sec| sec.family.gluing_holds(s))
    }

    /// Notes from this level and all nested levels, with depth prefixes.
    pub fn all_notes(&self) -> Vec<String> {
        let mut out: Vec<String> = self.notes.iter().map(|n| format!("d={}: {n}", self.level.d)).collect();
        for sec in &self.sections {
            out.extend(sec.family.all_notes());
        }
        out
    }

    /// All claim-1 transcripts in the recursion.
    pub fn claims(&self) -> Vec<&ClaimOne> {
        let mut out: Vec<&ClaimOne> = self.claim.iter().collect();
        for sec in &self.sections {
            out.extend(sec.family.claims());
        }
        out
    }

    pub fn to_json<F: GlobalField<Elem = E>>(&self, field: &F) -> Value {
        json!({
            "level": self.level,
            "coords": self.coords,
            "size": self.input.len(),
            "primes_in": prime_labels(field, &self.input_primes),
            "claim_one": self.claim,
            "B1": self.b1,
            "exceptional": self.input_primes.iter().zip(&self.exceptional).map(|(p, e)| json!({
                "prime": field.display_elem(&p.generator), "E1": e.e1, "E2": e.e2,
            })).collect::<Vec<_>>(),
            "concentrated": labels(field, &self.concentrated),
            "B": self.b,
            "kappa1": self.kappa1,
            "c1": self.c1,
            "beta": self.beta,
            "primes": prime_labels(field, &self.primes),
            "witnesses": self.witnesses.iter().map(|w| w.to_json(field)).collect::<Vec<_>>(),
            "sections": self.sections.iter().map(|sec| json!({
                "x": field.format_elem(&sec.x),
                "size": sec.members.len(),
                "primes": prime_labels(field, &sec.primes),
                "family": sec.family.to_json(field),
            })).collect::<Vec<_>>(),
            "notes": self.notes,
        })
    }
}

fn base_family<F: GlobalField>(
    ctx: &Ctx<'_, F>,
    view: &View,
    primes: &PrimeSet<F::Elem>,
    level: &Level,
) -> Result<GenericFamily<F::Elem>> {
    let l = level.d.saturating_sub(level.h);
    let mut members = view.idx.clone();
    members.sort_unstable();
    let witnesses = primes
        .iter()
        .map(|p| {
            let check = genericity_of(ctx.set, &members, &view.coords, p, 2.0, l)?;
            Ok(GenericityWitness { prime: p.clone(), b: 2.0, l, coords: view.coords.clone(), members: members.clone(), check })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GenericFamily {
        level: level.clone(),
        coords: view.coords.clone(),
        input: members,
        input_primes: primes.clone(),
        claim: None,
        b1: None,
        exceptional: Vec::new(),
        concentrated: Vec::new(),
        sections: Vec::new(),
        primes: primes.clone(),
        witnesses,
        b: 2.0,
        kappa1: 1.0,
        c1: 1.0,
        beta: None,
        notes: Vec::new(),
    })
}

/// Primes of `P` at which `x` avoids the exceptional classes.
pub(crate) fn avoiding_primes<F: GlobalField>(
    field: &F,
    x: &F::Elem,
    primes: &PrimeSet<F::Elem>,
    exc: &[HashSet<u64>],
) -> PrimeSet<F::Elem> {
    PrimeSet::new(
        primes
            .iter()
            .zip(exc)
            .filter(|(p, e)| !e.contains(&field.reduce(x, p)))
            .map(|(p, _)| p.clone())
            .collect(),
    )
}

/// Claim-1 pruning; in pragmatic mode a failed search keeps the view unpruned.
pub(crate) fn prune<F: GlobalField>(
    ctx: &Ctx<'_, F>,
    view: &View,
    fraction: f64,
    notes: &mut Vec<String>,
) -> Result<(Option<ClaimOne>, View)> {
    match claim_one(ctx.set, view, ctx.q, fraction) {
        Ok((c, v)) => Ok((Some(c), v)),
        Err(Error::HypothesisFailed { detail, .. }) if !ctx.paper() => {
            notes.push(format!("claim-1: {detail}; continuing unpruned"));
            Ok((None, view.clone()))
        }
        Err(e) => Err(e),
    }
}

/// Glues section witnesses into `P'` and `G_p`; returns `(P', G_p per prime, beta)`.
pub(crate) fn glue<E: Clone + Ord + Send + Sync>(
    primes: &PrimeSet<E>,
    sections: &[SectionFamily<E>],
    beta: f64,
) -> (Vec<PrimeOfK<E>>, Vec<Vec<usize>>) {
    let retained: usize = sections.iter().map(|s| s.members.len()).sum();
    let mut kept = Vec::new();
    let mut gps = Vec::new();
    for p in primes.iter() {
        let mut count = 0usize;
        let mut g = Vec::new();
        for sec in sections {
            if let Some(w) = sec.family.witness(p) {
                count += sec.members.len();
                g.extend_from_slice(&w.members);
            }
        }
        if count > 0 && count as f64 >= beta * retained as f64 - 1e-9 {
            g.sort_unstable();
            kept.push(p.clone());
            gps.push(g);
        }
    }
    (kept, gps)
}

pub(crate) fn generic_on_view<F: GlobalField>(
    ctx: &Ctx<'_, F>,
    view: &View,
    primes: &PrimeSet<F::Elem>,
    level: &Level,
) -> Result<GenericFamily<F::Elem>> {
    if view.idx.is_empty() {
        return Err(Error::EmptySet);
    }
    if level.d <= level.h {
        return base_family(ctx, view, primes, level);
    }
    let k = ctx.set.field().constants();
    let field = ctx.set.field();
    let mut notes = Vec::new();
    let ln_n = ctx.ln_n();

    let size_floor = ctx.params.ln_size_floor(level);
    ctx.claim(
        !ctx.paper() || (view.idx.len() as f64).ln() >= size_floor - 1e-9,
        "generic-size",
        format!("|S| = {} below c N^(d-h-1+eps) = {:.3e}", view.idx.len(), size_floor.exp()),
        &mut notes,
    )?;

    let (claim, pv) = prune(ctx, view, 0.5, &mut notes)?;

    let b1 = if ctx.paper() { lemma_b1(level, k) } else { ctx.params.pragmatic.b1_factor * level.alpha };
    let exceptional: Vec<Exceptional> = primes
        .iter()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|p| exceptional_of(ctx.set, &pv, p, b1, level.d, level.h, level.alpha))
        .collect();
    let exc_sets: Vec<HashSet<u64>> = exceptional.iter().map(Exceptional::union).collect();
    let half = primes.weight() / 2.0;

    let all_sections = pv.sections(ctx.set);
    let concentrated: Vec<F::Elem> = all_sections
        .keys()
        .filter(|x| is_concentrated(field, x, primes, &exc_sets, half))
        .cloned()
        .collect();
    let conc: HashSet<&F::Elem> = concentrated.iter().collect();
    let rest: BTreeMap<F::Elem, Vec<usize>> =
        all_sections.iter().filter(|(x, _)| !conc.contains(x)).map(|(x, m)| (x.clone(), m.clone())).collect();
    let rest_size: usize = rest.values().map(Vec::len).sum();
    ctx.claim(
        2 * rest_size >= pv.idx.len(),
        "generic-concentrated",
        format!("only {rest_size} of {} points lie off concentrated lines", pv.idx.len()),
        &mut notes,
    )?;

    let cprime = lemma_cprime(level, k);
    let sub = level.descend(b1, cprime / 2f64.powi(level.d as i32));
    let floor_ln = if ctx.paper() {
        cprime.ln() + (level.d as f64 - level.h as f64 - 2.0 + level.nu() * level.epsilon) * ln_n
    } else {
        0.0
    };
    let kept: Vec<(F::Elem, Vec<usize>)> =
        rest.into_iter().filter(|(_, m)| (m.len() as f64).ln() >= floor_ln - 1e-9).collect();
    let kept_size: usize = kept.iter().map(|(_, m)| m.len()).sum();
    ctx.claim(
        2 * kept_size >= rest_size,
        "generic-section-floor",
        format!("sections above the floor {:.3e} hold {kept_size} of {rest_size} points", floor_ln.exp()),
        &mut notes,
    )?;

    let results: Vec<(F::Elem, Vec<usize>, PrimeSet<F::Elem>, Result<GenericFamily<F::Elem>>)> = kept
        .into_par_iter()
        .map(|(x, members)| {
            let px = avoiding_primes(field, &x, primes, &exc_sets);
            let fam = if px.is_empty() {
                Err(Error::hypothesis("generic-section", "no prime left after removing exceptional classes"))
            } else {
                generic_on_view(ctx, &pv.fibre(members.clone()), &px, &sub)
            };
            (x, members, px, fam)
        })
        .collect();
    let mut sections = Vec::with_capacity(results.len());
    for (x, members, px, fam) in results {
        match fam {
            Ok(family) => sections.push(SectionFamily { x, members, primes: px, family }),
            Err(e) if !ctx.paper() => notes.push(format!("section {} dropped: {e}", field.display_elem(&x))),
            Err(e) => return Err(e),
        }
    }

    let kappa1_sub = if ctx.paper() {
        lemma_constants(&sub, k).kappa1
    } else {
        sections.iter().map(|s| s.family.kappa1).fold(1.0, f64::min)
    };
    let beta = kappa1_sub / 4.0;
    let (p_kept, gps) = glue(primes, &sections, beta);

    let l = level.d - level.h;
    let (b, mut kappa1, mut c1) = if ctx.paper() {
        let lc = lemma_constants(level, k);
        (lc.b, lc.kappa1, lc.c1)
    } else {
        let b_sub = sections.iter().map(|s| s.family.b).fold(2.0, f64::max);
        let rho = gps.iter().map(|g| g.len() as f64 / pv.idx.len() as f64).fold(1.0, f64::min);
        (b_sub * b1 / (rho * level.alpha), 0.0, 0.0)
    };

    let mut witnesses = Vec::with_capacity(p_kept.len());
    for (p, g) in p_kept.into_iter().zip(gps) {
        let check = genericity_of(ctx.set, &g, &pv.coords, &p, b, l)?;
        if !check.generic {
            let detail = format!(
                "G_p at {} has a class of density {:.4} above B/N(p)^l = {:.4}",
                field.display_elem(&p.generator),
                check.worst_density,
                check.threshold
            );
            if ctx.paper() {
                return Err(Error::hypothesis("generic-witness", detail));
            }
            notes.push(format!("{detail}; prime dropped"));
            continue;
        }
        witnesses.push(GenericityWitness { prime: p, b, l, coords: pv.coords.clone(), members: g, check });
    }
    let p_prime = PrimeSet::new(witnesses.iter().map(|w| w.prime.clone()).collect());
    let w_in = primes.weight();
    let min_g = witnesses.iter().map(|w| w.members.len()).min().unwrap_or(0) as f64 / view.idx.len() as f64;
    if ctx.paper() {
        ctx.claim(
            p_prime.weight() + 1e-12 >= kappa1 * w_in,
            "generic-kappa1",
            format!("w(P') = {:.4} below kappa1 w(P) = {:.4e}", p_prime.weight(), kappa1 * w_in),
            &mut notes,
        )?;
        ctx.claim(
            witnesses.is_empty() || min_g >= c1,
            "generic-c1",
            format!("smallest |G_p|/|S| = {min_g:.4} below c1 = {c1:.4e}"),
            &mut notes,
        )?;
    } else {
        kappa1 = if w_in > 0.0 { p_prime.weight() / w_in } else { 1.0 };
        c1 = min_g;
    }

    Ok(GenericFamily {
        level: level.clone(),
        coords: pv.coords.clone(),
        input: {
            let mut v = view.idx.clone();
            v.sort_unstable();
            v
        },
        input_primes: primes.clone(),
        claim,
        b1: Some(b1),
        exceptional,
        concentrated,
        sections,
        primes: p_prime,
        witnesses,
        b,
        kappa1,
        c1,
        beta: Some(beta),
        notes,
    })
}

/// Builds `P'` and the generic subsets `G_p(S)` for every `p in P'`.
///
/// Primes violating the occupancy hypothesis or above `Q` are removed first.
pub fn build_generic_family<F: GlobalField>(
    s: &PointSet<F>,
    primes: &PrimeSet<F::Elem>,
    params: &SieveParams,
) -> Result<GenericFamily<F::Elem>> {
    params.validate()?;
    if s.is_empty() {
        return Err(Error::EmptySet);
    }
    if s.dim() != params.d {
        return Err(Error::Parse(format!("set has dimension {}, parameters say d = {}", s.dim(), params.d)));
    }
    let ctx = Ctx::new(s, params);
    let mut notes = Vec::new();
    let used = admissible_primes(&ctx, primes, &mut notes)?;
    let mut fam = generic_on_view(&ctx, &View::all(s), &used, &params.top_level())?;
    notes.append(&mut fam.notes);
    fam.notes = notes;
    Ok(fam)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Rationals;
    use crate::heights::HeightValue;
    use num_bigint::BigInt;

    fn parabola(n: i64) -> PointSet<Rationals> {
        let pts = (-n..=n)
            .filter(|x| x * x <= n)
            .map(|x| vec![BigInt::from(x), BigInt::from(x * x)])
            .collect();
        PointSet::new(Rationals::new(), 2, pts, Some(HeightValue::from_int(n))).unwrap()
    }

    #[test]
    fn base_case_returns_whole_set() {
        let q = Rationals::new();
        let pts = (-100..=100).map(|x| vec![BigInt::from(x)]).collect();
        let s = PointSet::new(q.clone(), 1, pts, None).unwrap();
        let mut params = SieveParams::new(1, 0, HeightValue::from_int(100));
        params.k = 0;
        params.alpha = 1.0;
        let ctx = Ctx::new(&s, &params);
        let primes = PrimeSet::up_to(&q, 10);
        let level = Level { d: 1, h: 1, epsilon: 0.5, kappa: 0.5, alpha: 1.0, c: 1.0 };
        let fam = generic_on_view(&ctx, &View::all(&s), &primes, &level).unwrap();
        assert_eq!(fam.primes, primes);
        assert_eq!(fam.b, 2.0);
        assert!(fam.witnesses.iter().all(|w| w.members.len() == s.len() && w.l == 0));
        assert!(fam.verify_witnesses(&s));
    }

    #[test]
    fn parabola_family_passes_its_checks() {
        let s = parabola(400);
        let params = SieveParams::new(2, 1, HeightValue::from_int(400));
        let primes = PrimeSet::up_to(s.field(), 20);
        let fam = build_generic_family(&s, &primes, &params).unwrap();
        assert!(!fam.witnesses.is_empty());
        assert!(fam.verify_witnesses(&s));
        assert!(fam.gluing_holds(&s));
        assert!(fam.witnesses.iter().all(|w| w.l == 1));
    }
}
