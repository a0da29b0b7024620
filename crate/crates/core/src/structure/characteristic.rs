//! `(r, delta)`-characteristic subsets: a small `A` and a witness `L ⊇ A`
//! such that degree-`r` polynomials of bounded height vanishing on `A`
//! vanish on `L`.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use super::constants::{lemma_constants, prop_b1, prop_constants, prop_cprime, prop_section_count, Level, PropConstants};
use super::generic::{avoiding_primes, generic_on_view, glue, prune, SectionFamily};
use super::{admissible_primes, exceptional_of, is_concentrated, labels, prime_labels};
use super::{ClaimOne, Ctx, SieveParams, View};
use crate::error::{Error, Result};
use crate::field::primes::kahan_sum;
use crate::field::{GlobalField, PrimeOfK, PrimeSet};
use crate::poly::MPoly;
use crate::sieve::PointSet;

/// Per-prime record of the class-sequence construction.
#[derive(Clone, Debug)]
pub struct BRecord<E> {
    pub prime: PrimeOfK<E>,
    /// Length of the class sequence `b_1, ..., b_q`.
    pub q_seq: usize,
    /// Prime left out because `N(p)^{d-h-1} <= 2B`.
    pub skipped: bool,
    /// First-coordinate residues `a` with `|G_p(a)| >= |G_p| / (2 N(p))`.
    pub r_classes: Vec<u64>,
    pub classes: Vec<ClassRecord<E>>,
    /// Sections of `S'` making up `B[p]`.
    pub sections: Vec<E>,
}

#[derive(Clone, Debug)]
pub struct ClassRecord<E> {
    pub a: u64,
    pub size: usize,
    /// The chosen residue tuples `b_j`, in order.
    pub b: Vec<Vec<u64>>,
    /// Sections of `G_p` forming `B[a]`.
    pub sections: Vec<E>,
}

/// One section of `S_4` with its recursive witness and generic family.
#[derive(Clone, Debug)]
pub struct CharSection<E> {
    pub x: E,
    pub members: Vec<usize>,
    pub primes: PrimeSet<E>,
    pub witness: CharacteristicWitness<E>,
}

/// Sizes and sets formed along the construction above the base case.
#[derive(Clone, Debug)]
pub struct Stages<E> {
    pub claim: Option<ClaimOne>,
    pub s1: usize,
    pub s2: usize,
    pub s3: usize,
    pub b1: f64,
    pub e1: Vec<Vec<u64>>,
    pub concentrated: Vec<E>,
    pub s4: usize,
    pub sections: Vec<CharSection<E>>,
    /// `|S'|`.
    pub s_prime: usize,
    pub families: Vec<SectionFamily<E>>,
    pub primes: PrimeSet<E>,
    pub g_sizes: Vec<usize>,
    pub beta: f64,
    pub b_generic: f64,
    pub c1_generic: f64,
    pub records: Vec<BRecord<E>>,
    pub kappa3: f64,
    /// Sections of `S'` inside the set `B`.
    pub rich: Vec<E>,
    pub rich_fallback: bool,
    pub m: usize,
    pub chosen: Vec<E>,
    pub theta: f64,
    pub gamma: f64,
    pub paper: Option<PropConstants>,
}

#[derive(Clone, Debug)]
pub struct CharacteristicWitness<E> {
    pub r: usize,
    pub level: Level,
    pub coords: Vec<usize>,
    pub input: Vec<usize>,
    /// Global indices, ascending.
    pub a: Vec<usize>,
    pub l: Vec<usize>,
    /// `|L| / |S|`.
    pub delta: f64,
    pub c2: f64,
    pub stages: Option<Box<Stages<E>>>,
    pub notes: Vec<String>,
}

/// Outcome of checking one polynomial against a witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Certification {
    pub vanishes_on_a: bool,
    pub vanishing_on_l: usize,
    pub l_size: usize,
    /// `f` vanishes on `A` and on all of `L`.
    pub certified: bool,
}

impl<E: Clone + Ord + Send + Sync> CharacteristicWitness<E> {
    /// Checks the defining property for one polynomial. This is not a
    /// universal certificate over all polynomials of degree `r`.
    pub fn certify<F: GlobalField<Elem = E>>(&self, s: &PointSet<F>, f: &MPoly<E>) -> Certification {
        let field = s.field();
        let vanishes_on_a = self.a.iter().all(|&i| f.vanishes_at(field, s.point(i)));
        let vanishing_on_l = self.l.iter().filter(|&&i| f.vanishes_at(field, s.point(i))).count();
        Certification {
            vanishes_on_a,
            vanishing_on_l,
            l_size: self.l.len(),
            certified: vanishes_on_a && vanishing_on_l == self.l.len(),
        }
    }

    pub fn all_notes(&self) -> Vec<String> {
        let mut out: Vec<String> = self.notes.iter().map(|n| format!("d={}: {n}", self.level.d)).collect();
        if let Some(st) = &self.stages {
            for sec in &st.sections {
                out.extend(sec.witness.all_notes());
            }
            for fam in &st.families {
                out.extend(fam.family.all_notes());
            }
        }
        out
    }

    pub fn to_json<F: GlobalField<Elem = E>>(&self, field: &F) -> Value {
        let stages = self.stages.as_ref().map(|st| {
            json!({
                "claim_one": st.claim,
                "S1": st.s1,
                "S2": st.s2,
                "S3": st.s3,
                "B1": st.b1,
                "E1": st.e1,
                "concentrated": labels(field, &st.concentrated),
                "S4": st.s4,
                "S_prime": st.s_prime,
                "sections": st.sections.iter().map(|sec| json!({
                    "x": field.format_elem(&sec.x),
                    "size": sec.members.len(),
                    "primes": prime_labels(field, &sec.primes),
                    "witness": sec.witness.to_json(field),
                })).collect::<Vec<_>>(),
                "generic": st.families.iter().map(|f| json!({
                    "x": field.format_elem(&f.x),
                    "family": f.family.to_json(field),
                })).collect::<Vec<_>>(),
                "primes": prime_labels(field, &st.primes),
                "G_sizes": st.g_sizes,
                "beta": st.beta,
                "B": st.b_generic,
                "c1": st.c1_generic,
                "records": st.records.iter().map(|rec| json!({
                    "prime": field.display_elem(&rec.prime.generator),
                    "q": rec.q_seq,
                    "skipped": rec.skipped,
                    "R": rec.r_classes,
                    "classes": rec.classes.iter().map(|c| json!({
                        "a": c.a, "size": c.size, "b": c.b, "B_a": labels(field, &c.sections),
                    })).collect::<Vec<_>>(),
                    "B_p": labels(field, &rec.sections),
                })).collect::<Vec<_>>(),
                "kappa3": st.kappa3,
                "rich": labels(field, &st.rich),
                "rich_fallback": st.rich_fallback,
                "m": st.m,
                "chosen": labels(field, &st.chosen),
                "theta": st.theta,
                "gamma": st.gamma,
                "paper_constants": st.paper,
            })
        });
        json!({
            "r": self.r,
            "level": self.level,
            "coords": self.coords,
            "size": self.input.len(),
            "A": self.a,
            "L": self.l,
            "delta": self.delta,
            "c2": self.c2,
            "universal": false,
            "stages": stages,
            "notes": self.notes,
        })
    }
}

fn sorted(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v.dedup();
    v
}

/// `m` evenly spaced positions out of `n`.
fn spaced(n: usize, m: usize) -> Vec<usize> {
    (0..m).map(|i| i * n / m).collect()
}

/// Class sequences, `B[a]`, `R` and `B[p]` for one prime.
#[allow(clippy::too_many_arguments)]
fn b_record<F: GlobalField>(
    ctx: &Ctx<'_, F>,
    coords: &[usize],
    p: &PrimeOfK<F::Elem>,
    g: &[usize],
    level: &Level,
    b1: f64,
    b: f64,
) -> BRecord<F::Elem> {
    let set = ctx.set;
    let t = set.residues(p);
    let lead = coords[0];
    let e = (level.d - level.h - 1) as i32;
    let scale = (p.norm as f64).powi(e);
    let skipped = ctx.paper() && scale <= 2.0 * b;
    let q_seq = ((scale / (2.0 * b)).ceil() as usize).max(1);
    let mut by_a: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
    for &i in g {
        by_a.entry(t.get(i, lead)).or_default().push(i);
    }
    if skipped {
        return BRecord { prime: p.clone(), q_seq, skipped, r_classes: Vec::new(), classes: Vec::new(), sections: Vec::new() };
    }
    let thr = q_seq as f64 / (4.0 * b1 * b);
    let mut classes = Vec::with_capacity(by_a.len());
    for (&a, members) in &by_a {
        let mut by_class: HashMap<u128, Vec<usize>> = HashMap::new();
        for &i in members {
            by_class.entry(t.key(i, coords)).or_default().push(i);
        }
        let mut hits: BTreeMap<F::Elem, usize> = BTreeMap::new();
        let mut chosen = Vec::new();
        for _ in 0..q_seq {
            let Some((&key, _)) = by_class.iter().max_by(|x, y| {
                x.1.len().cmp(&y.1.len()).then_with(|| t.unpack(*y.0, coords.len()).cmp(&t.unpack(*x.0, coords.len())))
            }) else {
                break;
            };
            let class = by_class.remove(&key).expect("present");
            let xs: BTreeSet<&F::Elem> = class.iter().map(|&i| &set.point(i)[lead]).collect();
            for x in xs {
                *hits.entry(x.clone()).or_insert(0) += 1;
            }
            chosen.push(t.unpack(key, coords.len()));
        }
        let sections = hits.into_iter().filter(|(_, c)| *c as f64 >= thr - 1e-12).map(|(x, _)| x).collect();
        classes.push(ClassRecord { a, size: members.len(), b: chosen, sections });
    }
    let total = g.len() as f64;
    let r_classes: Vec<u64> =
        classes.iter().filter(|c| 2.0 * p.norm as f64 * c.size as f64 >= total).map(|c| c.a).collect();
    let rset: HashSet<u64> = r_classes.iter().copied().collect();
    let sections: BTreeSet<F::Elem> =
        classes.iter().filter(|c| rset.contains(&c.a)).flat_map(|c| c.sections.iter().cloned()).collect();
    BRecord { prime: p.clone(), q_seq, skipped, r_classes, classes, sections: sections.into_iter().collect() }
}

pub(crate) fn characteristic_on_view<F: GlobalField>(
    ctx: &Ctx<'_, F>,
    view: &View,
    primes: &PrimeSet<F::Elem>,
    level: &Level,
    r: usize,
    budget: Option<usize>,
) -> Result<CharacteristicWitness<F::Elem>> {
    if view.idx.is_empty() {
        return Err(Error::EmptySet);
    }
    let k = ctx.set.field().constants();
    let field = ctx.set.field();
    let input = sorted(view.idx.clone());
    let rf = r as f64;
    if level.d <= level.h {
        let c2 = if ctx.paper() { prop_constants(level, k).c2 } else { input.len() as f64 };
        return Ok(CharacteristicWitness {
            r,
            level: level.clone(),
            coords: view.coords.clone(),
            a: input.clone(),
            l: input.clone(),
            input,
            delta: 1.0,
            c2,
            stages: None,
            notes: Vec::new(),
        });
    }
    let mut notes = Vec::new();
    let ln_n = ctx.ln_n();
    let size_floor = ctx.params.ln_size_floor(level);
    ctx.claim(
        !ctx.paper() || (input.len() as f64).ln() >= size_floor - 1e-9,
        "characteristic-size",
        format!("|S| = {} below c N^(d-h-1+eps) = {:.3e}", input.len(), size_floor.exp()),
        &mut notes,
    )?;

    // S1: Claim-1 pruning with the 1/8 fraction.
    let (claim, v1) = prune(ctx, view, 0.125, &mut notes)?;
    let s1 = v1.idx.len();

    // S2: drop sections larger than |S1| / Q.
    let secs = v1.sections(ctx.set);
    let s2_secs: Vec<(F::Elem, Vec<usize>)> =
        secs.into_iter().filter(|(_, m)| (m.len() as u64).saturating_mul(ctx.q) <= s1 as u64).collect();
    let s2: usize = s2_secs.iter().map(|(_, m)| m.len()).sum();
    ctx.claim(4 * s2 >= 3 * s1, "characteristic-S2", format!("|S2| = {s2} below 3|S1|/4 with |S1| = {s1}"), &mut notes)?;

    // S3: section size floor.
    let cprime = prop_cprime(level, k);
    let floor_ln = if ctx.paper() {
        cprime.ln() + (level.d as f64 - level.h as f64 - 2.0 + level.nu() * level.epsilon) * ln_n
    } else {
        0.0
    };
    let s3_secs: Vec<(F::Elem, Vec<usize>)> =
        s2_secs.into_iter().filter(|(_, m)| (m.len() as f64).ln() >= floor_ln - 1e-9).collect();
    let s3: usize = s3_secs.iter().map(|(_, m)| m.len()).sum();
    ctx.claim(2 * s3 >= s2, "characteristic-S3", format!("|S3| = {s3} below |S2|/2 = {}", s2 / 2), &mut notes)?;

    // E1 and the concentrated lines.
    let b1 = if ctx.paper() { prop_b1(level, k) } else { ctx.params.pragmatic.b1_factor * level.alpha };
    let v3 = v1.with(s3_secs.iter().flat_map(|(_, m)| m.iter().copied()).collect());
    let e1: Vec<Vec<u64>> = primes
        .iter()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|p| exceptional_of(ctx.set, &v3, p, b1, level.d, level.h, level.alpha).e1)
        .collect();
    let e1_sets: Vec<HashSet<u64>> = e1.iter().map(|e| e.iter().copied().collect()).collect();
    let half = primes.weight() / 2.0;
    let concentrated: Vec<F::Elem> = s3_secs
        .iter()
        .map(|(x, _)| x)
        .filter(|x| is_concentrated(field, x, primes, &e1_sets, half))
        .cloned()
        .collect();
    let conc: HashSet<&F::Elem> = concentrated.iter().collect();
    let s4_secs: Vec<(F::Elem, Vec<usize>)> = s3_secs.iter().filter(|(x, _)| !conc.contains(x)).cloned().collect();
    let s4: usize = s4_secs.iter().map(|(_, m)| m.len()).sum();
    ctx.claim(4 * s4 >= s1, "characteristic-S4", format!("|S4| = {s4} below |S1|/4 with |S1| = {s1}"), &mut notes)?;

    // Recursive witnesses on each section.
    let sub = level.descend(b1, cprime);
    let results: Vec<_> = s4_secs
        .into_par_iter()
        .map(|(x, members)| {
            let px = avoiding_primes(field, &x, primes, &e1_sets);
            let w = if px.is_empty() {
                Err(Error::hypothesis("characteristic-section", "no prime left after removing E1"))
            } else {
                characteristic_on_view(ctx, &v1.fibre(members.clone()), &px, &sub, r, budget)
            };
            (x, members, px, w)
        })
        .collect();
    let mut sections = Vec::with_capacity(results.len());
    for (x, members, px, w) in results {
        match w {
            Ok(witness) => sections.push(CharSection { x, members, primes: px, witness }),
            Err(e) if !ctx.paper() => notes.push(format!("section {} dropped: {e}", field.display_elem(&x))),
            Err(e) => return Err(e),
        }
    }
    if sections.is_empty() {
        return Err(Error::hypothesis("characteristic-sections", "no section of S4 admits a witness"));
    }
    let s_prime: usize = sections.iter().map(|s| s.witness.l.len()).sum();

    // Generic families on each S'_x.
    let delta0 = if ctx.paper() {
        prop_constants(&sub, k).delta
    } else {
        sections.iter().map(|s| s.witness.delta).fold(1.0, f64::min)
    };
    let glevel = level.descend(b1, delta0 * cprime);
    let fams: Vec<_> = sections
        .par_iter()
        .map(|sec| {
            let v = v1.fibre(sec.witness.l.clone());
            (sec.x.clone(), generic_on_view(ctx, &v, &sec.primes, &glevel))
        })
        .collect();
    let mut families = Vec::with_capacity(fams.len());
    for ((x, fam), sec) in fams.into_iter().zip(&sections) {
        match fam {
            Ok(family) => families.push(SectionFamily { x, members: sec.witness.l.clone(), primes: sec.primes.clone(), family }),
            Err(e) if !ctx.paper() => notes.push(format!("generic family on {} dropped: {e}", field.display_elem(&x))),
            Err(e) => return Err(e),
        }
    }
    let (beta, b_generic, c1_generic) = if ctx.paper() {
        let gc = lemma_constants(&glevel, k);
        (gc.kappa1 / 4.0, gc.b, gc.c1)
    } else {
        (
            families.iter().map(|f| f.family.kappa1).fold(1.0, f64::min) / 4.0,
            families.iter().map(|f| f.family.b).fold(2.0, f64::max),
            families.iter().map(|f| f.family.c1).fold(1.0, f64::min),
        )
    };
    let (p_kept, gps) = glue(primes, &families, beta);
    let p_prime = PrimeSet::new(p_kept.clone());
    ctx.claim(
        !p_prime.is_empty(),
        "characteristic-primes",
        "no prime carries generic subsets on enough sections".to_string(),
        &mut notes,
    )?;

    // Class sequences and the rich sections B.
    let records: Vec<BRecord<F::Elem>> = p_kept
        .par_iter()
        .zip(gps.par_iter())
        .map(|(p, g)| b_record(ctx, &v1.coords, p, g, level, b1, b_generic))
        .collect();
    let skipped = records.iter().filter(|r| r.skipped).count();
    if skipped > 0 {
        notes.push(format!("{skipped} primes skipped with N(p)^(d-h-1) <= 2B"));
    }
    let kappa3 = beta * c1_generic / (16.0 * b1 * b_generic);
    let w_prime = p_prime.weight();
    let mut rich_w: BTreeMap<&F::Elem, Vec<f64>> = BTreeMap::new();
    for rec in &records {
        for x in &rec.sections {
            rich_w.entry(x).or_default().push(rec.prime.log_norm() / rec.prime.norm as f64);
        }
    }
    let mut rich: Vec<F::Elem> = sections
        .iter()
        .map(|s| &s.x)
        .filter(|x| rich_w.get(x).map(|w| kahan_sum(w.iter().copied())).unwrap_or(0.0) >= kappa3 * w_prime - 1e-12)
        .filter(|_| w_prime > 0.0)
        .cloned()
        .collect();
    let mut rich_fallback = false;
    if rich.is_empty() {
        if ctx.paper() {
            return Err(Error::hypothesis("characteristic-B", "no section reaches w(P''_x) >= kappa3 w(P')"));
        }
        notes.push("no rich section; using every section of S'".into());
        rich = sections.iter().map(|s| s.x.clone()).collect();
        rich_fallback = true;
    }

    // Choice of the m glued sections.
    let by_x: HashMap<&F::Elem, &CharSection<F::Elem>> = sections.iter().map(|s| (&s.x, s)).collect();
    let union_a = |xs: &[&F::Elem]| -> usize {
        xs.iter().map(|x| by_x[x].witness.a.len()).sum::<usize>()
    };
    let paper_consts = if ctx.paper() { Some(prop_constants(level, k)) } else { None };
    let n = rich.len();
    let m = if let Some(pc) = &paper_consts {
        let delta1 = pc.detail.as_ref().map(|d| d.delta1).unwrap_or(1.0);
        let m = prop_section_count(delta1, r);
        if m > n as f64 {
            return Err(Error::hypothesis(
                "characteristic-m",
                format!("need m = {m:.3e} rich sections, only {n} exist; N too small"),
            ));
        }
        m as usize
    } else {
        let top = n.min(ctx.params.pragmatic.max_sections).max(1);
        let fits = |m: usize| {
            let xs: Vec<&F::Elem> = spaced(n, m).into_iter().map(|i| &rich[i]).collect();
            budget.is_none_or(|b| union_a(&xs) <= b)
        };
        match (1..=top).rev().find(|&m| fits(m)) {
            Some(m) => m,
            None => {
                return Err(Error::BudgetExceeded(format!(
                    "a single section needs more than {} points of A",
                    budget.unwrap_or(0)
                )))
            }
        }
    };
    let chosen: Vec<F::Elem> = spaced(n, m).into_iter().map(|i| rich[i].clone()).collect();
    let a = sorted(chosen.iter().flat_map(|x| by_x[x].witness.a.iter().copied()).collect());
    let glued = sorted(chosen.iter().flat_map(|x| by_x[x].witness.l.iter().copied()).collect());

    // Psi over P(Q) and the final witness L.
    let coords = &v1.coords;
    let keysets: Vec<(f64, HashSet<u128>)> = ctx
        .all_primes
        .iter()
        .map(|p| {
            let t = ctx.set.residues(p);
            (p.log_norm(), glued.iter().map(|&i| t.key(i, coords)).collect())
        })
        .collect();
    let tables: Vec<_> = ctx.all_primes.iter().map(|p| ctx.set.residues(p)).collect();
    let theta = kahan_sum(keysets.iter().map(|(w, _)| *w));
    let gamma = if ctx.paper() { 3.0 * rf * ln_n } else { ctx.params.pragmatic.gamma_fraction * theta };
    let s_prime_members: Vec<usize> = sections.iter().flat_map(|s| s.witness.l.iter().copied()).collect();
    let glued_set: HashSet<usize> = glued.iter().copied().collect();
    let heavy: Vec<usize> = s_prime_members
        .par_iter()
        .copied()
        .filter(|&i| {
            glued_set.contains(&i) || {
                let psi = kahan_sum(
                    keysets.iter().zip(&tables).filter(|((_, ks), t)| ks.contains(&t.key(i, coords))).map(|((w, _), _)| *w),
                );
                psi >= gamma - 1e-9
            }
        })
        .collect();
    let l = sorted(heavy);
    let delta = l.len() as f64 / input.len() as f64;
    let h_exp = (level.d - level.h) as i32;
    let c2 = match &paper_consts {
        Some(pc) => pc.c2,
        None => a.len() as f64 / rf.powi(h_exp),
    };
    if let Some(pc) = &paper_consts {
        ctx.claim(
            delta + 1e-12 >= pc.delta,
            "characteristic-delta",
            format!("|L|/|S| = {delta:.4} below delta = {:.3e}", pc.delta),
            &mut notes,
        )?;
    }

    Ok(CharacteristicWitness {
        r,
        level: level.clone(),
        coords: v1.coords.clone(),
        input,
        a,
        l,
        delta,
        c2,
        stages: Some(Box::new(Stages {
            claim,
            s1,
            s2,
            s3,
            b1,
            e1,
            concentrated,
            s4,
            sections,
            s_prime,
            families,
            primes: p_prime,
            g_sizes: gps.iter().map(Vec::len).collect(),
            beta,
            b_generic,
            c1_generic,
            records,
            kappa3,
            rich,
            rich_fallback,
            m,
            chosen,
            theta,
            gamma,
            paper: paper_consts,
        })),
        notes,
    })
}

fn run<F: GlobalField>(
    s: &PointSet<F>,
    primes: &PrimeSet<F::Elem>,
    r: usize,
    params: &SieveParams,
    budget: Option<usize>,
) -> Result<CharacteristicWitness<F::Elem>> {
    params.validate()?;
    if s.is_empty() {
        return Err(Error::EmptySet);
    }
    if r == 0 {
        return Err(Error::Parse("degree r must be positive".into()));
    }
    if s.dim() != params.d {
        return Err(Error::Parse(format!("set has dimension {}, parameters say d = {}", s.dim(), params.d)));
    }
    let ctx = Ctx::new(s, params);
    let mut notes = Vec::new();
    let used = admissible_primes(&ctx, primes, &mut notes)?;
    let mut w = characteristic_on_view(&ctx, &View::all(s), &used, &params.top_level(), r, budget)?;
    notes.append(&mut w.notes);
    w.notes = notes;
    Ok(w)
}

/// Characteristic subset for degree `r`; in pragmatic mode up to
/// `max_sections` sections are glued.
pub fn build_characteristic_set<F: GlobalField>(
    s: &PointSet<F>,
    primes: &PrimeSet<F::Elem>,
    r: usize,
    params: &SieveParams,
) -> Result<CharacteristicWitness<F::Elem>> {
    run(s, primes, r, params, None)
}

/// As [`build_characteristic_set`], gluing as many sections as keep `|A| <= budget`.
pub fn build_characteristic_set_with_budget<F: GlobalField>(
    s: &PointSet<F>,
    primes: &PrimeSet<F::Elem>,
    r: usize,
    params: &SieveParams,
    budget: usize,
) -> Result<CharacteristicWitness<F::Elem>> {
    run(s, primes, r, params, Some(budget))
}
