//! Dataset generators and the experiment runner behind `invsieve experiment`.
//!
//! A run writes `report.json` (deterministic for a fixed spec and seed),
//! `events.jsonl`, `timings.json` and CSV tables under `tables/`.

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_traits::ToPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::field::{FunctionField, GlobalField, GlobalFieldDesc, PrimeSet, Rationals};
use crate::heights::HeightValue;
use crate::poly::MPoly;
use crate::reconstruct::{reconstruct, vanish_count, ReconstructOptions, ReconstructionOutcome};
use crate::sieve::{larger_sieve_audit, occupancy, PointSet};
use crate::structure::{
    build_characteristic_set, build_characteristic_set_with_budget, build_generic_family, Mode, PragmaticKnobs,
    SieveParams,
};

/// Largest number of box elements a generator may enumerate or sample from.
pub const GENERATOR_BUDGET: u64 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum GeneratorSpec {
    /// Graph `{(x, g_1(x), ..., g_e(x))}` with every coordinate in `[N]`.
    PolynomialImage {
        /// One-variable polynomials as `{"exponent": coefficient}` maps.
        coordinates: Vec<Value>,
        /// Integer range for `x` over `Q`; otherwise `x` runs over `[N]`.
        #[serde(default)]
        domain: Option<(i64, i64)>,
        /// Box bound; the largest coordinate height when absent.
        #[serde(rename = "N", default)]
        n: Option<HeightValue>,
    },
    RandomUniform {
        dim: usize,
        size: usize,
        #[serde(rename = "N")]
        n: HeightValue,
    },
    Union {
        parts: Vec<GeneratorSpec>,
    },
    File {
        path: PathBuf,
    },
}

fn budget_check(count: &num_bigint::BigUint, what: &str) -> Result<u64> {
    match count.to_u64() {
        Some(c) if c <= GENERATOR_BUDGET => Ok(c),
        _ => Err(Error::BudgetExceeded(format!("{what} has {count} elements, over {GENERATOR_BUDGET}"))),
    }
}

fn raw_points<F: GlobalField>(
    field: &F,
    spec: &GeneratorSpec,
    rng: &mut ChaCha8Rng,
) -> Result<(usize, Vec<Vec<F::Elem>>, Option<HeightValue>)> {
    match spec {
        GeneratorSpec::PolynomialImage { coordinates, domain, n } => {
            let polys = coordinates.iter().map(|c| MPoly::from_json(field, 1, c)).collect::<Result<Vec<_>>>()?;
            let xs: Vec<F::Elem> = match (domain, n) {
                (Some((lo, hi)), _) => {
                    if field.characteristic() != 0 {
                        return Err(Error::Parse("an integer domain needs the field Q".into()));
                    }
                    if hi < lo || (hi - lo) as u64 >= GENERATOR_BUDGET {
                        return Err(Error::BudgetExceeded(format!("domain {lo}..={hi}")));
                    }
                    (*lo..=*hi).map(|x| field.from_i64(x)).collect()
                }
                (None, Some(n)) => {
                    budget_check(&field.box_count(n), "the box")?;
                    field.box_elements(n)
                }
                (None, None) => return Err(Error::Parse("polynomial-image needs a domain or N".into())),
            };
            let mut pts = Vec::with_capacity(xs.len());
            for x in xs {
                let mut p = vec![x.clone()];
                p.extend(polys.iter().map(|g| g.eval(field, std::slice::from_ref(&x))));
                if let Some(n) = n {
                    if p.iter().any(|c| field.height(c) > *n) {
                        continue;
                    }
                }
                pts.push(p);
            }
            Ok((1 + polys.len(), pts, n.clone()))
        }
        GeneratorSpec::RandomUniform { dim, size, n } => {
            let per = field.box_count(n);
            let total = num_traits::pow(per, *dim);
            if total < num_bigint::BigUint::from(*size) || *size as u64 > GENERATOR_BUDGET {
                return Err(Error::BudgetExceeded(format!("{size} distinct points requested from a box of {total}")));
            }
            let mut seen = BTreeSet::new();
            while seen.len() < *size {
                let p: Vec<F::Elem> = (0..*dim).map(|_| field.random_in_box(rng, n)).collect();
                seen.insert(p);
            }
            Ok((*dim, seen.into_iter().collect(), Some(n.clone())))
        }
        GeneratorSpec::Union { parts } => {
            let mut dim = None;
            let mut pts = Vec::new();
            let mut bound: Option<HeightValue> = None;
            for part in parts {
                let (d, p, n) = raw_points(field, part, rng)?;
                if dim.is_some_and(|x| x != d) {
                    return Err(Error::Parse("union of sets of different dimensions".into()));
                }
                dim = Some(d);
                pts.extend(p);
                bound = match (bound, n) {
                    (Some(a), Some(b)) => Some(HeightValue::max(a, b)),
                    (a, b) => a.or(b),
                };
            }
            let dim = dim.ok_or_else(|| Error::Parse("empty union".into()))?;
            Ok((dim, pts, bound))
        }
        GeneratorSpec::File { path } => {
            let text = fs::read_to_string(path)?;
            let v: Value = serde_json::from_str(&text)?;
            let s = PointSet::from_json(field.clone(), &v)?;
            Ok((s.dim(), s.points().to_vec(), Some(s.bound().clone())))
        }
    }
}

/// Builds the point set described by `spec`, deterministically in `seed`.
pub fn generate_set<F: GlobalField>(field: &F, spec: &GeneratorSpec, seed: u64) -> Result<PointSet<F>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (dim, pts, n) = raw_points(field, spec, &mut rng)?;
    PointSet::new(field.clone(), dim, pts, n)
}

/// Parameter block of a spec; `d` and `N` come from the generated set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ParamSpec {
    pub k: usize,
    pub epsilon: f64,
    pub alpha: f64,
    pub eta: f64,
    pub kappa: f64,
    pub c: f64,
    pub mode: Mode,
    pub pragmatic: PragmaticKnobs,
    /// Overrides the bound of the generated set.
    #[serde(rename = "N")]
    pub n: Option<HeightValue>,
}

impl Default for ParamSpec {
    fn default() -> Self {
        let p = SieveParams::new(2, 1, HeightValue::one());
        ParamSpec {
            k: p.k,
            epsilon: p.epsilon,
            alpha: p.alpha,
            eta: p.eta,
            kappa: p.kappa,
            c: p.c,
            mode: p.mode,
            pragmatic: p.pragmatic,
            n: None,
        }
    }
}

impl ParamSpec {
    pub fn resolve(&self, d: usize, n: &HeightValue) -> SieveParams {
        SieveParams {
            d,
            k: self.k,
            epsilon: self.epsilon,
            alpha: self.alpha,
            eta: self.eta,
            kappa: self.kappa,
            c: self.c,
            n: self.n.clone().unwrap_or_else(|| n.clone()),
            mode: self.mode,
            pragmatic: self.pragmatic.clone(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    Audit,
    Occupancy,
    Generic,
    Characteristic,
    Reconstruct,
}

impl Stage {
    pub fn name(&self) -> &'static str {
        match self {
            Stage::Audit => "audit",
            Stage::Occupancy => "occupancy",
            Stage::Generic => "generic",
            Stage::Characteristic => "characteristic",
            Stage::Reconstruct => "reconstruct",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    #[serde(default = "default_field")]
    pub field: GlobalFieldDesc,
    pub generator: GeneratorSpec,
    #[serde(default)]
    pub params: ParamSpec,
    #[serde(default = "default_stages")]
    pub stages: Vec<Stage>,
    /// Degree for the characteristic stage.
    #[serde(default = "default_r")]
    pub r: usize,
    #[serde(default)]
    pub budget: Option<usize>,
    #[serde(default)]
    pub reconstruct: ReconstructSpec,
    /// Expected reconstruction outcome kind, checked as an assertion.
    #[serde(default)]
    pub expect: Option<String>,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ReconstructSpec {
    pub homogeneous: bool,
    pub max_degree: usize,
    pub max_rounds: usize,
    pub accept_fraction: f64,
}

impl Default for ReconstructSpec {
    fn default() -> Self {
        let o = ReconstructOptions::default();
        ReconstructSpec {
            homogeneous: o.homogeneous,
            max_degree: o.max_degree,
            max_rounds: o.max_rounds,
            accept_fraction: o.accept_fraction,
        }
    }
}

impl ReconstructSpec {
    pub fn options(&self) -> ReconstructOptions {
        ReconstructOptions {
            homogeneous: self.homogeneous,
            max_degree: self.max_degree,
            max_rounds: self.max_rounds,
            accept_fraction: self.accept_fraction,
            ..ReconstructOptions::default()
        }
    }
}

fn default_field() -> GlobalFieldDesc {
    GlobalFieldDesc::Rational
}

fn default_stages() -> Vec<Stage> {
    vec![Stage::Audit, Stage::Reconstruct]
}

fn default_r() -> usize {
    2
}

impl ExperimentSpec {
    pub fn from_json_str(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("experiment spec: {e}")))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Assertion {
    pub stage: String,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Everything a run produced, before it is written out.
#[derive(Clone, Debug)]
pub struct ExperimentRun {
    pub report: Value,
    pub events: Vec<Value>,
    pub timings: Vec<(String, f64)>,
    pub tables: Vec<(String, String)>,
    pub assertions: Vec<Assertion>,
}

impl ExperimentRun {
    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.passed)
    }

    /// Pretty JSON with a trailing newline; the bytes compared across runs.
    pub fn report_bytes(&self) -> Vec<u8> {
        let mut s = serde_json::to_string_pretty(&self.report).expect("report serialises");
        s.push('\n');
        s.into_bytes()
    }

    pub fn write_to(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir.join("tables"))?;
        fs::write(dir.join("report.json"), self.report_bytes())?;
        let mut ev = fs::File::create(dir.join("events.jsonl"))?;
        for e in &self.events {
            writeln!(ev, "{e}")?;
        }
        let timings: serde_json::Map<String, Value> =
            self.timings.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
        fs::write(dir.join("timings.json"), serde_json::to_string_pretty(&Value::Object(timings))? + "\n")?;
        for (name, body) in &self.tables {
            fs::write(dir.join("tables").join(name), body)?;
        }
        Ok(())
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Runs all stages of `spec` in memory.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentRun> {
    match spec.field {
        GlobalFieldDesc::Rational => run_with(&Rationals::new(), spec),
        GlobalFieldDesc::FunctionField { q } => run_with(&FunctionField::new(q)?, spec),
    }
}

fn run_with<F: GlobalField>(field: &F, spec: &ExperimentSpec) -> Result<ExperimentRun> {
    let t0 = Instant::now();
    let s = generate_set(field, &spec.generator, spec.seed)?;
    let mut timings = vec![("generate".to_string(), t0.elapsed().as_secs_f64())];
    let params = spec.params.resolve(s.dim(), s.bound());
    params.validate()?;
    let q = params.q_bound();
    let primes = PrimeSet::up_to(field, q);

    let mut events = vec![json!({"event": "generated", "size": s.len(), "hash": s.content_hash()})];
    let mut stages = serde_json::Map::new();
    let mut tables = Vec::new();
    let mut assertions = Vec::new();
    let mut check = |stage: &str, name: &str, passed: bool, detail: String| {
        assertions.push(Assertion { stage: stage.into(), name: name.into(), passed, detail });
    };

    for stage in &spec.stages {
        let name = stage.name();
        events.push(json!({"event": "start", "stage": name}));
        let t = Instant::now();
        let result: Result<Value> = match stage {
            Stage::Audit => larger_sieve_audit(&s, q).and_then(|a| {
                let mut buf = Vec::new();
                a.write_csv(&mut buf)?;
                tables.push(("audit.csv".to_string(), String::from_utf8(buf).expect("csv is utf-8")));
                check(name, "larger-sieve-inequality", a.holds, format!("{} <= {}", a.lhs_classes, a.rhs));
                check(name, "double-count-identity", a.identity_exact, "pairs equal class squares per prime".into());
                Ok(serde_json::to_value(&a)?)
            }),
            Stage::Occupancy => {
                let mut csv = String::from("prime,norm,occupancy,threshold,bad\n");
                let mut rows = Vec::new();
                for p in primes.iter() {
                    let occ = occupancy(&s, p);
                    let thr = params.alpha * (p.norm as f64).powi(params.k as i32);
                    let bad = (occ as f64) <= thr;
                    let label = field.display_elem(&p.generator);
                    csv.push_str(&format!("{label},{},{occ},{thr},{bad}\n", p.norm));
                    rows.push(json!({"prime": label, "norm": p.norm, "occupancy": occ, "bad": bad}));
                }
                tables.push(("occupancy.csv".to_string(), csv));
                Ok(Value::Array(rows))
            }
            Stage::Generic => build_generic_family(&s, &primes, &params).map(|fam| {
                check(name, "witnesses", fam.verify_witnesses(&s), "every witness passes its inequality".into());
                check(name, "gluing", fam.gluing_holds(&s), "witness classes restrict to sections".into());
                fam.to_json(field)
            }),
            Stage::Characteristic => {
                let w = match spec.budget {
                    Some(b) => build_characteristic_set_with_budget(&s, &primes, spec.r, &params, b),
                    None => build_characteristic_set(&s, &primes, spec.r, &params),
                };
                w.map(|w| w.to_json(field))
            }
            Stage::Reconstruct => reconstruct(&s, &params, &primes, &spec.reconstruct.options()).map(|out| {
                if let ReconstructionOutcome::Structured { poly, fraction, .. } = &out {
                    let recount = vanish_count(&s, &poly.poly) as f64 / s.len() as f64;
                    check(
                        name,
                        "fraction-recount",
                        recount == *fraction && recount >= 1.0 - params.eta,
                        format!("recounted {recount}, reported {fraction}"),
                    );
                }
                if let Some(want) = &spec.expect {
                    check(name, "expected-outcome", out.kind() == want, format!("got {}, expected {want}", out.kind()));
                }
                out.to_json(field)
            }),
        };
        timings.push((name.to_string(), t.elapsed().as_secs_f64()));
        let value = match result {
            Ok(v) => {
                events.push(json!({"event": "done", "stage": name}));
                json!({"status": "ok", "result": v})
            }
            Err(e) => {
                events.push(json!({"event": "error", "stage": name, "kind": e.kind()}));
                check(name, "stage-completed", false, e.to_string());
                json!({"status": "error", "error": {"kind": e.kind(), "message": e.to_string()}})
            }
        };
        stages.insert(name.to_string(), value);
    }

    let passed = assertions.iter().all(|a| a.passed);
    let body = json!({
        "spec": spec,
        "field": field.desc(),
        "params": params,
        "Q": q,
        "pointset": {"size": s.len(), "dim": s.dim(), "N": s.bound().to_string(), "hash": s.content_hash()},
        "stages": Value::Object(stages),
        "assertions": assertions,
        "passed": passed,
    });
    let hash = sha256_hex(serde_json::to_string(&body)?.as_bytes());
    let mut report = body;
    report["content_hash"] = json!(hash);
    events.push(json!({"event": "finished", "passed": passed}));
    timings.push(("total".to_string(), t0.elapsed().as_secs_f64()));
    Ok(ExperimentRun { report, events, timings, tables, assertions })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_image_keeps_points_in_the_box() {
        let q = Rationals::new();
        let spec: GeneratorSpec = serde_json::from_value(json!({
            "type": "polynomial-image", "coordinates": [{"2": "1"}], "N": "100"
        }))
        .unwrap();
        let s = generate_set(&q, &spec, 0).unwrap();
        assert_eq!(s.len(), 21);
        assert!(s.points().iter().all(|p| p[1] == &p[0] * &p[0]));
    }

    #[test]
    fn random_sets_are_reproducible() {
        let q = Rationals::new();
        let spec = GeneratorSpec::RandomUniform { dim: 2, size: 50, n: HeightValue::from_int(100) };
        let a = generate_set(&q, &spec, 7).unwrap();
        let b = generate_set(&q, &spec, 7).unwrap();
        assert_eq!(a.len(), 50);
        assert_eq!(a.points(), b.points());
        let too_many = GeneratorSpec::RandomUniform { dim: 1, size: 10, n: HeightValue::from_int(2) };
        assert!(matches!(generate_set(&q, &too_many, 0), Err(Error::BudgetExceeded(_))));
    }

    #[test]
    fn unions_deduplicate() {
        let q = Rationals::new();
        let line = json!({"type": "polynomial-image", "coordinates": [{"1": "2"}], "domain": [1, 10]});
        let par = json!({"type": "polynomial-image", "coordinates": [{"2": "1"}], "domain": [1, 10]});
        let spec: GeneratorSpec = serde_json::from_value(json!({"type": "union", "parts": [line, par]})).unwrap();
        // (2, 4) lies on both.
        assert_eq!(generate_set(&q, &spec, 0).unwrap().len(), 19);
    }
}
