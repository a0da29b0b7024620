//! `invsieve`: one subcommand per library stage, JSON on stdout.
//!
//! Exit codes: 0 success, 1 failed assertion or stage error, 2 usage error.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use invsieve::experiment::{generate_set, run_experiment, ExperimentSpec, GeneratorSpec};
use invsieve::field::{Fraction, FunctionField, GlobalField, GlobalFieldDesc, PrimeSet, Rationals};
use invsieve::heights::{height_projective_fractions, HeightValue};
use invsieve::lift::{lift_point, sunit_reduce, SUnitTarget};
use invsieve::noether::{noether_normalize, Conic};
use invsieve::poly::MPoly;
use invsieve::reconstruct::{reconstruct, ReconstructOptions};
use invsieve::siegel::{small_solution, LinearSystem};
use invsieve::sieve::{larger_sieve_audit, PointSet};
use invsieve::structure::{
    build_characteristic_set, build_characteristic_set_with_budget, build_generic_family, Mode, SieveParams,
};
use invsieve::Error;

#[derive(Parser, Debug)]
#[command(name = "invsieve", version, about = "Inverse large sieve toolkit over Q and F_q(T)")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug, Clone)]
struct Global {
    /// `Q`, `F2T`, `FqT:3`, ...
    #[arg(long, global = true, default_value = "Q")]
    field: String,
    /// Box bound; defaults to the largest coordinate height of the input.
    #[arg(long = "N", global = true)]
    n: Option<String>,
    #[arg(long, global = true)]
    eps: Option<f64>,
    #[arg(long, global = true)]
    alpha: Option<f64>,
    #[arg(long, global = true)]
    eta: Option<f64>,
    #[arg(long, global = true)]
    kappa: Option<f64>,
    /// Occupancy exponent; defaults to `d - 1`.
    #[arg(long, global = true)]
    k: Option<usize>,
    #[arg(long, global = true, default_value = "pragmatic")]
    mode: String,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output file (directory for `experiment`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct SetInput {
    /// Point set JSON file.
    #[arg(long, conflicts_with = "generator")]
    input: Option<PathBuf>,
    /// Inline generator spec, e.g. `{"type":"random-uniform","dim":2,"size":30,"N":"1000000"}`.
    #[arg(long)]
    generator: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Height of a projective (or, with --affine, affine) point.
    Heights {
        /// JSON array of coordinates; strings may be fractions `a/b`.
        #[arg(long)]
        point: String,
        #[arg(long)]
        affine: bool,
    },
    /// Primes of norm at most --bound and their weight.
    Primes {
        #[arg(long)]
        bound: u64,
    },
    /// Both sides of the larger sieve inequality.
    SieveAudit {
        #[command(flatten)]
        set: SetInput,
        /// Prime norm bound; defaults to `floor(N^{eps/(2d)})`.
        #[arg(long = "Q")]
        q: Option<u64>,
        /// Per-prime rows as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Generic family with its genericity witnesses.
    Generic {
        #[command(flatten)]
        set: SetInput,
    },
    /// Characteristic subset for degree r.
    Characteristic {
        #[command(flatten)]
        set: SetInput,
        #[arg(long, default_value_t = 2)]
        r: usize,
        /// Largest |A| to glue (pragmatic mode).
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Small nonzero solution of a homogeneous system.
    Siegel {
        /// JSON matrix of coefficients.
        #[arg(long)]
        system: String,
    },
    /// Noether map of a plane conic, or of a hypersurface given with sample points.
    Noether {
        /// `pythagorean` or `rational-normal`.
        #[arg(long, conflicts_with = "poly")]
        conic: Option<String>,
        /// Homogeneous polynomial as `{"e0,e1,...": coeff}`.
        #[arg(long, requires = "points")]
        poly: Option<String>,
        /// JSON array of points of the hypersurface.
        #[arg(long)]
        points: Option<String>,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        /// Parameter range for conic samples.
        #[arg(long, default_value_t = 30)]
        param_bound: i64,
    },
    /// Integral lift of a projective point, or S-unit reduction with --primes.
    Lift {
        #[arg(long, conflicts_with = "primes")]
        point: Option<String>,
        /// Finite places of S, comma separated.
        #[arg(long, requires = "targets")]
        primes: Option<String>,
        /// Targets at infinity then at each prime, comma separated.
        #[arg(long)]
        targets: Option<String>,
    },
    /// Polynomial explaining most of a badly distributed set.
    Reconstruct {
        #[command(flatten)]
        set: SetInput,
        #[arg(long)]
        homogeneous: bool,
        #[arg(long, default_value_t = 6)]
        max_degree: usize,
    },
    /// Runs a JSON experiment spec and writes the report directory.
    Experiment {
        #[arg(long)]
        spec: PathBuf,
    },
}

/// Outcome of a command: JSON to print and whether its assertions passed.
struct Done {
    value: Value,
    passed: bool,
}

impl From<Value> for Done {
    fn from(value: Value) -> Self {
        Done { value, passed: true }
    }
}

type Res<T> = std::result::Result<T, Error>;

macro_rules! on_field {
    ($desc:expr, $k:ident => $body:expr) => {
        match $desc {
            GlobalFieldDesc::Rational => {
                let $k = Rationals::new();
                $body
            }
            GlobalFieldDesc::FunctionField { q } => {
                let $k = FunctionField::new(q)?;
                $body
            }
        }
    };
}

fn parse_json(text: &str, what: &str) -> Res<Value> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("{what}: {e}")))
}

fn parse_fraction<F: GlobalField>(k: &F, v: &Value) -> Res<Fraction<F::Elem>> {
    if let Value::String(s) = v {
        if let Some((a, b)) = s.split_once('/') {
            let num = k.parse_elem(&Value::String(a.trim().into()))?;
            let den = k.parse_elem(&Value::String(b.trim().into()))?;
            return Fraction::new(k, num, den);
        }
    }
    Ok(Fraction::from_elem(k, k.parse_elem(v)?))
}

fn parse_point<F: GlobalField>(k: &F, text: &str) -> Res<Vec<Fraction<F::Elem>>> {
    let v = parse_json(text, "point")?;
    let items = v.as_array().ok_or_else(|| Error::Parse("point must be a JSON array".into()))?;
    items.iter().map(|c| parse_fraction(k, c)).collect()
}

fn parse_matrix<F: GlobalField>(k: &F, text: &str, what: &str) -> Res<Vec<Vec<F::Elem>>> {
    let v = parse_json(text, what)?;
    let rows = v.as_array().ok_or_else(|| Error::Parse(format!("{what} must be an array of arrays")))?;
    rows.iter()
        .map(|r| {
            r.as_array()
                .ok_or_else(|| Error::Parse(format!("{what} row must be an array")))?
                .iter()
                .map(|c| k.parse_elem(c))
                .collect()
        })
        .collect()
}

fn load_set<F: GlobalField>(k: &F, g: &Global, input: &SetInput) -> Res<PointSet<F>> {
    let set = match (&input.input, &input.generator) {
        (Some(path), _) => PointSet::from_json(k.clone(), &parse_json(&fs::read_to_string(path)?, "point set")?)?,
        (None, Some(spec)) => {
            let spec: GeneratorSpec =
                serde_json::from_value(parse_json(spec, "generator")?).map_err(|e| Error::Parse(e.to_string()))?;
            generate_set(k, &spec, g.seed)?
        }
        (None, None) => return Err(Error::Parse("give --input or --generator".into())),
    };
    match &g.n {
        Some(n) => PointSet::new(k.clone(), set.dim(), set.points().to_vec(), Some(parse_bound(n)?)),
        None => Ok(set),
    }
}

fn parse_bound(text: &str) -> Res<HeightValue> {
    text.parse::<HeightValue>().map_err(|e| Error::Parse(format!("--N: {e}")))
}

fn params_for<F: GlobalField>(g: &Global, s: &PointSet<F>) -> Res<SieveParams> {
    let d = s.dim();
    let mut p = SieveParams::new(d, g.k.unwrap_or(d.saturating_sub(1)), s.bound().clone());
    if let Some(x) = g.eps {
        p.epsilon = x;
    }
    if let Some(x) = g.alpha {
        p.alpha = x;
    }
    if let Some(x) = g.eta {
        p.eta = x;
    }
    if let Some(x) = g.kappa {
        p.kappa = x;
    }
    p.mode = g.mode.parse::<Mode>()?;
    p.validate()?;
    Ok(p)
}

fn run(cli: Cli) -> Res<Done> {
    let g = &cli.global;
    let desc: GlobalFieldDesc = g.field.parse()?;
    match cli.cmd {
        Cmd::Heights { point, affine } => on_field!(desc, k => {
            let mut x = parse_point(&k, &point)?;
            if affine {
                x.insert(0, Fraction::from_elem(&k, k.one()));
            }
            let h = height_projective_fractions(&k, &x)?;
            let lift = lift_point(&k, &x)?;
            Ok(json!({
                "field": desc,
                "height": h.to_string(),
                "log_height": h.ln(),
                "lift": lift.coords.iter().map(|c| k.format_elem(c)).collect::<Vec<_>>(),
            }).into())
        }),
        Cmd::Primes { bound } => on_field!(desc, k => {
            let ps = PrimeSet::up_to(&k, bound);
            Ok(json!({
                "field": desc,
                "bound": bound,
                "count": ps.len(),
                "weight": ps.weight(),
                "primes": ps.iter().map(|p| json!({"generator": k.display_elem(&p.generator), "norm": p.norm})).collect::<Vec<_>>(),
            }).into())
        }),
        Cmd::SieveAudit { set, q, csv } => on_field!(desc, k => {
            let s = load_set(&k, g, &set)?;
            let q = match q {
                Some(q) => q,
                None => params_for(g, &s)?.q_bound(),
            };
            let audit = larger_sieve_audit(&s, q)?;
            if let Some(path) = csv {
                audit.write_csv(fs::File::create(path)?)?;
            }
            let passed = audit.holds && audit.identity_exact;
            Ok(Done { value: json!({"Q": q, "size": s.len(), "N": s.bound().to_string(), "audit": audit}), passed })
        }),
        Cmd::Generic { set } => on_field!(desc, k => {
            let s = load_set(&k, g, &set)?;
            let params = params_for(g, &s)?;
            let primes = PrimeSet::up_to(&k, params.q_bound());
            let fam = build_generic_family(&s, &primes, &params)?;
            let (wit, glue) = (fam.verify_witnesses(&s), fam.gluing_holds(&s));
            Ok(Done {
                value: json!({"params": params, "family": fam.to_json(&k), "witnesses_verified": wit, "gluing_holds": glue}),
                passed: wit && glue,
            })
        }),
        Cmd::Characteristic { set, r, budget } => on_field!(desc, k => {
            let s = load_set(&k, g, &set)?;
            let params = params_for(g, &s)?;
            let primes = PrimeSet::up_to(&k, params.q_bound());
            let w = match budget {
                Some(b) => build_characteristic_set_with_budget(&s, &primes, r, &params, b)?,
                None => build_characteristic_set(&s, &primes, r, &params)?,
            };
            Ok(json!({"params": params, "witness": w.to_json(&k)}).into())
        }),
        Cmd::Siegel { system } => on_field!(desc, k => {
            let sys = LinearSystem::new(parse_matrix(&k, &system, "system")?)?;
            let sol = small_solution(&k, &sys)?;
            Ok(Done {
                passed: sol.within_bound(),
                value: json!({
                    "vector": sol.vector.iter().map(|c| k.format_elem(c)).collect::<Vec<_>>(),
                    "height": sol.height.to_string(),
                    "bound": sol.bound,
                    "within_bound": sol.within_bound(),
                }),
            })
        }),
        Cmd::Noether { conic, poly, points, samples, param_bound } => on_field!(desc, k => {
            let (f, pts) = match (conic, poly, points) {
                (Some(name), _, _) => {
                    let c: Conic = name.parse()?;
                    let pts = c.seeded_samples(&k, samples, &HeightValue::from_int(param_bound), g.seed);
                    (c.polynomial(&k), pts)
                }
                (None, Some(poly), Some(points)) => {
                    let pts = parse_matrix(&k, &points, "points")?;
                    let n = pts.first().map(|p| p.len()).ok_or_else(|| Error::Parse("no sample points".into()))?;
                    (MPoly::from_json(&k, n, &parse_json(&poly, "poly")?)?, pts)
                }
                _ => return Err(Error::Parse("give --conic, or --poly with --points".into())),
            };
            let m = f.nvars - 1;
            let map = noether_normalize(&k, &[f], m, m - 1, &pts)?;
            let passed = map.independent && map.within_bound && map.audit.within;
            Ok(Done { value: map.to_json(&k), passed })
        }),
        Cmd::Lift { point, primes, targets } => {
            if let Some(point) = point {
                on_field!(desc, k => {
                    let x = parse_point(&k, &point)?;
                    let l = lift_point(&k, &x)?;
                    Ok(json!({
                        "lift": l.coords.iter().map(|c| k.format_elem(c)).collect::<Vec<_>>(),
                        "height": l.height.to_string(),
                        "log": l.log,
                    }).into())
                })
            } else {
                let (Some(primes), Some(targets)) = (primes, targets) else {
                    return Err(Error::Parse("give --point, or --primes with --targets".into()));
                };
                let ps = parse_list::<u64>(&primes, "primes")?;
                let ts = parse_list::<f64>(&targets, "targets")?;
                let target = SUnitTarget::new(ps, ts)?;
                on_field!(desc, k => {
                    let r = sunit_reduce(&k, &target)?;
                    let passed = r.distance <= r.covering_constant + 1e-12;
                    Ok(Done { value: serde_json::to_value(&r)?, passed })
                })
            }
        }
        Cmd::Reconstruct { set, homogeneous, max_degree } => on_field!(desc, k => {
            let s = load_set(&k, g, &set)?;
            let params = params_for(g, &s)?;
            let primes = PrimeSet::up_to(&k, params.q_bound());
            let opts = ReconstructOptions { homogeneous, max_degree, ..ReconstructOptions::default() };
            let out = reconstruct(&s, &params, &primes, &opts)?;
            Ok(json!({"params": params, "size": s.len(), "pointset_hash": s.content_hash(), "outcome": out.to_json(&k)}).into())
        }),
        Cmd::Experiment { spec } => {
            let text = fs::read_to_string(&spec)?;
            let spec = ExperimentSpec::from_json_str(&text)?;
            let run = run_experiment(&spec)?;
            let dir = g.out.clone().unwrap_or_else(|| PathBuf::from("out"));
            run.write_to(&dir)?;
            let passed = run.passed();
            Ok(Done {
                value: json!({
                    "report": dir.join("report.json"),
                    "content_hash": run.report["content_hash"],
                    "passed": passed,
                    "failed": run.assertions.iter().filter(|a| !a.passed).collect::<Vec<_>>(),
                }),
                passed,
            })
        }
    }
}

fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Res<Vec<T>> {
    text.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.trim().parse::<T>().map_err(|_| Error::Parse(format!("bad entry {t:?} in --{what}"))))
        .collect()
}

fn is_usage(e: &Error) -> bool {
    matches!(
        e,
        Error::Parse(_) | Error::Io(_) | Error::Json(_) | Error::Csv(_) | Error::InvalidField(_) | Error::UnsupportedField(_)
    )
}

fn emit(value: &Value, out: Option<&PathBuf>) -> std::io::Result<()> {
    let text = serde_json::to_string_pretty(value).expect("json value serialises");
    match out {
        Some(path) => fs::write(path, text + "\n"),
        None => {
            // A closed pipe (`| head`) is not an error worth reporting.
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let v = json!({"error": {"kind": "Usage", "message": e.to_string()}});
            println!("{}", serde_json::to_string_pretty(&v).unwrap());
            return ExitCode::from(2);
        }
    };
    let is_experiment = matches!(cli.cmd, Cmd::Experiment { .. });
    let out = cli.global.out.clone();
    match run(cli) {
        Ok(done) => {
            let target = if is_experiment { None } else { out.as_ref() };
            if let Err(e) = emit(&done.value, target) {
                eprintln!("{e}");
                return ExitCode::from(2);
            }
            if done.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            let v = json!({"error": {"kind": e.kind(), "message": e.to_string()}});
            println!("{}", serde_json::to_string_pretty(&v).unwrap());
            ExitCode::from(if is_usage(&e) { 2 } else { 1 })
        }
    }
}
