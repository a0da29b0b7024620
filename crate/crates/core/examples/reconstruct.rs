//! Reconstruction on a line plus a parabola, and on a random set.

use invsieve::experiment::{generate_set, GeneratorSpec};
use invsieve::field::{PrimeSet, Rationals};
use invsieve::reconstruct::{reconstruct, ReconstructOptions};
use invsieve::sieve::PointSet;
use invsieve::structure::SieveParams;
use num_bigint::BigInt;

fn run(s: &PointSet<Rationals>, alpha: f64) {
    let q = s.field();
    let mut params = SieveParams::new(2, 1, s.bound().clone());
    params.alpha = alpha;
    let primes = PrimeSet::up_to(q, params.q_bound());
    let out = reconstruct(s, &params, &primes, &ReconstructOptions::default()).unwrap();
    println!("{}", serde_json::to_string_pretty(&out.to_json(q)).unwrap());
}

fn main() {
    let q = Rationals::new();
    let z = BigInt::from;
    let mut pts: Vec<Vec<BigInt>> = (1..=500i64).map(|x| vec![z(x), z(2 * x)]).collect();
    pts.extend((1..=500i64).map(|x| vec![z(x), z(x * x)]));
    run(&PointSet::new(q.clone(), 2, pts, None).unwrap(), 2.0);

    let spec: GeneratorSpec =
        serde_json::from_str(r#"{"type": "random-uniform", "dim": 2, "size": 30, "N": "1000000"}"#).unwrap();
    run(&generate_set(&q, &spec, 7).unwrap(), 1.0);
}
