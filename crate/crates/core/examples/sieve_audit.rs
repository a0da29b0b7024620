//! Both countings of the larger sieve on a random set and on a parabola.

use invsieve::experiment::{generate_set, GeneratorSpec};
use invsieve::field::Rationals;
use invsieve::sieve::{larger_sieve_audit, PointSet};
use num_bigint::BigInt;

fn main() {
    let q = Rationals::new();
    let spec: GeneratorSpec =
        serde_json::from_str(r#"{"type": "random-uniform", "dim": 2, "size": 150, "N": "10000"}"#).unwrap();
    let random = generate_set(&q, &spec, 1).unwrap();
    let pts = (-100..=100).map(|x: i64| vec![BigInt::from(x), BigInt::from(x * x)]).collect();
    let parabola = PointSet::new(q, 2, pts, None).unwrap();

    for (name, s) in [("random", &random), ("parabola", &parabola)] {
        let a = larger_sieve_audit(s, 40).unwrap();
        println!(
            "{name}: |S| = {}, lhs = {:.1}, rhs = {:.1}, holds = {}, identity exact = {}",
            s.len(),
            a.lhs_classes,
            a.rhs,
            a.holds,
            a.identity_exact
        );
    }
    larger_sieve_audit(&parabola, 40).unwrap().write_csv(std::io::stdout()).unwrap();
}
