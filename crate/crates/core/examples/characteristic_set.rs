//! Degree-2 characteristic subset of a parabola and a certificate for its equation.

use invsieve::field::{PrimeSet, Rationals};
use invsieve::poly::MPoly;
use invsieve::sieve::PointSet;
use invsieve::structure::{build_characteristic_set, SieveParams};
use num_bigint::BigInt;

fn main() {
    let q = Rationals::new();
    let pts = (-200..=200i64).map(|x| vec![BigInt::from(x), BigInt::from(x * x - 7)]).collect();
    let s = PointSet::new(q.clone(), 2, pts, None).unwrap();
    let params = SieveParams::new(2, 1, s.bound().clone());
    let primes = PrimeSet::up_to(&q, params.q_bound());
    let w = build_characteristic_set(&s, &primes, 2, &params).unwrap();
    println!("|A| = {}, |L| = {}, delta = {:.3}", w.a.len(), w.l.len(), w.delta);

    let f = MPoly::from_terms(&q, 2, [(vec![2, 0], BigInt::from(1)), (vec![0, 1], BigInt::from(-1)), (vec![0, 0], BigInt::from(-7))]);
    println!("certify {}: {:?}", f.display(&q), w.certify(&s, &f));
}
