//! Generic family of the parabola `y = x^2` inside `[400]^2`.

use invsieve::field::{PrimeSet, Rationals};
use invsieve::heights::HeightValue;
use invsieve::sieve::PointSet;
use invsieve::structure::{build_generic_family, SieveParams};
use num_bigint::BigInt;

fn main() {
    let q = Rationals::new();
    let n = 400i64;
    let pts = (-20..=20i64).map(|x| vec![BigInt::from(x), BigInt::from(x * x)]).collect();
    let s = PointSet::new(q.clone(), 2, pts, Some(HeightValue::from_int(n))).unwrap();
    let params = SieveParams::new(2, 1, HeightValue::from_int(n));
    let fam = build_generic_family(&s, &PrimeSet::up_to(&q, 20), &params).unwrap();
    println!("witnesses: {}, verified: {}", fam.witnesses.len(), fam.verify_witnesses(&s));
    println!("gluing holds: {}", fam.gluing_holds(&s));
    for c in fam.claims() {
        println!("claim: coordinate {} keeps >= {} values on {:.2} of {} points", c.coord, c.q, c.fraction, c.subset.len());
    }
    println!("{}", serde_json::to_string_pretty(&fam.to_json(&q)).unwrap());
}
