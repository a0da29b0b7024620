//! Noether normalisation of two plane conics onto P^1.

use invsieve::field::Rationals;
use invsieve::heights::HeightValue;
use invsieve::noether::{noether_normalize, Conic};

fn main() {
    let q = Rationals::new();
    for conic in [Conic::Pythagorean, Conic::RationalNormal] {
        let f = conic.polynomial(&q);
        let samples = conic.seeded_samples(&q, 50, &HeightValue::from_int(30), 0);
        let map = noether_normalize(&q, std::slice::from_ref(&f), 2, 1, &samples).unwrap();
        println!("{}:", f.display(&q));
        println!("{}", serde_json::to_string_pretty(&map.to_json(&q)).unwrap());
    }
}
