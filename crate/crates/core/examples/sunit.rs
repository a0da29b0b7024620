//! Integral lifts of projective points and S-unit reduction of a target vector.

use invsieve::field::{Fraction, Rationals};
use invsieve::lift::{lift_point, sunit_reduce, SUnitTarget};
use num_bigint::BigInt;

fn main() {
    let q = Rationals::new();
    let x: Vec<Fraction<BigInt>> = [(3, 4), (-5, 6), (7, 1)]
        .iter()
        .map(|&(n, d)| Fraction::new(&q, BigInt::from(n), BigInt::from(d)).unwrap())
        .collect();
    let lift = lift_point(&q, &x).unwrap();
    let coords: Vec<String> = lift.coords.iter().map(|c| c.to_string()).collect();
    println!("lift of (3/4 : -5/6 : 7) = ({}), height {}", coords.join(" : "), lift.height);

    let target = SUnitTarget::new(vec![2, 3, 5], vec![40.0, 0.1, 3.0, 0.5]).unwrap();
    let red = sunit_reduce(&q, &target).unwrap();
    let eps = red.epsilon(&target);
    println!(
        "eps = {}/{}, t = {:.4}, distance {:.4} <= C_W = {:.4}",
        eps.num, eps.den, red.t, red.distance, red.covering_constant
    );
}
