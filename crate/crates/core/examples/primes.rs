//! Primes of bounded norm and the prime sums bracketed by the field constants.

use invsieve::field::primes::log_norm_sum;
use invsieve::field::{weight_w, FunctionField, GlobalField, Rationals};

fn report<F: GlobalField>(field: &F) {
    let k = field.constants();
    println!("{}: c1 = {:.3}, c2 = {:.3}, c3 = {:.3}, c4 = {:.3}", field.desc().label(), k.c1, k.c2, k.c3, k.c4);
    for q in [100u64, 1000, 10_000] {
        let ps = field.primes_up_to(q);
        let lq = (q as f64).ln();
        println!(
            "  Q = {q:>6}: {:>5} primes, w / log Q = {:.3}, sum log N(p) / Q = {:.3}",
            ps.len(),
            weight_w(&ps) / lq,
            log_norm_sum(&ps) / q as f64
        );
    }
}

fn main() {
    report(&Rationals::new());
    for q in [2, 3, 5] {
        report(&FunctionField::new(q).unwrap());
    }
    let f2 = FunctionField::new(2).unwrap();
    let small: Vec<String> = f2.primes_up_to(8).iter().map(|p| f2.display_elem(&p.generator)).collect();
    println!("primes of F_2[T] with norm <= 8: {}", small.join(", "));
}
