use invsieve::field::{PrimeSet, Rationals};
use invsieve::poly::MPoly;
use invsieve::reconstruct::{reconstruct, ReconstructOptions, ReconstructionOutcome};
use invsieve::sieve::PointSet;
use invsieve::structure::SieveParams;
use num_bigint::BigInt;

fn z(x: i64) -> BigInt {
    BigInt::from(x)
}

#[test]
fn shifted_parabola_is_explained_by_its_equation() {
    let q = Rationals::new();
    let pts = (-1000..=1000).map(|x| vec![z(x), z(x * x + 3 * x + 1)]).collect();
    let s = PointSet::new(q.clone(), 2, pts, None).unwrap();
    let params = SieveParams::new(2, 1, s.bound().clone());
    let primes = PrimeSet::up_to(&q, params.q_bound());
    let out = reconstruct(&s, &params, &primes, &ReconstructOptions::default()).unwrap();
    let ReconstructionOutcome::Structured { poly, fraction, .. } = out else {
        panic!("expected Structured, got {}", out.kind());
    };
    assert_eq!(fraction, 1.0);
    assert!(poly.poly.degree() <= 2);
    // Restricted to the graph the output is identically zero: check at x off the box too.
    for x in [5000i64, -7777, 123456] {
        assert!(poly.poly.vanishes_at(&q, &[z(x), z(x * x + 3 * x + 1)]));
    }
    let expect = MPoly::from_terms(&q, 2, [(vec![0, 1], z(1)), (vec![2, 0], z(-1)), (vec![1, 0], z(-3)), (vec![0, 0], z(-1))]);
    assert_eq!(poly.poly.primitive(&q), expect.primitive(&q), "{}", poly.poly.display(&q));
}

#[test]
fn line_and_parabola_need_degree_three() {
    let q = Rationals::new();
    let mut pts: Vec<Vec<BigInt>> = (1..=500).map(|x| vec![z(x), z(2 * x)]).collect();
    pts.extend((1..=500).map(|x| vec![z(x), z(x * x)]));
    let s = PointSet::new(q.clone(), 2, pts, None).unwrap();
    let mut params = SieveParams::new(2, 1, s.bound().clone());
    params.alpha = 2.0;
    let primes = PrimeSet::up_to(&q, params.q_bound());
    let out = reconstruct(&s, &params, &primes, &ReconstructOptions::default()).unwrap();
    let ReconstructionOutcome::Structured { poly, fraction, .. } = out else {
        panic!("expected Structured, got {}", out.kind());
    };
    assert!(fraction >= 0.9);
    assert!(poly.poly.degree() <= 3, "{}", poly.poly.display(&q));
}
