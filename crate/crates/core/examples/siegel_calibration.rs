//! Calibrates the small-solution constant `c6` on random systems and
//! prints the per-field value next to the shipped one.
//!
//! cargo run --release --example siegel_calibration -- [systems] [seed]

use invsieve::field::{FunctionField, GlobalField, Rationals};
use invsieve::heights::HeightValue;
use invsieve::siegel::{calibrate_c6, small_solution, CalibrationSample, LinearSystem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn samples<F: GlobalField>(field: &F, n: usize, seed: u64) -> Vec<CalibrationSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let s = rng.gen_range(1..=3usize);
        let t = rng.gen_range(2 * s + 1..=12usize);
        let c = HeightValue::from_int(rng.gen_range(1..=100i64));
        let rows: Vec<Vec<F::Elem>> = (0..s).map(|_| (0..t).map(|_| field.random_in_box(&mut rng, &c)).collect()).collect();
        let Ok(sys) = LinearSystem::new(rows) else { continue };
        let Ok(sol) = small_solution(field, &sys) else { continue };
        out.push(CalibrationSample {
            s,
            t,
            ln_c: sys.coefficient_height(field).ln(),
            ln_height: sol.height.ln(),
        });
    }
    out
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let n = args.get(1).and_then(|a| a.parse().ok()).unwrap_or(500);
    let seed = args.get(2).and_then(|a| a.parse().ok()).unwrap_or(0);
    let q = Rationals::new();
    println!("Q:      calibrated c6 = {}  shipped {}", calibrate_c6(&samples(&q, n, seed)), q.constants().c6);
    for p in [2, 3, 5] {
        let k = FunctionField::new(p).unwrap();
        println!("F_{p}(T): calibrated c6 = {}  shipped {}", calibrate_c6(&samples(&k, n, seed)), k.constants().c6);
    }
}
