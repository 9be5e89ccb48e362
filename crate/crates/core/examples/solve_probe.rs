use std::time::Instant;

use holepack::finalize::{solve, SolveOptions};
use holepack::fixtures::random_grid;
use holepack::metricspace::verify_packing;
use holepack::Parallelism;

fn main() {
    let args: Vec<usize> = std::env::args().skip(1).map(|a| a.parse().unwrap()).collect();
    let (holes, k, seeds, maxlen) = (args[0], args[1], args[2], args[3] as i64);
    let mode = Parallelism::Parallel;
    let mut bad = 0;
    let mut worst = 0f64;
    for seed in 0..seeds as u64 {
        let inst = random_grid(seed, k, holes, maxlen);
        let t = Instant::now();
        let res = solve(&inst, &SolveOptions::with_mode(mode));
        let dt = t.elapsed().as_secs_f64();
        worst = worst.max(dt);
        match res {
            Ok(sol) => {
                let rep = verify_packing(&inst, &sol.packing, mode);
                if !rep.passed() {
                    bad += 1;
                    println!("seed {seed}: VERIFY FAIL {:?}", rep.failures().iter().take(3).collect::<Vec<_>>());
                } else {
                    println!("seed {seed}: ok items {} {:?} {:.3}s", sol.packing.items.len(), sol.stats.certificates_by_phase, dt);
                }
            }
            Err(e) => {
                bad += 1;
                println!("seed {seed}: ERR {}: {} {:.3}s", e.phase, e.message, dt);
            }
        }
    }
    println!("bad {bad} worst {worst:.3}s");
}
