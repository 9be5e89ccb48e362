use std::time::Instant;

use holepack::fixtures::random_grid;
use holepack::twohole::{pack_cuts_small_holes, ReferenceOracle};

fn main() {
    let args: Vec<usize> = std::env::args().skip(1).map(|a| a.parse().unwrap()).collect();
    let (holes, k, seeds, maxlen) = (args[0], args[1], args[2], args[3] as i64);
    let oracle = ReferenceOracle::default();
    let mut worst = 0.0f64;
    let mut fails = 0;
    for seed in 0..seeds as u64 {
        let inst = random_grid(seed, k, holes, maxlen);
        let t = Instant::now();
        let r = pack_cuts_small_holes(&inst, &oracle);
        let dt = t.elapsed().as_secs_f64();
        worst = worst.max(dt);
        match r {
            Ok(p) => println!("seed {seed}: ok {} cuts {:.3}s", p.cuts.len(), dt),
            Err(e) => {
                fails += 1;
                println!("seed {seed}: FAIL {e} {:.3}s", dt)
            }
        }
    }
    println!("fails {fails} worst {worst:.3}s");
}
