use std::collections::BTreeMap;

use holepack::finalize::{solve, SolveOptions};
use holepack::fixtures::random_grid;
use holepack::geodesics::all_distances;
use holepack::reduce::{build_necklace, hole_type, procedure_two, reduction_one, NecklaceOutcome, ReduceContext};
use holepack::twohole::ReferenceOracle;
use holepack::{Instance, Parallelism};

fn main() {
    let args: Vec<usize> = std::env::args().skip(1).map(|a| a.parse().unwrap()).collect();
    let (holes, k, seeds, maxlen) = (args[0], args[1], args[2], args[3] as i64);
    let mode = Parallelism::Parallel;
    let oracle = ReferenceOracle::with_mode(mode);
    let ctx = ReduceContext { mode, oracle: &oracle };
    let (mut states, mut nontrivial, mut bad) = (0, 0, 0);
    for seed in 0..seeds as u64 {
        let inst = random_grid(seed, k, holes, maxlen);
        let opts = SolveOptions { record_trace: true, ..SolveOptions::with_mode(mode) };
        let Ok(sol) = solve(&inst, &opts) else { continue };
        for f in sol.trace.iter().filter(|f| f.label.starts_with("reduction III") || f.label == "three paths") {
            let lengths: BTreeMap<_, _> = f.snapshot.lengths.iter().copied().collect();
            let cur = Instance::from_spec(&f.snapshot.spec, &lengths).unwrap();
            let dist = all_distances(&cur, mode);
            if reduction_one(&cur, &dist, &ctx).unwrap().is_some() || !matches!(procedure_two(&cur, &ctx).unwrap(), NecklaceOutcome::Clean) {
                println!("seed {seed} {}: not a post-II state", f.label);
                continue;
            }
            states += 1;
            for &h in cur.graph.holes() {
                let res = build_necklace(&cur, &dist, h).map_err(|e| e.to_string()).and_then(|n| {
                    if !n.edge_rule_violations(&cur).is_empty() {
                        return Err("edge rule".to_string());
                    }
                    n.check_cycles(&cur, 100_000)?;
                    let (_, dl) = n.maximal_region(&cur, 100_000);
                    if dl != n.sigma {
                        return Err(format!("maximal cycle length {dl} vs {}", n.sigma));
                    }
                    let tau = hole_type(&cur, &dist, h, 256);
                    if tau == 0 && !n.trivial {
                        return Err("type 0 with nontrivial necklace".to_string());
                    }
                    Ok(n.trivial)
                });
                match res {
                    Ok(true) => {}
                    Ok(false) => nontrivial += 1,
                    Err(e) => {
                        bad += 1;
                        println!("seed {seed} {} hole {h}: {e}", f.label);
                    }
                }
            }
        }
    }
    println!("states {states} nontrivial {nontrivial} bad {bad}");
}
