use std::time::Instant;

use holepack::fixtures::random_grid;
use holepack::geodesics::all_distances;
use holepack::preprocess::{conditions_hold, preprocess};
use holepack::Parallelism;

fn main() {
    let args: Vec<usize> = std::env::args().skip(1).map(|a| a.parse().unwrap()).collect();
    let (holes, k, seeds, maxlen) = (args[0], args[1], args[2], args[3] as i64);
    let mode = Parallelism::Parallel;
    let mut bad = 0;
    for seed in 0..seeds as u64 {
        let inst = random_grid(seed, k, holes, maxlen);
        let t = Instant::now();
        let (out, trace) = preprocess(&inst, mode).unwrap();
        let dt = t.elapsed().as_secs_f64();
        let cond = conditions_hold(&out, mode);
        let dec = trace.strictly_decreasing();
        // hole distance check
        let d0 = all_distances(&inst, mode);
        let d1 = all_distances(&out, mode);
        let mut ok = true;
        for (s, t2) in inst.graph.terminal_pairs() {
            let (a, b) = (inst.graph.vertex_id(s), inst.graph.vertex_id(t2));
            let rep = |x| {
                let mut x = x;
                for (gone, keep) in trace.merges() { if gone == x { x = keep; } }
                x
            };
            let (ra, rb) = (rep(a), rep(b));
            let (ia, ib) = (out.graph.vertex_index(ra).unwrap(), out.graph.vertex_index(rb).unwrap());
            if d1.get(ia, ib) != d0.get(s, t2) { ok = false; }
        }
        if cond.is_err() || !dec || !ok { bad += 1; }
        println!("seed {seed}: steps {} V {} E {} holes {} cond {:?} dec {dec} dist {ok} {:.3}s",
            trace.steps.len(), out.graph.vertex_count(), out.graph.edge_count(), out.graph.holes().len(), cond, dt);
    }
    println!("bad {bad}");
}
