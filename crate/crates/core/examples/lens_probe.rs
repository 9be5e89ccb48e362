use holepack::fixtures::{lens, random_grid};
use holepack::geodesics::{all_distances, find_0lens};
use holepack::preprocess::{conditions_hold, preprocess_pieces};
use holepack::Parallelism;

fn main() {
    let mode = Parallelism::Parallel;
    let f = lens();
    let d = all_distances(&f, mode);
    println!("fixture: {:?}", find_0lens(&f, &d, mode).map(|w| (w.x, w.y, w.faces)));
    let (mut found, mut cond, mut pieces, mut dec) = (0, 0, 0, 0);
    for k in 4..=8 {
        for seed in 0..50u64 {
            let inst = random_grid(seed, k, 3, 10);
            for p in preprocess_pieces(&inst, mode).unwrap() {
                pieces += 1;
                let d = all_distances(&p.instance, mode);
                if let Err(e) = conditions_hold(&p.instance, mode) { cond += 1; println!("k {k} seed {seed}: {e}"); }
                if !p.trace.strictly_decreasing() { dec += 1; println!("k {k} seed {seed}: init ({},{}) steps {:?}", p.trace.initial_edges, p.trace.initial_eta, p.trace.steps.iter().map(|s| (s.op, s.edges, s.eta)).collect::<Vec<_>>()); }
                if let Some(w) = find_0lens(&p.instance, &d, mode) {
                    found += 1;
                    println!("k {k} seed {seed}: lens {:?}", (w.x, w.y, w.faces.len()));
                }
            }
        }
    }
    println!("pieces {pieces} lens {found} cond {cond} nondec {dec}");
}
