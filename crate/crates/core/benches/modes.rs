use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use holepack::finalize::{solve, SolveOptions};
use holepack::fixtures::random_grid;
use holepack::geodesics::all_distances;
use holepack::Parallelism;

const MODES: [(&str, Parallelism); 2] = [("parallel", Parallelism::Parallel), ("sequential", Parallelism::Sequential)];

fn distances(c: &mut Criterion) {
    let mut group = c.benchmark_group("all_distances");
    for k in [8, 16] {
        let inst = random_grid(7, k, 3, 10);
        for (name, mode) in MODES {
            group.bench_with_input(BenchmarkId::new(name, format!("GRID{k}")), &inst, |b, inst| {
                b.iter(|| all_distances(black_box(inst), mode))
            });
        }
    }
    group.finish();
}

fn solves(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve");
    group.sample_size(10);
    for k in [6, 8] {
        let inst = random_grid(11, k, 3, 10);
        for (name, mode) in MODES {
            let opts = SolveOptions::with_mode(mode);
            group.bench_with_input(BenchmarkId::new(name, format!("GRID{k}")), &inst, |b, inst| {
                b.iter(|| solve(black_box(inst), &opts).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, distances, solves);
criterion_main!(benches);
