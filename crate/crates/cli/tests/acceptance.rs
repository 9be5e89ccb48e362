//! End-to-end acceptance run. Every criterion prints one PASS/FAIL line;
//! the test fails if any criterion fails.

use std::collections::{BTreeMap, BTreeSet};
use std::process::Command;
use std::time::{Duration, Instant};

use holepack::finalize::{emit_solution, solve, Solution, SolveOptions, ThreePathForm};
use holepack::fixtures::{lens, random_grid};
use holepack::geodesics::{all_distances, find_0lens};
use holepack::metricspace::{face_crossings, is_simple_cut, verify_packing, Metric};
use holepack::preprocess::{conditions_hold, preprocess_pieces, PreprocessTrace};
use holepack::reduce::{build_necklace, hole_type, procedure_two, reduction_one, NecklaceOutcome, ReduceContext};
use holepack::twohole::{
    certify_reduction, pack_cuts_small_holes, CutPacking, MonotonicityCheck, ReferenceOracle,
};
use holepack::{Instance, Parallelism};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MODE: Parallelism = Parallelism::Parallel;
const FULL_SCAN_LIMIT: usize = 50;

struct Report {
    failed: Vec<String>,
}

impl Report {
    fn record(&mut self, id: usize, name: &str, errors: &[String], summary: String) {
        if errors.is_empty() {
            println!("criterion {id:>2} PASS  {name}: {summary}");
        } else {
            println!("criterion {id:>2} FAIL  {name}: {summary}; {} problems, first: {}", errors.len(), errors[0]);
            self.failed.push(name.to_string());
        }
    }
}

fn corpus() -> Vec<(String, Instance)> {
    (0..200u64)
        .map(|i| {
            let k = 4 + (i % 5) as usize;
            (format!("GRID{k} seed {i}"), random_grid(i, k, 3, 10))
        })
        .collect()
}

fn instance_of(snapshot: &holepack::finalize::Snapshot) -> Instance {
    let lengths: BTreeMap<_, _> = snapshot.lengths.iter().copied().collect();
    Instance::from_spec(&snapshot.spec, &lengths).expect("trace snapshot rebuilds")
}

/// Floyd-Warshall on an explicit weighted edge list.
fn floyd(n: usize, edges: &[(usize, usize, i64)]) -> Vec<Vec<i64>> {
    let inf = i64::MAX / 4;
    let mut d = vec![vec![inf; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0;
    }
    for &(a, b, l) in edges {
        d[a][b] = d[a][b].min(l);
        d[b][a] = d[b][a].min(l);
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    d
}

fn instance_distances(inst: &Instance) -> Vec<Vec<i64>> {
    let g = &inst.graph;
    let edges: Vec<_> = (0..g.edge_count())
        .map(|e| {
            let [u, v] = g.ends(e);
            (u, v, inst.lengths[e])
        })
        .collect();
    floyd(g.vertex_count(), &edges)
}

fn certificate_frames(sol: &Solution) -> Vec<(usize, Instance)> {
    sol.trace
        .iter()
        .filter_map(|f| {
            let (phase, idx) = f.label.rsplit_once(' ')?;
            let idx: usize = idx.parse().ok()?;
            (idx >= 1 && idx <= sol.certificates.len() && sol.certificates[idx - 1].phase == phase)
                .then(|| (idx - 1, instance_of(&f.snapshot)))
        })
        .collect()
}

fn check_necklaces(cur: &Instance, ctx: &ReduceContext) -> Result<usize, String> {
    let dist = all_distances(cur, MODE);
    if reduction_one(cur, &dist, ctx).map_err(|e| e.to_string())?.is_some()
        || !matches!(procedure_two(cur, ctx).map_err(|e| e.to_string())?, NecklaceOutcome::Clean)
    {
        return Ok(0);
    }
    for &h in cur.graph.holes() {
        let n = build_necklace(cur, &dist, h).map_err(|e| e.to_string())?;
        if let Some(v) = n.edge_rule_violations(cur).first() {
            return Err(format!("hole {h}: edge rule violated at {v:?}"));
        }
        n.check_cycles(cur, 200_000).map_err(|e| format!("hole {h}: {e}"))?;
        if hole_type(cur, &dist, h, 256) == 0 && !n.trivial {
            return Err(format!("hole {h}: type 0 but the necklace is not trivial"));
        }
    }
    Ok(1)
}

#[test]
fn acceptance() {
    let mut report = Report { failed: Vec::new() };
    let instances = corpus();

    let mut solutions = Vec::new();
    let mut errs1 = Vec::new();
    let mut slowest = Duration::ZERO;
    for (name, inst) in &instances {
        let opts = SolveOptions { record_trace: true, ..SolveOptions::with_mode(MODE) };
        let start = Instant::now();
        let res = solve(inst, &opts);
        let took = start.elapsed();
        slowest = slowest.max(took);
        match res {
            Ok(sol) => {
                let rep = verify_packing(inst, &sol.packing, MODE);
                if !rep.passed() {
                    errs1.push(format!("{name}: {}", rep.failures().join("; ")));
                }
                if took > Duration::from_secs(10) {
                    errs1.push(format!("{name}: took {took:?}"));
                }
                solutions.push((name, inst, sol));
            }
            Err(e) => errs1.push(format!("{name}: {e}")),
        }
    }
    report.record(
        1,
        "end-to-end correctness",
        &errs1,
        format!("{}/200 verified, slowest {:.3}s", 200 - errs1.len(), slowest.as_secs_f64()),
    );

    let mut errs2 = Vec::new();
    let mut metrics = (0, 0);
    for (name, inst, sol) in &solutions {
        let ids: BTreeSet<_> = inst.graph.vertex_ids().iter().copied().collect();
        for (m, w) in &sol.packing.items {
            if *w <= 0 {
                errs2.push(format!("{name}: weight {w}"));
            }
            match m {
                Metric::Cut(c) => {
                    metrics.0 += 1;
                    if c.side.is_empty() || c.side.len() >= ids.len() || !c.side.is_subset(&ids) {
                        errs2.push(format!("{name}: degenerate cut"));
                    }
                }
                Metric::TwoThree(t) => {
                    metrics.1 += 1;
                    let union: BTreeSet<_> = t.s.iter().chain(t.t.iter()).flatten().copied().collect();
                    if !t.blocks_disjoint() || union != ids || t.s.iter().chain(t.t.iter()).any(|b| b.is_empty()) {
                        errs2.push(format!("{name}: malformed (2,3)-metric"));
                    }
                }
            }
        }
    }
    report.record(2, "integrality", &errs2, format!("{} cuts, {} (2,3)-metrics", metrics.0, metrics.1));

    let mut errs3 = Vec::new();
    let mut errs4 = Vec::new();
    let mut certs = 0;
    for (name, _, sol) in &solutions {
        let frames = certificate_frames(sol);
        if frames.len() != sol.certificates.len() {
            errs3.push(format!("{name}: {} certificates but {} snapshots", sol.certificates.len(), frames.len()));
        }
        for (i, before) in frames {
            certs += 1;
            let cert = &sol.certificates[i];
            let exact = certify_reduction(&before, cert, MonotonicityCheck::None, MODE);
            if !exact.ok {
                errs3.push(format!("{name} certificate {i}: {}", exact.diagnostics.join("; ")));
                continue;
            }
            let level = if before.graph.vertex_count() <= FULL_SCAN_LIMIT {
                MonotonicityCheck::Full
            } else {
                MonotonicityCheck::Sampled
            };
            let mono = certify_reduction(&before, cert, level, MODE);
            if !mono.ok {
                errs4.push(format!("{name} certificate {i}: {}", mono.diagnostics.join("; ")));
            }
        }
    }
    report.record(3, "good-reduction certification", &errs3, format!("{certs} certificates re-checked"));
    report.record(4, "zero-excess monotonicity", &errs4, format!("{certs} certificates re-checked"));

    let mut errs5 = Vec::new();
    let mut errs6 = Vec::new();
    let mut pieces_seen = 0;
    for (name, inst) in &instances {
        let pieces = match preprocess_pieces(inst, MODE) {
            Ok(p) => p,
            Err(e) => {
                errs5.push(format!("{name}: {e}"));
                continue;
            }
        };
        for piece in pieces {
            pieces_seen += 1;
            if let Err(e) = conditions_hold(&piece.instance, MODE) {
                errs5.push(format!("{name}: {e}"));
            }
            let t: &PreprocessTrace = &piece.trace;
            if t.steps.len() > t.budget {
                errs5.push(format!("{name}: {} steps over budget {}", t.steps.len(), t.budget));
            }
            if !t.strictly_decreasing() {
                errs5.push(format!("{name}: |E| + 2 eta does not strictly decrease"));
            }
            if piece.instance.graph.vertex_count() <= FULL_SCAN_LIMIT {
                let dist = all_distances(&piece.instance, MODE);
                if let Some(w) = find_0lens(&piece.instance, &dist, MODE) {
                    errs6.push(format!("{name}: lens between {} and {}", w.x, w.y));
                }
            }
        }
    }
    let fixture = lens();
    if find_0lens(&fixture, &all_distances(&fixture, MODE), MODE).is_none() {
        errs6.push("no witness on the lens fixture".to_string());
    }
    report.record(5, "preprocessing postconditions", &errs5, format!("{pieces_seen} pieces"));
    report.record(6, "no 0-lens", &errs6, format!("{pieces_seen} pieces scanned, fixture witnessed"));

    let oracle = ReferenceOracle::with_mode(MODE);
    let ctx = ReduceContext { mode: MODE, oracle: &oracle };
    let mut errs7 = Vec::new();
    let mut states = 0;
    for (name, _, sol) in &solutions {
        for f in sol.trace.iter().filter(|f| f.label.starts_with("reduction III") || f.label == "three paths") {
            let cur = instance_of(&f.snapshot);
            if cur.graph.vertex_count() > FULL_SCAN_LIMIT || cur.graph.holes().len() != 3 {
                continue;
            }
            match check_necklaces(&cur, &ctx) {
                Ok(c) => states += c,
                Err(e) => errs7.push(format!("{name} {}: {e}", f.label)),
            }
        }
    }
    report.record(7, "necklace invariants", &errs7, format!("{states} three-hole states checked"));

    let mut errs8 = Vec::new();
    let mut cuts8 = 0;
    for i in 0..100u64 {
        let holes = 1 + (i % 2) as usize;
        let k = 3 + (i % 3) as usize;
        let raw = random_grid(1000 + i, k, holes, 10);
        let inst = raw.normalize().map(|(n, _)| n).unwrap_or(raw);
        let name = format!("GRID{k} seed {} ({holes} holes)", 1000 + i);
        match pack_cuts_small_holes(&inst, &oracle) {
            Ok(CutPacking { cuts }) => {
                let g = &inst.graph;
                let d = instance_distances(&inst);
                let mut load = vec![0i64; g.edge_count()];
                for (x, w) in &cuts {
                    cuts8 += 1;
                    if *w <= 0 || !is_simple_cut(g, x) {
                        errs8.push(format!("{name}: cut not simple or weight {w}"));
                    }
                    if face_crossings(g, x).iter().any(|&c| c != 0 && c != 2) {
                        errs8.push(format!("{name}: a face is crossed other than 0 or 2 times"));
                    }
                    for (e, l) in load.iter_mut().enumerate() {
                        let [u, v] = g.ends(e);
                        if x.contains(&g.vertex_id(u)) != x.contains(&g.vertex_id(v)) {
                            *l += w;
                        }
                    }
                }
                if (0..g.edge_count()).any(|e| load[e] > inst.lengths[e]) {
                    errs8.push(format!("{name}: an edge is overloaded"));
                }
                for &h in g.holes() {
                    let vs = g.face_vertices(h);
                    for &a in &vs {
                        for &b in &vs {
                            let (s, t) = (g.vertex_id(a), g.vertex_id(b));
                            let sep: i64 = cuts.iter().filter(|(x, _)| x.contains(&s) != x.contains(&t)).map(|(_, w)| w).sum();
                            if sep != d[a][b] {
                                errs8.push(format!("{name}: pair {s}-{t} distance {} separated {sep}", d[a][b]));
                            }
                        }
                    }
                }
            }
            Err(e) => errs8.push(format!("{name}: {e}")),
        }
    }
    errs8.dedup();
    report.record(8, "two-hole oracle", &errs8, format!("100 instances, {cuts8} cuts"));

    let mut errs9 = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut pairs9 = 0;
    for i in 0..50 {
        let k: usize = rng.gen_range(1..=12);
        let half: Vec<i64> = (0..k / 2).map(|_| rng.gen_range(1..=9)).collect();
        let mut lambda = half.clone();
        if k % 2 == 1 {
            lambda.push(rng.gen_range(1..=9));
        }
        lambda.extend(half.iter().rev());
        let form = ThreePathForm::synthetic(lambda.clone());
        if let Err(e) = form.validate() {
            errs9.push(format!("form {i}: {e}"));
            continue;
        }
        let packing = emit_solution(&form);
        let vs: Vec<_> = form.vertices().into_iter().collect();
        let idx: BTreeMap<_, _> = vs.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let edges: Vec<_> = form
            .paths
            .iter()
            .flat_map(|p| p.windows(2).enumerate().map(|(r, w)| (idx[&w[0]], idx[&w[1]], lambda[r])).collect::<Vec<_>>())
            .collect();
        let d = floyd(vs.len(), &edges);
        for (a, &u) in vs.iter().enumerate() {
            for (b, &v) in vs.iter().enumerate() {
                pairs9 += 1;
                let got: i64 = packing.items.iter().map(|(m, w)| i64::from(m.eval(u, v).unwrap()) * w).sum();
                if got != d[a][b] {
                    errs9.push(format!("form {i} {lambda:?}: pair {u}-{v} packed {got}, distance {}", d[a][b]));
                }
            }
        }
    }
    report.record(9, "endgame exactness", &errs9, format!("50 forms, {pairs9} ordered pairs"));

    let mut errs10 = Vec::new();
    let (mut max1, mut max3) = (0, 0);
    for (name, inst, sol) in &solutions {
        let n = inst.graph.vertex_count();
        max1 = max1.max(sol.stats.reduction_one_max);
        max3 = max3.max(sol.stats.reduction_three_max);
        if sol.stats.reduction_one_max > n * n || sol.stats.reduction_three_max > n * n * n {
            errs10.push(format!("{name}: budgets exceeded"));
        }
    }
    if solutions.len() != instances.len() {
        errs10.push("some solves did not finish".to_string());
    }
    report.record(10, "iteration budgets", &errs10, format!("max Reduction I {max1}, max Reduction III {max3}"));

    let mut errs11 = Vec::new();
    let dir = tempfile::tempdir().unwrap();
    let bin = env!("CARGO_BIN_EXE_holepack");
    for (seed, k) in [(3u64, 5usize), (11, 6), (42, 7)] {
        let inst_path = dir.path().join(format!("g{seed}.txt"));
        let gen = Command::new(bin)
            .args(["gen", "--seed", &seed.to_string(), "--k", &k.to_string(), "--max-len", "10", "-o"])
            .arg(&inst_path)
            .status()
            .unwrap();
        if !gen.success() {
            errs11.push(format!("gen seed {seed} failed"));
            continue;
        }
        let mut outputs = Vec::new();
        for run in 0..2 {
            let trace = dir.path().join(format!("t{seed}_{run}"));
            let sol = dir.path().join(format!("s{seed}_{run}.sol"));
            let ok = Command::new(bin).arg("solve").arg(&inst_path).arg("--trace").arg(&trace).arg("-o").arg(&sol).status().unwrap();
            if !ok.success() {
                errs11.push(format!("solve seed {seed} run {run} failed"));
            }
            let read = |p: std::path::PathBuf| std::fs::read(p).unwrap_or_default();
            outputs.push([
                read(sol),
                read(trace.join("trace.json")),
                read(trace.join("certificates.json")),
                read(trace.join("stats.json")),
            ]);
        }
        if outputs[0] != outputs[1] || outputs[0].iter().any(|b| b.is_empty()) {
            errs11.push(format!("seed {seed}: outputs differ between runs"));
        }
    }
    report.record(11, "determinism", &errs11, "3 instances solved twice through the binary".to_string());

    assert!(report.failed.is_empty(), "failed criteria: {:?}", report.failed);
}
