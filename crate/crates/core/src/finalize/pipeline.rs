//! The top-level solve loop.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::Parallelism;
use crate::metricspace::{CutMetric, Metric, VertexSet, WeightedPacking};
use crate::planar::{EdgeId, Instance, RotationSpec, VertexId};
use crate::preprocess::preprocess;
use crate::reduce::{self, ReduceContext, StepAction};
use crate::twohole::{
    apply_certificate, certify_reduction, make_certificate, pack_cuts_small_holes, simple_pieces,
    MonotonicityCheck, ReductionCertificate, ReferenceOracle,
};

use super::{balance_paths, emit_solution, in_two_inner_faces_state, inner_faces, star_transform, theta_paths};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{phase}: {message}")]
pub struct SolveError {
    pub phase: String,
    pub message: String,
    /// The instance the failing phase was working on.
    pub snapshot: Option<Box<Snapshot>>,
}

/// An instance in external form, for replay.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Snapshot {
    pub spec: RotationSpec,
    pub lengths: Vec<(EdgeId, i64)>,
}

impl Snapshot {
    pub fn of(inst: &Instance) -> Snapshot {
        let g = &inst.graph;
        Snapshot {
            spec: g.to_spec(),
            lengths: (0..g.edge_count()).map(|e| (g.edge_id(e), inst.lengths[e])).collect(),
        }
    }
}

/// One drawing-worthy state of a run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceFrame {
    pub label: String,
    pub snapshot: Snapshot,
    /// Cut sides applied in this step.
    pub cuts: Vec<VertexSet>,
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub mode: Parallelism,
    /// Monotonicity re-check level; `None` means full below 50 vertices and
    /// sampled above.
    pub monotonicity: Option<MonotonicityCheck>,
    pub record_trace: bool,
    /// Run the faithful reduction phases before the generic good-cut search.
    pub structured_phases: bool,
    pub oracle: ReferenceOracle,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            mode: Parallelism::Parallel,
            monotonicity: None,
            record_trace: false,
            structured_phases: true,
            oracle: ReferenceOracle::default(),
        }
    }
}

impl SolveOptions {
    pub fn with_mode(mode: Parallelism) -> Self {
        SolveOptions { mode, oracle: ReferenceOracle::with_mode(mode), ..Default::default() }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveStats {
    pub preprocess_steps: usize,
    pub oracle_calls: usize,
    /// Certificates per producing phase.
    pub certificates_by_phase: BTreeMap<String, usize>,
    pub block_splits: usize,
    /// Reduction I certificates in the largest block, bounded by `|V|^2`.
    pub reduction_one_max: usize,
    /// Reduction III iterations in the largest block, bounded by `|V|^3`.
    pub reduction_three_max: usize,
    pub star_transforms: usize,
    pub endgames: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Solution {
    pub packing: WeightedPacking,
    pub certificates: Vec<ReductionCertificate>,
    pub trace: Vec<TraceFrame>,
    pub stats: SolveStats,
}

/// Which current vertex carries which vertices of the instance being solved.
struct Lift {
    members: BTreeMap<VertexId, Vec<VertexId>>,
    universe: VertexSet,
}

impl Lift {
    fn new(inst: &Instance) -> Lift {
        let ids = inst.graph.vertex_ids();
        Lift { members: ids.iter().map(|&v| (v, vec![v])).collect(), universe: ids.iter().copied().collect() }
    }

    fn merge(&mut self, merges: impl IntoIterator<Item = (VertexId, VertexId)>) {
        for (gone, keep) in merges {
            let moved = self.members.remove(&gone).unwrap_or_default();
            self.members.entry(keep).or_default().extend(moved);
        }
    }

    fn image(&self, v: VertexId) -> Vec<VertexId> {
        self.members.get(&v).cloned().unwrap_or_default()
    }

    fn metric(&self, m: &Metric) -> Option<Metric> {
        let out = m.map_vertices(|v| self.image(v))?;
        match &out {
            Metric::Cut(c) if c.side.len() == self.universe.len() => None,
            _ => Some(out),
        }
    }
}

struct Solver<'a> {
    opts: &'a SolveOptions,
    certificates: Vec<ReductionCertificate>,
    trace: Vec<TraceFrame>,
    stats: SolveStats,
}

/// Solve an instance with at most three holes.
pub fn solve(inst: &Instance, opts: &SolveOptions) -> Result<Solution, SolveError> {
    let holes = inst.graph.holes().len();
    if holes > 3 {
        return Err(SolveError {
            phase: "input".into(),
            message: format!("{holes} holes, at most three are supported"),
            snapshot: None,
        });
    }
    inst.parity_potential().map_err(|e| SolveError { phase: "input".into(), message: e.to_string(), snapshot: None })?;
    let mut solver = Solver { opts, certificates: Vec::new(), trace: Vec::new(), stats: SolveStats::default() };
    if opts.record_trace {
        solver.frame("input", inst, Vec::new());
    }
    let mut packing = solver.solve_rec(inst.clone(), 0)?;
    let all: VertexSet = inst.graph.vertex_ids().iter().copied().collect();
    packing = packing.canonical(&all);
    if opts.record_trace {
        let cuts = packing
            .items
            .iter()
            .filter_map(|(m, _)| match m {
                Metric::Cut(c) => Some(c.side.clone()),
                Metric::TwoThree(_) => None,
            })
            .collect();
        solver.frame("solution", inst, cuts);
    }
    Ok(Solution { packing, certificates: solver.certificates, trace: solver.trace, stats: solver.stats })
}

fn err(phase: &str, message: impl ToString, inst: &Instance) -> SolveError {
    SolveError { phase: phase.to_string(), message: message.to_string(), snapshot: Some(Box::new(Snapshot::of(inst))) }
}

impl Solver<'_> {
    fn frame(&mut self, label: &str, inst: &Instance, cuts: Vec<VertexSet>) {
        self.trace.push(TraceFrame { label: label.to_string(), snapshot: Snapshot::of(inst), cuts });
    }

    fn monotonicity(&self, inst: &Instance) -> MonotonicityCheck {
        self.opts.monotonicity.unwrap_or(if inst.graph.vertex_count() <= 50 {
            MonotonicityCheck::Full
        } else {
            MonotonicityCheck::Sampled
        })
    }

    /// Certify and apply one reduction, recording its cuts.
    fn apply(
        &mut self,
        cur: &Instance,
        cert: ReductionCertificate,
        lift: &Lift,
        out: &mut WeightedPacking,
    ) -> Result<Instance, SolveError> {
        let check = certify_reduction(cur, &cert, self.monotonicity(cur), self.opts.mode);
        if !check.ok {
            return Err(err(&cert.phase, format!("certification failed: {}", check.diagnostics.join("; ")), cur));
        }
        for (x, w) in &cert.cuts {
            if let Some(m) = lift.metric(&Metric::Cut(CutMetric::new(x.clone()))) {
                out.push(m, *w);
            }
        }
        *self.stats.certificates_by_phase.entry(cert.phase.clone()).or_insert(0) += 1;
        let next = apply_certificate(cur, &cert);
        if self.opts.record_trace {
            let label = format!("{} {}", cert.phase, self.certificates.len() + 1);
            self.frame(&label, cur, cert.cuts.iter().map(|(x, _)| x.clone()).collect());
        }
        self.certificates.push(cert);
        Ok(next)
    }

    fn solve_rec(&mut self, inst: Instance, depth: usize) -> Result<WeightedPacking, SolveError> {
        if depth > 256 {
            return Err(err("pipeline", "block recursion too deep", &inst));
        }
        let mut lift = Lift::new(&inst);
        let mut out = WeightedPacking::default();
        let mut cur = inst;
        let n0 = cur.graph.vertex_count().max(1);
        let budget = 4 * n0 * n0 * n0 + 1000;
        let mut rounds = 0usize;
        let (mut red_one, mut red_three) = (0usize, 0usize);
        loop {
            rounds += 1;
            if rounds > budget {
                return Err(err("pipeline", "round budget exceeded", &cur));
            }
            let (norm, log) = cur.normalize().map_err(|e| err("normalize", e, &cur))?;
            lift.merge(log.merges);
            cur = norm;
            let g = &cur.graph;
            if g.holes().is_empty() || g.terminal_pairs().is_empty() {
                return Ok(out);
            }
            if !cur.is_biconnected() {
                self.stats.block_splits += 1;
                let dec = cur.blocks().map_err(|e| err("blocks", e, &cur))?;
                for block in &dec.blocks {
                    let bg = &block.instance.graph;
                    if bg.holes().is_empty() {
                        continue;
                    }
                    let sub = if bg.edge_count() == 1 {
                        let mut p = WeightedPacking::default();
                        p.push(Metric::Cut(CutMetric::new(VertexSet::from([bg.vertex_id(0)]))), block.instance.lengths[0]);
                        p
                    } else {
                        self.solve_rec(block.instance.clone(), depth + 1)?
                    };
                    for (m, w) in sub.items {
                        let lifted = m.map_vertices(|v| {
                            let mut vs = vec![v];
                            vs.extend(block.attach.iter().filter(|&(_, &a)| a == v).map(|(&x, _)| x));
                            vs
                        });
                        if let Some(m) = lifted.and_then(|m| lift.metric(&m)) {
                            out.push(m, w);
                        }
                    }
                }
                return Ok(out);
            }
            if g.holes().len() <= 2 {
                self.stats.oracle_calls += 1;
                let packing = pack_cuts_small_holes(&cur, &self.opts.oracle).map_err(|e| err("oracle", e, &cur))?;
                for (x, w) in packing.cuts {
                    if let Some(m) = lift.metric(&Metric::Cut(CutMetric::new(x))) {
                        out.push(m, w);
                    }
                }
                return Ok(out);
            }
            let (pre, trace) = preprocess(&cur, self.opts.mode).map_err(|e| err("preprocess", e, &cur))?;
            self.stats.preprocess_steps += trace.steps.len();
            lift.merge(trace.merges());
            let changed = !trace.steps.is_empty();
            cur = pre;
            if changed && self.opts.record_trace {
                self.frame("preprocess", &cur, Vec::new());
            }
            if cur.graph.c1_violation().is_some() || cur.graph.holes().len() < 3 {
                continue;
            }
            if self.opts.structured_phases {
                let ctx = ReduceContext { mode: self.opts.mode, oracle: &self.opts.oracle };
                if let Some(step) = reduce::next_step(&cur, &ctx).map_err(|e| err("reduce", e, &cur))? {
                    self.stats.oracle_calls += step.oracle_calls;
                    match step.phase {
                        "reduction I" => {
                            red_one += 1;
                            if red_one > n0 * n0 {
                                return Err(err("reduction I", format!("more than {} certificates", n0 * n0), &cur));
                            }
                            self.stats.reduction_one_max = self.stats.reduction_one_max.max(red_one);
                        }
                        "reduction III" => {
                            red_three += 1;
                            if red_three > n0 * n0 * n0 {
                                return Err(err("reduction III", format!("more than {} iterations", n0 * n0 * n0), &cur));
                            }
                            self.stats.reduction_three_max = self.stats.reduction_three_max.max(red_three);
                        }
                        _ => {}
                    }
                    for action in step.actions {
                        match action {
                            StepAction::Replace { instance, merges } => {
                                lift.merge(merges);
                                cur = instance;
                            }
                            StepAction::Reduce(cert) => {
                                cur = self.apply(&cur, cert, &lift, &mut out)?;
                            }
                        }
                    }
                    continue;
                }
            }
            if inner_faces(&cur).is_empty() {
                if theta_paths(&cur).is_some() {
                    match balance_paths(&cur) {
                        Ok((_, form)) => {
                            self.stats.endgames += 1;
                            if self.opts.record_trace {
                                self.frame("three paths", &cur, Vec::new());
                            }
                            for (m, w) in emit_solution(&form).items {
                                if let Some(m) = lift.metric(&m) {
                                    out.push(m, w);
                                }
                            }
                            return Ok(out);
                        }
                        Err(super::FinalizeError::UnequalPathLengths(_)) => {}
                        Err(e) => return Err(err("balance", e, &cur)),
                    }
                }
            } else if in_two_inner_faces_state(&cur) {
                let (star, _) = star_transform(&cur).map_err(|e| err("star", e, &cur))?;
                self.stats.star_transforms += 1;
                if self.opts.record_trace {
                    self.frame("star", &star, Vec::new());
                }
                cur = star;
                continue;
            }
            cur = self.generic_step(cur, &lift, &mut out)?;
        }
    }

    /// Apply the best good cut found by the boundary-pattern search.
    fn generic_step(&mut self, cur: Instance, lift: &Lift, out: &mut WeightedPacking) -> Result<Instance, SolveError> {
        let search = ReferenceOracle { candidate_limit: 200_000, ..self.opts.oracle.clone() };
        let (x, w) = search.find_good_cut(&cur).map_err(|e| err("good cut", e, &cur))?;
        let cuts: Vec<(VertexSet, i64)> = simple_pieces(&cur.graph, &x).into_iter().map(|p| (p, w)).collect();
        let mut registers = BTreeMap::new();
        registers.insert("weight".to_string(), w);
        let cert = make_certificate(&cur, "good cut", cuts, registers);
        self.apply(&cur, cert, lift, out)
    }
}
