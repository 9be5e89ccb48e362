//! Preprocessing: shorten edges, add and remove edges until every pair of
//! vertices sharing a face is tight and no face has a dominating edge, while
//! keeping all terminal distances and the cyclic evenness of the lengths.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::Parallelism;
use crate::geodesics::{all_distances, DistanceTable};
use crate::planar::{EdgeId, Instance, PlanarError, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PreprocessError {
    #[error("preprocessing did not converge within {budget} steps")]
    NonConvergence { budget: usize },
    #[error(transparent)]
    Planar(#[from] PlanarError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Op {
    /// Contraction of zero-length edges.
    Op1,
    /// Uniform shortening of the edges around a non-tight vertex.
    Op2,
    /// Shortening of a non-tight edge.
    Op3,
    /// Insertion of an edge between non-tight vertices of an inner face.
    Op4,
    /// Deletion of a dominating edge.
    Op5,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreprocessStep {
    pub op: Op,
    /// Vertex ids (OP2, OP4) or the edge id (OP3, OP5) the step acted on.
    pub target: Vec<u32>,
    /// Length changes by edge id; inserted edges carry their new length,
    /// deleted edges the negated old length.
    pub deltas: Vec<(EdgeId, i64)>,
    /// Vertex merges `(removed, kept)` caused by contractions in this step.
    pub merges: Vec<(VertexId, VertexId)>,
    /// Edge count after the step.
    pub edges: usize,
    /// Number of non-tight pairs after the step.
    pub eta: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreprocessTrace {
    pub initial_edges: usize,
    pub initial_eta: usize,
    /// `|E| + 2|V|^2` of the input.
    pub budget: usize,
    pub steps: Vec<PreprocessStep>,
}

impl PreprocessTrace {
    pub fn measure(edges: usize, eta: usize) -> usize {
        edges + 2 * eta
    }

    /// Whether `|E| + 2 eta` strictly decreases at every step.
    pub fn strictly_decreasing(&self) -> bool {
        let mut prev = Self::measure(self.initial_edges, self.initial_eta);
        for s in &self.steps {
            let m = Self::measure(s.edges, s.eta);
            if m >= prev {
                return false;
            }
            prev = m;
        }
        true
    }

    /// All vertex merges in application order.
    pub fn merges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.steps.iter().flat_map(|s| s.merges.iter().copied())
    }
}

/// Distances together with the terminal pairs, for excess queries.
#[derive(Debug, Clone)]
pub struct Tightness {
    pub dist: DistanceTable,
    /// Ordered terminal pairs (both orientations).
    pairs: Vec<(usize, usize)>,
    /// Edges between a tight pair that are longer than the pair's distance.
    slack_edges: usize,
}

impl Tightness {
    pub fn new(inst: &Instance, mode: Parallelism) -> Tightness {
        let dist = all_distances(inst, mode);
        let mut pairs = Vec::new();
        for (s, t) in inst.graph.terminal_pairs() {
            pairs.push((s, t));
            pairs.push((t, s));
        }
        let mut t = Tightness { dist, pairs, slack_edges: 0 };
        let g = &inst.graph;
        t.slack_edges = (0..g.edge_count())
            .filter(|&e| {
                let [x, y] = g.ends(e);
                inst.lengths[e] > t.dist.get(x, y) && t.delta(x, y) == 0
            })
            .count();
        t
    }

    /// Excess of the pair `xy`; `INF`-like when there are no terminal pairs.
    pub fn delta(&self, x: usize, y: usize) -> i64 {
        let d = &self.dist;
        let base = self
            .pairs
            .iter()
            .map(|&(s, t)| d.get(s, x) + d.get(y, t) - d.get(s, t))
            .min()
            .unwrap_or(i64::MAX / 8);
        d.get(x, y) + base
    }

    /// Smallest nonnegative length `a` with the parity of `parity` such that
    /// `d(s x) + a + d(y t) >= d(s t)` for every terminal pair.
    pub fn min_feasible_length(&self, x: usize, y: usize, parity: i64) -> i64 {
        let need = self.required_length(x, y).max(0);
        if (need - parity).rem_euclid(2) == 1 {
            need + 1
        } else {
            need
        }
    }

    /// `max(d(s t) - d(s x) - d(y t))` over terminal pairs; an edge `xy` of
    /// exactly this length is tight.
    pub fn required_length(&self, x: usize, y: usize) -> i64 {
        let d = &self.dist;
        self.pairs.iter().map(|&(s, t)| d.get(s, t) - d.get(s, x) - d.get(y, t)).max().unwrap_or(0)
    }

    /// Number of unordered non-tight pairs, a vertex paired with itself
    /// included, plus the edges joining a tight pair that lie on no
    /// geodesic because they are longer than the distance.
    pub fn eta(&self) -> usize {
        let n = self.dist.size();
        let mut count = self.slack_edges;
        for x in 0..n {
            for y in x..n {
                if self.delta(x, y) > 0 {
                    count += 1;
                }
            }
        }
        count
    }
}

/// A pair of vertices on a common face that is not tight.
pub fn check_c2(inst: &Instance, mode: Parallelism) -> Option<String> {
    let g = &inst.graph;
    let t = Tightness::new(inst, mode);
    for f in 0..g.face_count() {
        let vs = g.face_vertices(f);
        for (i, &x) in vs.iter().enumerate() {
            for &y in &vs[i + 1..] {
                let dl = t.delta(x, y);
                if dl > 0 {
                    return Some(format!(
                        "pair {}-{} on face {:?} has excess {dl}",
                        g.vertex_id(x),
                        g.vertex_id(y),
                        g.face_key(f)
                    ));
                }
            }
        }
    }
    None
}

/// A face with a dominating edge.
pub fn check_c3(inst: &Instance, mode: Parallelism) -> Option<String> {
    let dist = all_distances(inst, mode);
    let g = &inst.graph;
    (0..g.face_count()).find_map(|f| {
        dominating_edge(inst, &dist, f)
            .map(|e| format!("edge {} dominates face {:?}", g.edge_id(e), g.face_key(f)))
    })
}

/// An edge `xy` of face `f` whose distance equals the length of the rest
/// of the face boundary; the one with the smallest id.
pub fn dominating_edge(inst: &Instance, dist: &DistanceTable, f: usize) -> Option<usize> {
    let g = &inst.graph;
    let total = inst.face_length(f);
    g.face_darts(f)
        .iter()
        .filter(|&&d| g.face_of(d ^ 1) != f)
        .filter(|&&d| dist.get(g.tail(d), g.head(d)) == total - inst.len_of(d))
        .map(|&d| d >> 1)
        .min_by_key(|&e| g.edge_id(e))
}

/// Whether C1, C2 and C3 all hold.
pub fn conditions_hold(inst: &Instance, mode: Parallelism) -> Result<(), String> {
    if let Some(v) = inst.graph.c1_violation() {
        return Err(format!("C1: {v}"));
    }
    if let Some(v) = check_c2(inst, mode) {
        return Err(format!("C2: {v}"));
    }
    if let Some(v) = check_c3(inst, mode) {
        return Err(format!("C3: {v}"));
    }
    Ok(())
}

enum Action {
    Op2 { x: usize, amount: i64 },
    Op3 { e: usize, to: i64 },
    Op4 { face: usize, x: usize, y: usize, len: i64 },
    Op5 { e: usize },
}

/// Drive the preprocessing operations to a fixpoint.
///
/// Operations are tried in the order OP2 (vertices), OP3 (edges), OP5
/// (faces), OP4 (face pairs), each on the smallest id first; zero-length
/// edges are contracted right after every change. OP2 lowers every edge at
/// the vertex by the same amount, the smaller of the shortest incident
/// length and half the excess, so that cycle parities are kept.
pub fn preprocess(inst: &Instance, mode: Parallelism) -> Result<(Instance, PreprocessTrace), PreprocessError> {
    let n0 = inst.graph.vertex_count();
    let budget = inst.graph.edge_count() + 2 * n0 * n0;
    let (mut cur, first_log) = inst.normalize()?;
    let mut trace = PreprocessTrace { budget, ..Default::default() };
    let mut tight = Tightness::new(&cur, mode);
    trace.initial_edges = inst.graph.edge_count();
    trace.initial_eta = Tightness::new(inst, mode).eta();
    if !first_log.is_empty() {
        trace.steps.push(PreprocessStep {
            op: Op::Op1,
            target: Vec::new(),
            deltas: Vec::new(),
            merges: first_log.merges.clone(),
            edges: cur.graph.edge_count(),
            eta: tight.eta(),
        });
    }
    loop {
        if cur.graph.c1_violation().is_some() {
            break;
        }
        let Some(action) = next_action(&cur, &tight) else { break };
        if trace.steps.len() >= budget {
            return Err(PreprocessError::NonConvergence { budget });
        }
        let g = &cur.graph;
        let (next, log, op, target, deltas) = match action {
            Action::Op2 { x, amount } => {
                let darts = g.rotation(x).to_vec();
                let deltas = darts.iter().map(|&d| (g.edge_id(d >> 1), -amount)).collect();
                let lens: Vec<(usize, i64)> = darts.iter().map(|&d| (d >> 1, cur.lengths[d >> 1] - amount)).collect();
                let (next, log) = cur.edit_normalized(|dr| {
                    for (e, l) in lens {
                        dr.set_length(e, l);
                    }
                })?;
                (next, log, Op::Op2, vec![g.vertex_id(x)], deltas)
            }
            Action::Op3 { e, to } => {
                let deltas = vec![(g.edge_id(e), to - cur.lengths[e])];
                let (next, log) = cur.edit_normalized(|dr| dr.set_length(e, to))?;
                (next, log, Op::Op3, vec![g.edge_id(e)], deltas)
            }
            Action::Op4 { face, x, y, len } => {
                let darts = g.face_darts(face);
                let gx = *darts.iter().find(|&&d| g.tail(d) == x).expect("x on face");
                let gy = *darts.iter().find(|&&d| g.tail(d) == y).expect("y on face");
                let new_id = cur.fresh_ids().1;
                let (next, log) = cur.edit_normalized(|dr| {
                    dr.insert_before(gx, gy, len);
                })?;
                (next, log, Op::Op4, vec![g.vertex_id(x), g.vertex_id(y)], vec![(new_id, len)])
            }
            Action::Op5 { e } => {
                let deltas = vec![(g.edge_id(e), -cur.lengths[e])];
                let (next, log) = cur.edit_normalized(|dr| dr.delete(e))?;
                (next, log, Op::Op5, vec![g.edge_id(e)], deltas)
            }
        };
        cur = next;
        tight = Tightness::new(&cur, mode);
        trace.steps.push(PreprocessStep {
            op,
            target,
            deltas,
            merges: log.merges,
            edges: cur.graph.edge_count(),
            eta: tight.eta(),
        });
    }
    Ok((cur, trace))
}

/// A biconnected piece left by [`preprocess_pieces`], with the trace of
/// the last preprocessing run that produced it.
#[derive(Debug, Clone)]
pub struct PreprocessedPiece {
    pub instance: Instance,
    pub trace: PreprocessTrace,
}

/// Preprocess, and whenever the graph stops being biconnected, split it
/// into blocks and preprocess every block that still has a pair of
/// terminals. Distances inside a block are those of the whole graph, so
/// each block is an independent instance.
pub fn preprocess_pieces(inst: &Instance, mode: Parallelism) -> Result<Vec<PreprocessedPiece>, PreprocessError> {
    let mut out = Vec::new();
    let mut todo = vec![inst.clone()];
    while let Some(cur) = todo.pop() {
        let (done, trace) = preprocess(&cur, mode)?;
        if done.graph.c1_violation().is_none() || done.is_biconnected() {
            out.push(PreprocessedPiece { instance: done, trace });
            continue;
        }
        let blocks = done.blocks()?;
        for block in blocks.blocks.into_iter().rev() {
            let g = &block.instance.graph;
            if g.edge_count() >= 3 && !g.terminal_pairs().is_empty() {
                todo.push(block.instance);
            }
        }
    }
    Ok(out)
}

fn next_action(inst: &Instance, tight: &Tightness) -> Option<Action> {
    let g = &inst.graph;
    let mut by_vertex: Vec<usize> = (0..g.vertex_count()).collect();
    by_vertex.sort_by_key(|&v| g.vertex_id(v));
    for &x in &by_vertex {
        let dx = tight.delta(x, x);
        if dx > 0 {
            let shortest = g.rotation(x).iter().map(|&d| inst.len_of(d)).min()?;
            let amount = shortest.min(dx / 2);
            if amount > 0 {
                return Some(Action::Op2 { x, amount });
            }
        }
    }
    let mut by_edge: Vec<usize> = (0..g.edge_count()).collect();
    by_edge.sort_by_key(|&e| g.edge_id(e));
    // A shortening that leaves the edge at length 1 and still not tight
    // does not lower the measure; such steps wait until nothing else applies.
    let mut stalled_op3 = None;
    for &e in &by_edge {
        let [x, y] = g.ends(e);
        let dxy = tight.dist.get(x, y);
        if inst.lengths[e] > dxy && tight.delta(x, y) == 0 {
            return Some(Action::Op3 { e, to: dxy });
        }
        if tight.delta(x, y) > 0 {
            let to = tight.min_feasible_length(x, y, inst.lengths[e]);
            if to < inst.lengths[e] {
                if to == 0 || to == tight.required_length(x, y) {
                    return Some(Action::Op3 { e, to });
                }
                stalled_op3.get_or_insert(Action::Op3 { e, to });
            }
        }
    }
    let mut by_face: Vec<usize> = (0..g.face_count()).collect();
    by_face.sort_by_key(|&f| g.face_key(f));
    for &f in &by_face {
        if let Some(e) = dominating_edge(inst, &tight.dist, f) {
            return Some(Action::Op5 { e });
        }
    }
    let mut best: Option<((VertexId, VertexId), Action)> = None;
    for &f in &by_face {
        if g.is_hole(f) {
            continue;
        }
        let vs = g.face_vertices(f);
        let on_face: BTreeSet<usize> = vs.iter().copied().collect();
        for &x in &on_face {
            for &y in &on_face {
                let key = (g.vertex_id(x), g.vertex_id(y));
                if key.0 >= key.1 || g.edge_between(x, y).is_some() {
                    continue;
                }
                if best.as_ref().is_some_and(|(k, _)| *k <= key) {
                    continue;
                }
                if tight.delta(x, y) > 0 {
                    let len = tight.min_feasible_length(x, y, tight.dist.get(x, y));
                    best = Some((key, Action::Op4 { face: f, x, y, len }));
                }
            }
        }
        if best.is_some() {
            break;
        }
    }
    best.map(|(_, a)| a).or(stalled_op3)
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::fixtures::{random_grid, sq_dom, theta};
    use crate::geodesics::all_distances;

    fn representative(trace: &PreprocessTrace, mut v: VertexId) -> VertexId {
        for (gone, keep) in trace.merges() {
            if gone == v {
                v = keep;
            }
        }
        v
    }

    #[test]
    fn square_with_dominating_edge() {
        let inst = sq_dom();
        assert!(check_c3(&inst, Parallelism::Sequential).is_some());
        let (out, trace) = preprocess(&inst, Parallelism::Sequential).unwrap();
        assert!(!trace.steps.is_empty());
        assert!(trace.strictly_decreasing());
        assert!(check_c3(&out, Parallelism::Sequential).is_none());
    }

    #[test]
    fn theta_is_a_fixpoint() {
        let (out, trace) = preprocess(&theta(), Parallelism::Sequential).unwrap();
        assert!(trace.steps.is_empty());
        assert_eq!(out.lengths, theta().lengths);
        assert!(conditions_hold(&out, Parallelism::Sequential).is_ok());
    }

    #[test]
    fn excess_of_a_geodesic_pair_is_zero() {
        let t = Tightness::new(&theta(), Parallelism::Sequential);
        assert_eq!(t.delta(0, 2), 0);
        assert_eq!(t.eta(), 0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn preprocessing_postconditions(seed in 0u64..100_000, k in 4usize..8, max_len in 2i64..30) {
            let inst = random_grid(seed, k, 3, max_len);
            let (out, trace) = preprocess(&inst, Parallelism::Sequential).unwrap();
            prop_assert!(trace.strictly_decreasing());
            prop_assert!(trace.steps.len() <= trace.budget);
            prop_assert!(out.parity_potential().is_ok());
            let (d0, d1) = (all_distances(&inst, Parallelism::Sequential), all_distances(&out, Parallelism::Sequential));
            let g = &inst.graph;
            for (s, t) in g.terminal_pairs() {
                let a = out.graph.vertex_index(representative(&trace, g.vertex_id(s))).unwrap();
                let b = out.graph.vertex_index(representative(&trace, g.vertex_id(t))).unwrap();
                prop_assert_eq!(d1.get(a, b), d0.get(s, t));
            }
            for piece in preprocess_pieces(&inst, Parallelism::Sequential).unwrap() {
                prop_assert!(conditions_hold(&piece.instance, Parallelism::Sequential).is_ok());
                let pi = &piece.instance;
                let dist = all_distances(pi, Parallelism::Sequential);
                for e in 0..pi.graph.edge_count() {
                    let [x, y] = pi.graph.ends(e);
                    prop_assert_eq!(pi.lengths[e], dist.get(x, y));
                }
            }
        }
    }
}
