//! Cut metrics, (2,3)-metrics, weighted packings and the exact verifier.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::Parallelism;
use crate::planar::{EdgeId, Instance, PlanarGraph, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricError {
    #[error("vertex {0} is not covered by the metric")]
    UnknownVertex(VertexId),
}

pub type VertexSet = BTreeSet<VertexId>;

/// Metric of the bipartition `{side, V - side}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CutMetric {
    pub side: VertexSet,
}

/// Metric induced by a map onto the complete bipartite graph K(2,3): blocks
/// `s[0], s[1]` on one side and `t[0], t[1], t[2]` on the other.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TwoThreeMetric {
    pub s: [VertexSet; 2],
    pub t: [VertexSet; 3],
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Metric {
    Cut(CutMetric),
    TwoThree(TwoThreeMetric),
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightedPacking {
    pub items: Vec<(Metric, i64)>,
}

impl CutMetric {
    pub fn new(side: VertexSet) -> CutMetric {
        CutMetric { side }
    }

    pub fn eval(&self, u: VertexId, v: VertexId) -> u8 {
        u8::from(self.side.contains(&u) != self.side.contains(&v))
    }
}

impl TwoThreeMetric {
    fn block(&self, v: VertexId) -> Option<usize> {
        self.s
            .iter()
            .chain(self.t.iter())
            .position(|b| b.contains(&v))
    }

    pub fn eval(&self, u: VertexId, v: VertexId) -> Result<u8, MetricError> {
        let a = self.block(u).ok_or(MetricError::UnknownVertex(u))?;
        let b = self.block(v).ok_or(MetricError::UnknownVertex(v))?;
        Ok(block_distance(a, b))
    }

    /// Whether the five blocks are pairwise disjoint.
    pub fn blocks_disjoint(&self) -> bool {
        let total: usize = self.s.iter().chain(self.t.iter()).map(|b| b.len()).sum();
        let union: BTreeSet<&VertexId> = self.s.iter().chain(self.t.iter()).flatten().collect();
        total == union.len()
    }

    /// Cut sides summing to this metric when the map misses a block of
    /// K(2,3); `None` when every block is nonempty.
    pub fn as_cuts(&self) -> Option<Vec<VertexSet>> {
        if self.s.iter().chain(self.t.iter()).all(|b| !b.is_empty()) {
            return None;
        }
        let ts: Vec<&VertexSet> = self.t.iter().filter(|b| !b.is_empty()).collect();
        let [s0, s1] = &self.s;
        if s0.is_empty() || s1.is_empty() {
            return Some(ts.into_iter().cloned().collect());
        }
        Some(match ts[..] {
            [a, b] => vec![s0.union(a).copied().collect(), s0.union(b).copied().collect()],
            [_] => vec![s0.clone(), s1.clone()],
            _ => vec![s0.clone(), s0.clone()],
        })
    }
}

fn block_distance(a: usize, b: usize) -> u8 {
    if a == b {
        0
    } else if (a < 2) != (b < 2) {
        1
    } else {
        2
    }
}

impl Metric {
    pub fn eval(&self, u: VertexId, v: VertexId) -> Result<u8, MetricError> {
        if u == v {
            return Ok(0);
        }
        match self {
            Metric::Cut(c) => Ok(c.eval(u, v)),
            Metric::TwoThree(m) => m.eval(u, v),
        }
    }
}

impl Metric {
    /// Replace every vertex by its image set under `f`. Returns `None` for a
    /// cut that becomes trivial.
    pub fn map_vertices<F>(&self, f: F) -> Option<Metric>
    where
        F: Fn(VertexId) -> Vec<VertexId>,
    {
        let map_set = |set: &VertexSet| -> VertexSet { set.iter().flat_map(|&v| f(v)).collect() };
        match self {
            Metric::Cut(c) => {
                let side = map_set(&c.side);
                (!side.is_empty()).then(|| Metric::Cut(CutMetric::new(side)))
            }
            Metric::TwoThree(m) => Some(Metric::TwoThree(TwoThreeMetric {
                s: [map_set(&m.s[0]), map_set(&m.s[1])],
                t: [map_set(&m.t[0]), map_set(&m.t[1]), map_set(&m.t[2])],
            })),
        }
    }

    /// All vertices mentioned by the metric.
    pub fn support(&self) -> VertexSet {
        match self {
            Metric::Cut(c) => c.side.clone(),
            Metric::TwoThree(m) => m.s.iter().chain(m.t.iter()).flatten().copied().collect(),
        }
    }
}

/// Distance between `u` and `v` under metric `m`.
pub fn eval_metric(m: &Metric, u: VertexId, v: VertexId) -> Result<u8, MetricError> {
    m.eval(u, v)
}

/// Pairs separated by the vertex set `x`.
pub fn separated_pairs(x: &VertexSet, pairs: &[(VertexId, VertexId)]) -> Vec<(VertexId, VertexId)> {
    pairs
        .iter()
        .copied()
        .filter(|(s, t)| x.contains(s) != x.contains(t))
        .collect()
}

/// Terminal pairs of an instance in external ids, each as `(smaller, larger)`.
pub fn terminal_pairs(g: &PlanarGraph) -> Vec<(VertexId, VertexId)> {
    let mut out: Vec<(VertexId, VertexId)> = g
        .terminal_pairs()
        .into_iter()
        .map(|(a, b)| {
            let (x, y) = (g.vertex_id(a), g.vertex_id(b));
            (x.min(y), x.max(y))
        })
        .collect();
    out.sort_unstable();
    out
}

/// True iff both `x` and its complement induce connected subgraphs; for
/// such `x` every face boundary meets the cut in zero or two edges.
pub fn is_simple_cut(g: &PlanarGraph, x: &VertexSet) -> bool {
    let n = g.vertex_count();
    let inside: Vec<bool> = (0..n).map(|v| x.contains(&g.vertex_id(v))).collect();
    let count = inside.iter().filter(|&&b| b).count();
    if count == 0 || count == n {
        return false;
    }
    if !induced_connected(g, &inside, true) || !induced_connected(g, &inside, false) {
        return false;
    }
    face_crossings(g, x).iter().all(|&c| c == 0 || c == 2)
}

fn induced_connected(g: &PlanarGraph, inside: &[bool], want: bool) -> bool {
    let Some(start) = (0..inside.len()).find(|&v| inside[v] == want) else {
        return true;
    };
    let mut seen = vec![false; inside.len()];
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    let mut reached = 1;
    while let Some(v) = queue.pop_front() {
        for &d in g.rotation(v) {
            let w = g.head(d);
            if inside[w] == want && !seen[w] {
                seen[w] = true;
                reached += 1;
                queue.push_back(w);
            }
        }
    }
    reached == inside.iter().filter(|&&b| b == want).count()
}

/// Number of boundary edges of every face crossing the cut of `x`.
pub fn face_crossings(g: &PlanarGraph, x: &VertexSet) -> Vec<usize> {
    (0..g.face_count())
        .map(|f| {
            g.face_darts(f)
                .iter()
                .filter(|&&d| x.contains(&g.vertex_id(g.tail(d))) != x.contains(&g.vertex_id(g.head(d))))
                .count()
        })
        .collect()
}

/// Outcome of checking a packing against an instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    /// `length - sum of weighted metric values`, per edge.
    pub edge_slack: Vec<(EdgeId, i64)>,
    /// `distance - sum of weighted metric values`, per terminal pair.
    pub pair_residual: Vec<((VertexId, VertexId), i64)>,
    /// Structural problems: nonpositive weights, malformed metrics.
    pub problems: Vec<String>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.problems.is_empty()
            && self.edge_slack.iter().all(|&(_, s)| s >= 0)
            && self.pair_residual.iter().all(|&(_, r)| r == 0)
    }

    pub fn failures(&self) -> Vec<String> {
        let mut out = self.problems.clone();
        for &(e, s) in &self.edge_slack {
            if s < 0 {
                out.push(format!("edge {e}: slack {s}"));
            }
        }
        for &((a, b), r) in &self.pair_residual {
            if r != 0 {
                out.push(format!("pair {a}-{b}: residual {r}"));
            }
        }
        out
    }
}

/// Check a packing against an instance: every edge must keep nonnegative
/// slack and every pair of vertices on a common hole must be realized
/// exactly. Distances are computed here from scratch.
pub fn verify_packing(inst: &Instance, packing: &WeightedPacking, mode: Parallelism) -> VerifyReport {
    let g = &inst.graph;
    let mut problems = Vec::new();
    let ids: BTreeSet<VertexId> = g.vertex_ids().iter().copied().collect();
    let mut tables: Vec<(BTreeMap<VertexId, usize>, bool, i64)> = Vec::new();
    for (i, (m, w)) in packing.items.iter().enumerate() {
        if *w <= 0 {
            problems.push(format!("metric {i}: weight {w} is not positive"));
        }
        match m {
            Metric::Cut(c) => {
                if c.side.is_empty() || ids.iter().all(|v| c.side.contains(v)) {
                    problems.push(format!("metric {i}: cut side is empty or everything"));
                }
                let map = ids.iter().map(|&v| (v, usize::from(c.side.contains(&v)))).collect();
                tables.push((map, true, *w));
            }
            Metric::TwoThree(t) => {
                if !t.blocks_disjoint() {
                    problems.push(format!("metric {i}: blocks overlap"));
                }
                let mut map = BTreeMap::new();
                for (b, set) in t.s.iter().chain(t.t.iter()).enumerate() {
                    for &v in set {
                        map.insert(v, b);
                    }
                }
                if let Some(v) = ids.iter().find(|v| !map.contains_key(v)) {
                    problems.push(format!("metric {i}: vertex {v} in no block"));
                }
                tables.push((map, false, *w));
            }
        }
    }
    let value = |u: VertexId, v: VertexId| -> i64 {
        tables
            .iter()
            .map(|(map, is_cut, w)| {
                let (a, b) = match (map.get(&u), map.get(&v)) {
                    (Some(&a), Some(&b)) => (a, b),
                    _ => return 0,
                };
                let m = if *is_cut { i64::from(a != b) } else { i64::from(block_distance(a, b)) };
                m * w
            })
            .sum()
    };
    let edge_slack = mode.map_range(g.edge_count(), |e| {
        let [u, v] = g.ends(e);
        (g.edge_id(e), inst.lengths[e] - value(g.vertex_id(u), g.vertex_id(v)))
    });
    let terminals = g.terminals();
    let dist_rows = mode.map_slice(&terminals, |&s| plain_dijkstra(g, &inst.lengths, s));
    let row_of: BTreeMap<usize, usize> = terminals.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let pairs = g.terminal_pairs();
    let pair_residual = mode.map_slice(&pairs, |&(a, b)| {
        let d = dist_rows[row_of[&a]][b];
        let (x, y) = (g.vertex_id(a), g.vertex_id(b));
        ((x.min(y), x.max(y)), d - value(x, y))
    });
    let mut pair_residual = pair_residual;
    pair_residual.sort();
    VerifyReport { edge_slack, pair_residual, problems }
}

/// Single-source distances with a binary heap.
fn plain_dijkstra(g: &PlanarGraph, lengths: &[i64], s: usize) -> Vec<i64> {
    let mut dist = vec![i64::MAX; g.vertex_count()];
    dist[s] = 0;
    let mut heap = BinaryHeap::from([Reverse((0i64, s))]);
    while let Some(Reverse((d, v))) = heap.pop() {
        if d > dist[v] {
            continue;
        }
        for &dart in g.rotation(v) {
            let w = g.head(dart);
            let nd = d + lengths[dart >> 1];
            if nd < dist[w] {
                dist[w] = nd;
                heap.push(Reverse((nd, w)));
            }
        }
    }
    dist
}

impl WeightedPacking {
    pub fn push(&mut self, m: Metric, w: i64) {
        if w > 0 {
            self.items.push((m, w));
        }
    }

    pub fn extend(&mut self, other: WeightedPacking) {
        self.items.extend(other.items);
    }

    pub fn total_weight(&self) -> i64 {
        self.items.iter().map(|(_, w)| w).sum()
    }

    pub fn cut_count(&self) -> usize {
        self.items.iter().filter(|(m, _)| matches!(m, Metric::Cut(_))).count()
    }

    /// Normalize cut sides to exclude the smallest vertex id of `all`, split
    /// (2,3)-metrics that miss a block into cuts, drop trivial cuts, sort
    /// items and merge identical metrics.
    pub fn canonical(&self, all: &VertexSet) -> WeightedPacking {
        let Some(&root) = all.iter().next() else {
            return self.clone();
        };
        let mut merged: BTreeMap<Metric, i64> = BTreeMap::new();
        let mut add_cut = |side: &VertexSet, w: i64| {
            let side: VertexSet = if side.contains(&root) { all.difference(side).copied().collect() } else { side.clone() };
            if !side.is_empty() {
                *merged.entry(Metric::Cut(CutMetric::new(side))).or_insert(0) += w;
            }
        };
        let mut rest = Vec::new();
        for (m, w) in &self.items {
            match m {
                Metric::Cut(c) => add_cut(&c.side, *w),
                Metric::TwoThree(t) => match t.as_cuts() {
                    Some(sides) => sides.iter().for_each(|x| add_cut(x, *w)),
                    None => rest.push((m.clone(), *w)),
                },
            }
        }
        for (m, w) in rest {
            *merged.entry(m).or_insert(0) += w;
        }
        WeightedPacking { items: merged.into_iter().collect() }
    }
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::fixtures::theta;

    fn set(v: &[VertexId]) -> VertexSet {
        v.iter().copied().collect()
    }

    fn theta_metric() -> Metric {
        Metric::TwoThree(TwoThreeMetric { s: [set(&[0]), set(&[1])], t: [set(&[2]), set(&[3]), set(&[4])] })
    }

    #[test]
    fn two_three_values() {
        let m = theta_metric();
        assert_eq!(m.eval(0, 1), Ok(2));
        assert_eq!(m.eval(2, 4), Ok(2));
        assert_eq!(m.eval(0, 3), Ok(1));
        assert_eq!(m.eval(3, 3), Ok(0));
        assert_eq!(m.eval(0, 9), Err(MetricError::UnknownVertex(9)));
    }

    #[test]
    fn missing_block_becomes_cuts() {
        let m = TwoThreeMetric { s: [set(&[0]), set(&[1])], t: [set(&[2]), set(&[]), set(&[3])] };
        assert_eq!(m.as_cuts(), Some(vec![set(&[0, 2]), set(&[0, 3])]));
        assert_eq!(match theta_metric() { Metric::TwoThree(t) => t.as_cuts(), _ => None }, None);
    }

    #[test]
    fn theta_is_one_two_three_metric() {
        let mut p = WeightedPacking::default();
        p.push(theta_metric(), 1);
        let r = verify_packing(&theta(), &p, Parallelism::Sequential);
        assert!(r.passed(), "{:?}", r.failures());
    }

    #[test]
    fn overweight_and_bad_weights_fail() {
        let p = WeightedPacking { items: vec![(theta_metric(), 2)] };
        let r = verify_packing(&theta(), &p, Parallelism::Sequential);
        assert!(!r.passed());
        assert!(r.edge_slack.iter().all(|&(_, s)| s == -1));
        let p = WeightedPacking { items: vec![(theta_metric(), 1), (Metric::Cut(CutMetric::new(set(&[0]))), 0)] };
        assert!(!verify_packing(&theta(), &p, Parallelism::Sequential).passed());
    }

    #[test]
    fn canonical_merges_complements() {
        let all = set(&[0, 1, 2]);
        let p = WeightedPacking {
            items: vec![(Metric::Cut(CutMetric::new(set(&[0]))), 1), (Metric::Cut(CutMetric::new(set(&[1, 2]))), 2)],
        };
        let c = p.canonical(&all);
        assert_eq!(c.items, vec![(Metric::Cut(CutMetric::new(set(&[1, 2]))), 3)]);
    }

    proptest! {
        #[test]
        fn degenerate_two_three_splits_exactly(blocks in proptest::collection::vec(0usize..5, 1..9), drop in 0usize..5) {
            let mut parts: [VertexSet; 5] = Default::default();
            for (v, &b) in blocks.iter().enumerate() {
                parts[if b == drop { (b + 1) % 5 } else { b }].insert(v as VertexId);
            }
            let t = TwoThreeMetric { s: [parts[0].clone(), parts[1].clone()], t: [parts[2].clone(), parts[3].clone(), parts[4].clone()] };
            let cuts = t.as_cuts().unwrap();
            for u in 0..blocks.len() as VertexId {
                for v in 0..blocks.len() as VertexId {
                    let sum: u8 = cuts.iter().map(|x| CutMetric::new(x.clone()).eval(u, v)).sum();
                    prop_assert_eq!(Metric::TwoThree(t.clone()).eval(u, v).unwrap(), sum);
                }
            }
        }

        #[test]
        fn two_three_metric_is_a_metric(blocks in proptest::collection::vec(0usize..5, 2..12)) {
            let mut s = [VertexSet::new(), VertexSet::new()];
            let mut t = [VertexSet::new(), VertexSet::new(), VertexSet::new()];
            for (v, &b) in blocks.iter().enumerate() {
                if b < 2 { s[b].insert(v as VertexId); } else { t[b - 2].insert(v as VertexId); }
            }
            let m = Metric::TwoThree(TwoThreeMetric { s, t });
            let n = blocks.len() as VertexId;
            for a in 0..n {
                for b in 0..n {
                    prop_assert_eq!(m.eval(a, b).unwrap(), m.eval(b, a).unwrap());
                    for c in 0..n {
                        prop_assert!(m.eval(a, c).unwrap() <= m.eval(a, b).unwrap() + m.eval(b, c).unwrap());
                    }
                }
            }
        }
    }
}
