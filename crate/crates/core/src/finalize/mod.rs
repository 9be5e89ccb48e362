//! The endgame: inner triangles become stars, the remaining three paths are
//! subdivided to a common profile, and the distances are written as a sum of
//! (2,3)-metrics plus at most one cut metric.

mod pipeline;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metricspace::{CutMetric, Metric, TwoThreeMetric, VertexSet, WeightedPacking};
use crate::planar::{Instance, PlanarError, Surgery, VertexId};

pub use pipeline::{solve, Snapshot, SolveError, SolveOptions, SolveStats, Solution, TraceFrame};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FinalizeError {
    #[error("inner face {0:?} gives a negative or fractional spoke")]
    NegativeSpoke(Vec<VertexId>),
    #[error("graph is not three internally disjoint paths: {0}")]
    NotThreePaths(String),
    #[error("the three paths have lengths {0:?}")]
    UnequalPathLengths([i64; 3]),
    #[error("malformed three-path form: {0}")]
    BadForm(String),
    #[error(transparent)]
    Planar(#[from] PlanarError),
}

/// Three internally disjoint `s`-`s'` paths subdivided so that all of them
/// have vertices at the same depths, with mirror-symmetric segment lengths.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThreePathForm {
    pub s: VertexId,
    pub s_prime: VertexId,
    /// Vertex sequences `x_0 = s, ..., x_k = s'` of the three paths.
    pub paths: [Vec<VertexId>; 3],
    /// Segment lengths `lambda_1 .. lambda_k`.
    pub lambda: Vec<i64>,
}

impl ThreePathForm {
    pub fn k(&self) -> usize {
        self.lambda.len()
    }

    /// A form with `k` segments on fresh vertex ids `0..`.
    pub fn synthetic(lambda: Vec<i64>) -> ThreePathForm {
        let k = lambda.len();
        let mut next = 2;
        let paths = [0, 1, 2].map(|_| {
            let mut p = vec![0];
            for _ in 1..k {
                p.push(next);
                next += 1;
            }
            p.push(1);
            p
        });
        ThreePathForm { s: 0, s_prime: 1, paths, lambda }
    }

    pub fn validate(&self) -> Result<(), FinalizeError> {
        let k = self.k();
        if k == 0 {
            return Err(FinalizeError::BadForm("no segments".into()));
        }
        for p in &self.paths {
            if p.len() != k + 1 || p[0] != self.s || p[k] != self.s_prime {
                return Err(FinalizeError::BadForm("path does not match the segment count".into()));
            }
        }
        if self.lambda.iter().any(|&l| l <= 0) {
            return Err(FinalizeError::BadForm("nonpositive segment".into()));
        }
        if (0..k).any(|r| self.lambda[r] != self.lambda[k - 1 - r]) {
            return Err(FinalizeError::BadForm("segments are not mirror-symmetric".into()));
        }
        let inner: Vec<VertexId> = self.paths.iter().flat_map(|p| p[1..k].iter().copied()).collect();
        let distinct: BTreeSet<VertexId> = inner.iter().copied().collect();
        if distinct.len() != inner.len() || distinct.contains(&self.s) || distinct.contains(&self.s_prime) {
            return Err(FinalizeError::BadForm("paths are not internally disjoint".into()));
        }
        Ok(())
    }

    pub fn vertices(&self) -> VertexSet {
        self.paths.iter().flatten().copied().collect()
    }

    /// `(path, position)` of every vertex; `s` and `s'` report path 0.
    fn positions(&self) -> BTreeMap<VertexId, (usize, usize)> {
        let mut out = BTreeMap::new();
        for (i, p) in self.paths.iter().enumerate().rev() {
            for (pos, &v) in p.iter().enumerate() {
                out.insert(v, (i, pos));
            }
        }
        out
    }

    /// Shortest-path distance in the graph formed by the three paths.
    pub fn distance(&self, u: VertexId, v: VertexId) -> Option<i64> {
        let pos = self.positions();
        let depth: Vec<i64> = std::iter::once(0)
            .chain(self.lambda.iter().scan(0, |acc, &l| {
                *acc += l;
                Some(*acc)
            }))
            .collect();
        let b = *depth.last()?;
        let (&(pu, iu), &(pv, iv)) = (pos.get(&u)?, pos.get(&v)?);
        let (du, dv) = (depth[iu], depth[iv]);
        let same_path = pu == pv || iu == 0 || iu == self.k() || iv == 0 || iv == self.k();
        if same_path {
            Some((du - dv).abs())
        } else {
            Some((du + dv).min(2 * b - du - dv))
        }
    }
}

/// The (2,3)-metrics of the form, one per segment pair from the ends
/// inward, plus a cut metric for the middle segment when `k` is odd.
pub fn emit_solution(form: &ThreePathForm) -> WeightedPacking {
    let k = form.k();
    let mut out = WeightedPacking::default();
    let collect = |range: std::ops::RangeInclusive<usize>, paths: &[usize]| -> VertexSet {
        paths.iter().flat_map(|&i| range.clone().map(move |p| form.paths[i][p])).collect()
    };
    for r in 1..=k / 2 {
        let s1 = collect(0..=r - 1, &[0, 1, 2]);
        let s2 = collect(k - r + 1..=k, &[0, 1, 2]);
        let t = [0, 1, 2].map(|j| collect(r..=k - r, &[j]));
        out.push(Metric::TwoThree(TwoThreeMetric { s: [s1, s2], t }), form.lambda[r - 1]);
    }
    if k % 2 == 1 {
        let x = collect(0..=k / 2, &[0, 1, 2]);
        out.push(Metric::Cut(CutMetric::new(x)), form.lambda[k / 2]);
    }
    out
}

/// Inner (non-hole) faces.
pub fn inner_faces(inst: &Instance) -> Vec<usize> {
    let g = &inst.graph;
    (0..g.face_count()).filter(|&f| !g.is_hole(f)).collect()
}

/// Whether every inner face is a triangle sharing one edge with each of
/// three distinct holes, and there are at most two of them.
pub fn in_two_inner_faces_state(inst: &Instance) -> bool {
    let g = &inst.graph;
    if g.holes().len() != 3 {
        return false;
    }
    let inner = inner_faces(inst);
    inner.len() <= 2
        && inner.iter().all(|&f| {
            let darts = g.face_darts(f);
            let across: BTreeSet<usize> = darts.iter().map(|&d| g.face_of(d ^ 1)).collect();
            darts.len() == 3 && across.len() == 3 && across.iter().all(|&h| g.is_hole(h))
        })
}

/// Replace every inner triangle by a star whose spoke lengths reproduce the
/// three side lengths. Returns the new instance and the added centers.
pub fn star_transform(inst: &Instance) -> Result<(Instance, Vec<VertexId>), FinalizeError> {
    let mut cur = inst.clone();
    let mut centers = Vec::new();
    loop {
        let g = &cur.graph;
        let Some(f) = inner_faces(&cur).into_iter().find(|&f| g.face_darts(f).len() == 3) else {
            break;
        };
        let darts = g.face_darts(f).to_vec();
        let key = g.face_key(f);
        // darts[i] runs v_i -> v_{i+1}; the spoke at v_i is half of the two
        // sides at v_i minus the opposite side
        let side: Vec<i64> = darts.iter().map(|&d| cur.len_of(d)).collect();
        let verts: Vec<usize> = darts.iter().map(|&d| g.tail(d)).collect();
        let mut spoke = [0i64; 3];
        for i in 0..3 {
            let twice = side[i] + side[(i + 2) % 3] - side[(i + 1) % 3];
            if twice < 0 || twice % 2 != 0 {
                return Err(FinalizeError::NegativeSpoke(key));
            }
            spoke[i] = twice / 2;
        }
        // subdivide v_1 -> v_2 at distance spoke[1] from v_1
        let e0 = darts[1] >> 1;
        let from_first = g.ends(e0)[0] == verts[1];
        let (a, b) = if from_first { (spoke[1], spoke[2]) } else { (spoke[2], spoke[1]) };
        let c_id = cur.fresh_ids().0;
        let split = cur.apply_surgery(&Surgery::Subdivide { edge: e0, first: a, second: b })?;
        let g2 = &split.graph;
        let c = g2.vertex_index(c_id).expect("center exists");
        let v0 = g2.vertex_index(g.vertex_id(verts[0])).expect("vertex kept");
        let face = (0..g2.face_count())
            .find(|&h| {
                let vs = g2.face_vertices(h);
                !g2.is_hole(h) && vs.len() == 4 && vs.contains(&c) && vs.contains(&v0)
            })
            .expect("subdivided triangle");
        let with_spoke =
            split.apply_surgery(&Surgery::InsertInFace { face, x: c, y: v0, length: spoke[0] })?;
        let g3 = &with_spoke.graph;
        let ids = |v: usize| g.vertex_id(v);
        let idx = |id: VertexId| g3.vertex_index(id).expect("vertex kept");
        let e1 = g3.edge_between(idx(ids(verts[0])), idx(ids(verts[1]))).expect("side v0 v1");
        let e2 = g3.edge_between(idx(ids(verts[2])), idx(ids(verts[0]))).expect("side v2 v0");
        let (next, _) = with_spoke.edit_normalized(|dr| {
            dr.delete(e1);
            dr.delete(e2);
        })?;
        centers.push(c_id);
        cur = next;
    }
    Ok((cur, centers))
}

/// The two branch vertices and the three paths between them, as internal
/// vertex sequences, when the graph is a subdivided theta.
pub fn theta_paths(inst: &Instance) -> Option<(usize, usize, [Vec<usize>; 3])> {
    let g = &inst.graph;
    let n = g.vertex_count();
    if g.edge_count() != n + 1 {
        return None;
    }
    let branch: Vec<usize> = (0..n).filter(|&v| g.degree(v) != 2).collect();
    if branch.len() != 2 || branch.iter().any(|&v| g.degree(v) != 3) {
        return None;
    }
    let (s, t) = (branch[0], branch[1]);
    let mut paths: Vec<Vec<usize>> = Vec::new();
    for &d0 in g.rotation(s) {
        let mut path = vec![s];
        let mut d = d0;
        loop {
            let v = g.head(d);
            path.push(v);
            if v == s {
                return None;
            }
            if v == t {
                break;
            }
            d = *g.rotation(v).iter().find(|&&x| x != (d ^ 1))?;
        }
        paths.push(path);
    }
    let arr: [Vec<usize>; 3] = paths.try_into().ok()?;
    Some((s, t, arr))
}

/// Subdivide the three paths of a theta graph to a common, mirror-symmetric
/// depth profile.
pub fn balance_paths(inst: &Instance) -> Result<(Instance, ThreePathForm), FinalizeError> {
    let (s, _, paths) = theta_paths(inst).ok_or_else(|| FinalizeError::NotThreePaths("shape".into()))?;
    let g = &inst.graph;
    let depth_of = |p: &[usize]| -> Vec<i64> {
        let mut out = vec![0];
        for w in p.windows(2) {
            let e = g.edge_between(w[0], w[1]).expect("path edge");
            out.push(out.last().unwrap() + inst.lengths[e]);
        }
        out
    };
    let depths: Vec<Vec<i64>> = paths.iter().map(|p| depth_of(p)).collect();
    let lens = [0, 1, 2].map(|i| *depths[i].last().unwrap());
    if lens[0] != lens[1] || lens[1] != lens[2] {
        return Err(FinalizeError::UnequalPathLengths(lens));
    }
    let b = lens[0];
    let mut profile: BTreeSet<i64> = BTreeSet::new();
    for ds in &depths {
        for &d in &ds[1..ds.len() - 1] {
            profile.insert(d);
            profile.insert(b - d);
        }
    }
    profile.retain(|&d| d > 0 && d < b);
    let mut requests = Vec::new();
    for (p, ds) in paths.iter().zip(&depths) {
        for i in 0..p.len() - 1 {
            let e = g.edge_between(p[i], p[i + 1]).expect("path edge");
            let (lo, hi) = (ds[i], ds[i + 1]);
            let inside: Vec<i64> = profile.range(lo + 1..hi).copied().collect();
            if inside.is_empty() {
                continue;
            }
            let forward = g.ends(e)[0] == p[i];
            let mut offsets: Vec<i64> =
                inside.iter().map(|&d| if forward { d - lo } else { hi - d }).collect();
            offsets.sort_unstable();
            requests.push((e, offsets));
        }
    }
    let (out, _) = inst.subdivide_many(&requests)?;
    let (s2, t2, paths2) =
        theta_paths(&out).ok_or_else(|| FinalizeError::NotThreePaths("after subdivision".into()))?;
    let g2 = &out.graph;
    let start = g2.vertex_index(g.vertex_id(s)).expect("branch kept");
    let (s2, t2) = if s2 == start { (s2, t2) } else { (t2, s2) };
    let oriented: Vec<Vec<usize>> = paths2
        .into_iter()
        .map(|mut p| {
            if p[0] != s2 {
                p.reverse();
            }
            p
        })
        .collect();
    let mut lambda = Vec::new();
    for w in oriented[0].windows(2) {
        let e = g2.edge_between(w[0], w[1]).expect("path edge");
        lambda.push(out.lengths[e]);
    }
    for p in &oriented {
        let mut seg = Vec::new();
        for w in p.windows(2) {
            seg.push(out.lengths[g2.edge_between(w[0], w[1]).expect("path edge")]);
        }
        if seg != lambda {
            return Err(FinalizeError::BadForm("profiles differ after subdivision".into()));
        }
    }
    let to_ids = |p: &Vec<usize>| -> Vec<VertexId> { p.iter().map(|&v| g2.vertex_id(v)).collect() };
    let form = ThreePathForm {
        s: g2.vertex_id(s2),
        s_prime: g2.vertex_id(t2),
        paths: [to_ids(&oriented[0]), to_ids(&oriented[1]), to_ids(&oriented[2])],
        lambda,
    };
    form.validate()?;
    Ok((out, form))
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    /// Distances in the three-path graph by Floyd-Warshall.
    fn brute_distances(form: &ThreePathForm) -> BTreeMap<(VertexId, VertexId), i64> {
        let vs: Vec<VertexId> = form.vertices().into_iter().collect();
        let idx: BTreeMap<VertexId, usize> = vs.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let n = vs.len();
        let inf = i64::MAX / 4;
        let mut d = vec![vec![inf; n]; n];
        for (i, row) in d.iter_mut().enumerate() {
            row[i] = 0;
        }
        for p in &form.paths {
            for (r, w) in p.windows(2).enumerate() {
                let (a, b) = (idx[&w[0]], idx[&w[1]]);
                d[a][b] = d[a][b].min(form.lambda[r]);
                d[b][a] = d[a][b];
            }
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    d[i][j] = d[i][j].min(d[i][k] + d[k][j]);
                }
            }
        }
        let mut out = BTreeMap::new();
        for (i, &u) in vs.iter().enumerate() {
            for (j, &v) in vs.iter().enumerate() {
                out.insert((u, v), d[i][j]);
            }
        }
        out
    }

    fn packing_value(p: &WeightedPacking, u: VertexId, v: VertexId) -> i64 {
        p.items.iter().map(|(m, w)| i64::from(m.eval(u, v).unwrap()) * w).sum()
    }

    #[test]
    fn single_segment_is_a_cut() {
        let form = ThreePathForm::synthetic(vec![3]);
        let p = emit_solution(&form);
        assert_eq!(p.items.len(), 1);
        assert!(matches!(p.items[0].0, Metric::Cut(_)));
        assert_eq!(p.items[0].1, 3);
    }

    #[test]
    fn asymmetric_segments_are_rejected() {
        assert!(ThreePathForm::synthetic(vec![1, 2]).validate().is_err());
        assert!(ThreePathForm::synthetic(vec![2, 5, 2]).validate().is_ok());
    }

    proptest! {
        #[test]
        fn emitted_metrics_realize_all_distances(half in proptest::collection::vec(1i64..10, 1..7), odd in proptest::option::of(1i64..10)) {
            let mut lambda = half.clone();
            if let Some(m) = odd {
                lambda.push(m);
            }
            lambda.extend(half.iter().rev());
            let form = ThreePathForm::synthetic(lambda);
            prop_assert!(form.validate().is_ok());
            let p = emit_solution(&form);
            prop_assert!(p.items.iter().all(|(_, w)| *w > 0));
            for ((u, v), d) in brute_distances(&form) {
                prop_assert_eq!(packing_value(&p, u, v), d);
                prop_assert_eq!(form.distance(u, v), Some(d));
            }
        }
    }
}
