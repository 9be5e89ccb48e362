//! Planar embedded graphs stored as combinatorial maps.
//!
//! Every edge `e` owns the two darts `2e` and `2e + 1`. A dart leaves its
//! tail vertex; the rotation at a vertex lists its darts in clockwise order.
//! Faces are the orbits of `d -> rot_next(twin(d))`, so the face of a dart
//! lies on its left.

mod blocks;
mod region;
mod surgery;

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use blocks::{Block, BlockDecomposition};
pub use region::{RegionSplit, SubInstance};
pub use surgery::{NormalizeLog, Surgery};

pub type VertexId = u32;
pub type EdgeId = u32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlanarError {
    #[error("rotation system does not describe a connected planar map: {0}")]
    NonPlanarOrDisconnected(String),
    #[error("loop, parallel edge or non-simple face: {0}")]
    C1Violation(String),
    #[error("declared hole {0:?} matches no face")]
    UnknownHoleCycle(Vec<VertexId>),
    #[error("surgery precondition failed: {0}")]
    SurgeryPrecondition(String),
    #[error("surgery would destroy or merge a hole: {0}")]
    HoleDestroyed(String),
    #[error("lengths are not cyclically even; odd cycle through darts {0:?}")]
    OddCycle(Vec<(VertexId, VertexId)>),
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("unknown edge {0}")]
    UnknownEdge(EdgeId),
    #[error("negative length {1} on edge {0}")]
    NegativeLength(EdgeId, i64),
    #[error("too many holes: {0}")]
    TooManyHoles(usize),
}

/// External description of an embedding: vertex ids, edges and the clockwise
/// rotation of edge ids around every vertex, plus hole boundary cycles.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RotationSpec {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<(EdgeId, VertexId, VertexId)>,
    /// Aligned with `vertices`.
    pub rotation: Vec<Vec<EdgeId>>,
    pub holes: Vec<Vec<VertexId>>,
}

#[derive(Debug, Clone)]
pub struct PlanarGraph {
    vertex_ids: Vec<VertexId>,
    vertex_index: HashMap<VertexId, usize>,
    edge_ids: Vec<EdgeId>,
    edge_index: HashMap<EdgeId, usize>,
    ends: Vec<[usize; 2]>,
    rotation: Vec<Vec<usize>>,
    rot_pos: Vec<usize>,
    face_of: Vec<usize>,
    faces: Vec<Vec<usize>>,
    holes: Vec<usize>,
}

/// A planar graph together with edge lengths indexed by internal edge index.
#[derive(Debug, Clone)]
pub struct Instance {
    pub graph: PlanarGraph,
    pub lengths: Vec<i64>,
    next_vertex_id: VertexId,
    next_edge_id: EdgeId,
}

impl PlanarGraph {
    /// Builds a map from external ids. Hole cycles may be listed in either
    /// direction and from any starting vertex.
    pub fn build(spec: &RotationSpec) -> Result<PlanarGraph, PlanarError> {
        let mut vertex_index = HashMap::new();
        for (i, &v) in spec.vertices.iter().enumerate() {
            if vertex_index.insert(v, i).is_some() {
                return Err(PlanarError::NonPlanarOrDisconnected(format!(
                    "vertex {v} listed twice"
                )));
            }
        }
        if spec.rotation.len() != spec.vertices.len() {
            return Err(PlanarError::NonPlanarOrDisconnected(
                "rotation list count differs from vertex count".into(),
            ));
        }
        let mut edge_index = HashMap::new();
        let mut ends = Vec::with_capacity(spec.edges.len());
        let mut edge_ids = Vec::with_capacity(spec.edges.len());
        for (i, &(e, u, v)) in spec.edges.iter().enumerate() {
            if edge_index.insert(e, i).is_some() {
                return Err(PlanarError::NonPlanarOrDisconnected(format!(
                    "edge {e} listed twice"
                )));
            }
            let ui = *vertex_index.get(&u).ok_or(PlanarError::UnknownVertex(u))?;
            let vi = *vertex_index.get(&v).ok_or(PlanarError::UnknownVertex(v))?;
            if ui == vi {
                return Err(PlanarError::C1Violation(format!("edge {e} is a loop")));
            }
            ends.push([ui, vi]);
            edge_ids.push(e);
        }
        let mut used = vec![false; 2 * ends.len()];
        let mut rotation = Vec::with_capacity(spec.vertices.len());
        for (vi, list) in spec.rotation.iter().enumerate() {
            let mut darts = Vec::with_capacity(list.len());
            for &e in list {
                let ei = *edge_index.get(&e).ok_or(PlanarError::UnknownEdge(e))?;
                let d = if ends[ei][0] == vi {
                    2 * ei
                } else if ends[ei][1] == vi {
                    2 * ei + 1
                } else {
                    return Err(PlanarError::NonPlanarOrDisconnected(format!(
                        "edge {e} is not incident to vertex {}",
                        spec.vertices[vi]
                    )));
                };
                if used[d] {
                    return Err(PlanarError::NonPlanarOrDisconnected(format!(
                        "edge {e} repeated in rotation of {}",
                        spec.vertices[vi]
                    )));
                }
                used[d] = true;
                darts.push(d);
            }
            rotation.push(darts);
        }
        if let Some(d) = used.iter().position(|u| !u) {
            return Err(PlanarError::NonPlanarOrDisconnected(format!(
                "edge {} missing from a rotation",
                edge_ids[d / 2]
            )));
        }
        let mut g = PlanarGraph::assemble(spec.vertices.clone(), edge_ids, ends, rotation)?;
        let mut holes = BTreeSet::new();
        for cycle in &spec.holes {
            let f = g
                .find_face_by_cycle(cycle)
                .ok_or_else(|| PlanarError::UnknownHoleCycle(cycle.clone()))?;
            holes.insert(f);
        }
        if holes.len() != spec.holes.len() {
            return Err(PlanarError::UnknownHoleCycle(
                spec.holes.last().cloned().unwrap_or_default(),
            ));
        }
        if holes.len() > 3 {
            return Err(PlanarError::TooManyHoles(holes.len()));
        }
        g.holes = holes.into_iter().collect();
        g.sort_holes();
        Ok(g)
    }

    /// Builds the map from internal arrays, tracing faces and checking that
    /// the result is a connected spherical embedding.
    pub(crate) fn assemble(
        vertex_ids: Vec<VertexId>,
        edge_ids: Vec<EdgeId>,
        ends: Vec<[usize; 2]>,
        rotation: Vec<Vec<usize>>,
    ) -> Result<PlanarGraph, PlanarError> {
        let nd = 2 * ends.len();
        let mut rot_pos = vec![usize::MAX; nd];
        for list in &rotation {
            for (i, &d) in list.iter().enumerate() {
                rot_pos[d] = i;
            }
        }
        let vertex_index = vertex_ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let edge_index = edge_ids.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let mut g = PlanarGraph {
            vertex_ids,
            vertex_index,
            edge_ids,
            edge_index,
            ends,
            rotation,
            rot_pos,
            face_of: vec![usize::MAX; nd],
            faces: Vec::new(),
            holes: Vec::new(),
        };
        for d in 0..nd {
            if g.face_of[d] != usize::MAX {
                continue;
            }
            let f = g.faces.len();
            let mut cycle = Vec::new();
            let mut x = d;
            loop {
                g.face_of[x] = f;
                cycle.push(x);
                x = g.face_next(x);
                if x == d {
                    break;
                }
            }
            g.faces.push(cycle);
        }
        if !g.is_connected() {
            return Err(PlanarError::NonPlanarOrDisconnected("graph is disconnected".into()));
        }
        let n = g.vertex_count() as i64;
        let m = g.edge_count() as i64;
        let f = if m == 0 { 1 } else { g.faces.len() as i64 };
        if n - m + f != 2 {
            return Err(PlanarError::NonPlanarOrDisconnected(format!(
                "Euler characteristic {} (V={n}, E={m}, F={f})",
                n - m + f
            )));
        }
        Ok(g)
    }

    fn is_connected(&self) -> bool {
        let n = self.vertex_count();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = queue.pop_front() {
            for &d in &self.rotation[v] {
                let w = self.head(d);
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    queue.push_back(w);
                }
            }
        }
        count == n
    }

    pub(crate) fn sort_holes(&mut self) {
        let mut keyed: Vec<(Vec<VertexId>, usize)> =
            self.holes.iter().map(|&f| (self.face_key(f), f)).collect();
        keyed.sort();
        keyed.dedup_by(|a, b| a.1 == b.1);
        self.holes = keyed.into_iter().map(|(_, f)| f).collect();
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.ends.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn dart_count(&self) -> usize {
        2 * self.ends.len()
    }

    pub fn vertex_id(&self, v: usize) -> VertexId {
        self.vertex_ids[v]
    }

    pub fn vertex_ids(&self) -> &[VertexId] {
        &self.vertex_ids
    }

    pub fn vertex_index(&self, id: VertexId) -> Option<usize> {
        self.vertex_index.get(&id).copied()
    }

    pub fn edge_id(&self, e: usize) -> EdgeId {
        self.edge_ids[e]
    }

    pub fn edge_ids(&self) -> &[EdgeId] {
        &self.edge_ids
    }

    pub fn edge_index(&self, id: EdgeId) -> Option<usize> {
        self.edge_index.get(&id).copied()
    }

    pub fn ends(&self, e: usize) -> [usize; 2] {
        self.ends[e]
    }

    pub fn tail(&self, d: usize) -> usize {
        self.ends[d >> 1][d & 1]
    }

    pub fn head(&self, d: usize) -> usize {
        self.ends[d >> 1][1 - (d & 1)]
    }

    pub fn twin(&self, d: usize) -> usize {
        d ^ 1
    }

    pub fn edge_of(&self, d: usize) -> usize {
        d >> 1
    }

    /// Next dart clockwise around the tail of `d`.
    pub fn rot_next(&self, d: usize) -> usize {
        let list = &self.rotation[self.tail(d)];
        list[(self.rot_pos[d] + 1) % list.len()]
    }

    /// Next dart counterclockwise around the tail of `d`.
    pub fn rot_prev(&self, d: usize) -> usize {
        let list = &self.rotation[self.tail(d)];
        list[(self.rot_pos[d] + list.len() - 1) % list.len()]
    }

    /// Successor of `d` on its face.
    pub fn face_next(&self, d: usize) -> usize {
        self.rot_next(d ^ 1)
    }

    /// Predecessor of `d` on its face.
    pub fn face_prev(&self, d: usize) -> usize {
        self.rot_prev(d) ^ 1
    }

    pub fn rotation(&self, v: usize) -> &[usize] {
        &self.rotation[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.rotation[v].len()
    }

    pub fn face_of(&self, d: usize) -> usize {
        self.face_of[d]
    }

    pub fn face_darts(&self, f: usize) -> &[usize] {
        &self.faces[f]
    }

    /// Boundary vertices of a face in walk order (tails of its darts).
    pub fn face_vertices(&self, f: usize) -> Vec<usize> {
        self.faces[f].iter().map(|&d| self.tail(d)).collect()
    }

    /// Lexicographically smallest rotation of the boundary id cycle.
    pub fn face_key(&self, f: usize) -> Vec<VertexId> {
        let ids: Vec<VertexId> = self.face_vertices(f).iter().map(|&v| self.vertex_ids[v]).collect();
        canonical_rotation(&ids)
    }

    pub fn find_face_by_cycle(&self, cycle: &[VertexId]) -> Option<usize> {
        if cycle.is_empty() {
            return None;
        }
        let fwd = canonical_rotation(cycle);
        let mut rev: Vec<VertexId> = cycle.to_vec();
        rev.reverse();
        let rev = canonical_rotation(&rev);
        (0..self.faces.len()).find(|&f| {
            let k = self.face_key(f);
            k == fwd || k == rev
        })
    }

    pub fn holes(&self) -> &[usize] {
        &self.holes
    }

    pub fn is_hole(&self, f: usize) -> bool {
        self.holes.contains(&f)
    }

    pub fn hole_keys(&self) -> Vec<Vec<VertexId>> {
        self.holes.iter().map(|&f| self.face_key(f)).collect()
    }

    /// Find the edge joining two vertices, if any.
    pub fn edge_between(&self, u: usize, v: usize) -> Option<usize> {
        self.rotation[u].iter().find(|&&d| self.head(d) == v).map(|&d| d >> 1)
    }

    /// The dart from `u` to `v`, if adjacent.
    pub fn dart_between(&self, u: usize, v: usize) -> Option<usize> {
        self.rotation[u].iter().copied().find(|&d| self.head(d) == v)
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rotation[v].iter().map(move |&d| (self.head(d), d))
    }

    /// Sorted list of hole-boundary vertices.
    pub fn terminals(&self) -> Vec<usize> {
        let mut set = BTreeSet::new();
        for &h in &self.holes {
            set.extend(self.face_vertices(h));
        }
        set.into_iter().collect()
    }

    /// All unordered vertex pairs lying on a common hole boundary, each pair
    /// `(a, b)` with `a < b` by internal index, sorted and deduplicated.
    pub fn terminal_pairs(&self) -> Vec<(usize, usize)> {
        let mut set = BTreeSet::new();
        for &h in &self.holes {
            let mut vs = self.face_vertices(h);
            vs.sort_unstable();
            vs.dedup();
            for i in 0..vs.len() {
                for j in i + 1..vs.len() {
                    set.insert((vs[i], vs[j]));
                }
            }
        }
        set.into_iter().collect()
    }

    /// Describes a violation of: no loops, no parallel edges, every face a
    /// simple cycle on at least three vertices.
    pub fn c1_violation(&self) -> Option<String> {
        let mut seen = BTreeSet::new();
        for (e, &[u, v]) in self.ends.iter().enumerate() {
            if u == v {
                return Some(format!("edge {} is a loop", self.edge_ids[e]));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Some(format!(
                    "parallel edges between {} and {}",
                    self.vertex_ids[u], self.vertex_ids[v]
                ));
            }
        }
        for f in 0..self.faces.len() {
            let vs = self.face_vertices(f);
            let distinct: BTreeSet<usize> = vs.iter().copied().collect();
            if vs.len() < 3 || distinct.len() != vs.len() {
                return Some(format!("face {:?} is not a simple cycle", self.face_key(f)));
            }
        }
        None
    }

    pub fn check_c1(&self) -> Result<(), PlanarError> {
        match self.c1_violation() {
            Some(msg) => Err(PlanarError::C1Violation(msg)),
            None => Ok(()),
        }
    }

    /// Export the embedding using external ids.
    pub fn to_spec(&self) -> RotationSpec {
        let edges = self
            .ends
            .iter()
            .enumerate()
            .map(|(e, &[u, v])| (self.edge_ids[e], self.vertex_ids[u], self.vertex_ids[v]))
            .collect();
        let rotation = self
            .rotation
            .iter()
            .map(|list| list.iter().map(|&d| self.edge_ids[d >> 1]).collect())
            .collect();
        let holes = self
            .holes
            .iter()
            .map(|&f| self.face_vertices(f).iter().map(|&v| self.vertex_ids[v]).collect())
            .collect();
        RotationSpec { vertices: self.vertex_ids.clone(), edges, rotation, holes }
    }

    pub(crate) fn set_holes(&mut self, holes: Vec<usize>) {
        self.holes = holes;
        self.sort_holes();
    }
}

pub fn canonical_rotation(ids: &[VertexId]) -> Vec<VertexId> {
    let n = ids.len();
    (0..n)
        .map(|s| (0..n).map(|i| ids[(s + i) % n]).collect::<Vec<_>>())
        .min()
        .unwrap_or_default()
}

/// Mod-2 vertex labeling witnessing that every cycle has even length.
pub fn check_parity_potential(g: &PlanarGraph, lengths: &[i64]) -> Result<Vec<u8>, PlanarError> {
    let n = g.vertex_count();
    let mut pot = vec![u8::MAX; n];
    let mut via = vec![usize::MAX; n];
    for root in 0..n {
        if pot[root] != u8::MAX {
            continue;
        }
        pot[root] = 0;
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &d in g.rotation(v) {
                let w = g.head(d);
                if pot[w] == u8::MAX {
                    pot[w] = pot[v] ^ (lengths[d >> 1].rem_euclid(2) as u8);
                    via[w] = d;
                    queue.push_back(w);
                }
            }
        }
    }
    for e in 0..g.edge_count() {
        let [u, v] = g.ends(e);
        if pot[u] ^ pot[v] != lengths[e].rem_euclid(2) as u8 {
            return Err(PlanarError::OddCycle(odd_cycle_witness(g, &via, e)));
        }
    }
    Ok(pot)
}

fn odd_cycle_witness(g: &PlanarGraph, via: &[usize], e: usize) -> Vec<(VertexId, VertexId)> {
    let [u, v] = g.ends(e);
    let up = |mut x: usize| {
        let mut path = vec![x];
        while via[x] != usize::MAX {
            x = g.tail(via[x]);
            path.push(x);
        }
        path
    };
    let pu = up(u);
    let pv = up(v);
    let set_u: BTreeSet<usize> = pu.iter().copied().collect();
    let meet = *pv.iter().find(|x| set_u.contains(x)).unwrap_or(&u);
    let mut walk: Vec<usize> = pu.iter().copied().take_while(|&x| x != meet).collect();
    walk.push(meet);
    let mut tail: Vec<usize> = pv.iter().copied().take_while(|&x| x != meet).collect();
    tail.reverse();
    walk.extend(tail);
    let mut out = Vec::new();
    for i in 0..walk.len() {
        let a = walk[i];
        let b = walk[(i + 1) % walk.len()];
        out.push((g.vertex_id(a), g.vertex_id(b)));
    }
    out
}

impl Instance {
    pub fn new(graph: PlanarGraph, lengths: Vec<i64>) -> Result<Instance, PlanarError> {
        if lengths.len() != graph.edge_count() {
            return Err(PlanarError::SurgeryPrecondition(format!(
                "{} lengths for {} edges",
                lengths.len(),
                graph.edge_count()
            )));
        }
        for (e, &l) in lengths.iter().enumerate() {
            if l < 0 {
                return Err(PlanarError::NegativeLength(graph.edge_id(e), l));
            }
        }
        let next_vertex_id = graph.vertex_ids.iter().max().map_or(0, |m| m + 1);
        let next_edge_id = graph.edge_ids.iter().max().map_or(0, |m| m + 1);
        Ok(Instance { graph, lengths, next_vertex_id, next_edge_id })
    }

    /// Builds from a spec with lengths keyed by edge id.
    pub fn from_spec(spec: &RotationSpec, lengths: &BTreeMap<EdgeId, i64>) -> Result<Instance, PlanarError> {
        let graph = PlanarGraph::build(spec)?;
        let mut lens = Vec::with_capacity(graph.edge_count());
        for e in 0..graph.edge_count() {
            let id = graph.edge_id(e);
            lens.push(*lengths.get(&id).ok_or(PlanarError::UnknownEdge(id))?);
        }
        Instance::new(graph, lens)
    }

    pub fn len_of(&self, d: usize) -> i64 {
        self.lengths[d >> 1]
    }

    pub fn parity_potential(&self) -> Result<Vec<u8>, PlanarError> {
        check_parity_potential(&self.graph, &self.lengths)
    }

    pub fn length_by_id(&self) -> BTreeMap<EdgeId, i64> {
        (0..self.graph.edge_count()).map(|e| (self.graph.edge_id(e), self.lengths[e])).collect()
    }

    pub(crate) fn fresh_ids(&self) -> (VertexId, EdgeId) {
        (self.next_vertex_id, self.next_edge_id)
    }

    /// Reserve id counters so that later surgeries never reuse ids of `other`.
    pub fn reserve_ids_from(&mut self, other: &Instance) {
        self.next_vertex_id = self.next_vertex_id.max(other.next_vertex_id);
        self.next_edge_id = self.next_edge_id.max(other.next_edge_id);
    }

    pub fn path_length(&self, darts: &[usize]) -> i64 {
        darts.iter().map(|&d| self.len_of(d)).sum()
    }

    /// Darts of the boundary walk of face `f`.
    pub fn face_length(&self, f: usize) -> i64 {
        self.path_length(self.graph.face_darts(f))
    }
}

#[cfg(test)]
mod tests;
