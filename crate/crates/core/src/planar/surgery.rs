//! Embedding surgeries: contraction, insertion, deletion, subdivision, and the
//! normalization that removes zero edges, loops and parallel edges.

use std::collections::{BTreeMap, BTreeSet};

use super::{Instance, PlanarError, PlanarGraph, VertexId};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Surgery {
    /// Contract an edge of length zero.
    Contract { edge: usize },
    /// Insert a new edge of the given length across an inner face.
    InsertInFace { face: usize, x: usize, y: usize, length: i64 },
    /// Delete an edge lying on two distinct faces.
    Delete { edge: usize },
    /// Split an edge into two edges with the given lengths.
    Subdivide { edge: usize, first: i64, second: i64 },
}

/// What normalization did, in external ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NormalizeLog {
    /// `(removed, kept)` vertex merges in application order.
    pub merges: Vec<(VertexId, VertexId)>,
    pub deleted_edges: Vec<u32>,
    /// Holes that merged into another hole or vanished.
    pub holes_lost: usize,
}

impl NormalizeLog {
    pub fn is_empty(&self) -> bool {
        self.merges.is_empty() && self.deleted_edges.is_empty()
    }
}

/// Mutable working copy of a map. Darts use edge indices that stay stable
/// until `finish`.
pub(crate) struct Draft {
    vertex_ids: Vec<VertexId>,
    valive: Vec<bool>,
    edge_ids: Vec<u32>,
    ealive: Vec<bool>,
    ends: Vec<[usize; 2]>,
    lengths: Vec<i64>,
    rotation: Vec<Vec<usize>>,
    hole_darts: Vec<usize>,
    next_vid: VertexId,
    next_eid: u32,
    pub holes_lost: usize,
}

impl Draft {
    pub(crate) fn new(inst: &Instance) -> Draft {
        let g = &inst.graph;
        let (next_vid, next_eid) = inst.fresh_ids();
        Draft {
            vertex_ids: g.vertex_ids.clone(),
            valive: vec![true; g.vertex_count()],
            edge_ids: g.edge_ids.clone(),
            ealive: vec![true; g.edge_count()],
            ends: g.ends.clone(),
            lengths: inst.lengths.clone(),
            rotation: g.rotation.clone(),
            hole_darts: g.holes.iter().map(|&f| g.faces[f][0]).collect(),
            next_vid,
            next_eid,
            holes_lost: 0,
        }
    }

    fn tail(&self, d: usize) -> usize {
        self.ends[d >> 1][d & 1]
    }

    fn rot_next(&self, d: usize) -> usize {
        let list = &self.rotation[self.tail(d)];
        let i = list.iter().position(|&x| x == d).expect("dart in rotation");
        list[(i + 1) % list.len()]
    }

    fn face_next(&self, d: usize) -> usize {
        self.rot_next(d ^ 1)
    }

    pub(crate) fn face_cycle(&self, d: usize) -> Vec<usize> {
        let mut out = vec![d];
        let mut x = self.face_next(d);
        while x != d {
            out.push(x);
            x = self.face_next(x);
        }
        out
    }

    fn is_hole_face(&self, d: usize) -> bool {
        let cyc: BTreeSet<usize> = self.face_cycle(d).into_iter().collect();
        self.hole_darts.iter().any(|h| cyc.contains(h))
    }

    /// Move hole markers off edge `e` before it disappears; markers of faces
    /// consisting only of `e` are dropped.
    fn migrate_markers(&mut self, e: usize) {
        let mut kept = Vec::with_capacity(self.hole_darts.len());
        for i in 0..self.hole_darts.len() {
            let h = self.hole_darts[i];
            if h >> 1 != e {
                kept.push(h);
                continue;
            }
            match self.face_cycle(h).into_iter().find(|&x| x >> 1 != e) {
                Some(x) => kept.push(x),
                None => self.holes_lost += 1,
            }
        }
        self.hole_darts = kept;
    }

    fn dedup_markers(&mut self) {
        let mut seen: Vec<BTreeSet<usize>> = Vec::new();
        let mut kept = Vec::new();
        for &h in &self.hole_darts {
            if seen.iter().any(|s| s.contains(&h)) {
                self.holes_lost += 1;
                continue;
            }
            seen.push(self.face_cycle(h).into_iter().collect());
            kept.push(h);
        }
        self.hole_darts = kept;
    }

    /// Contract edge `e`, keeping the endpoint with the smaller id.
    /// Returns `(kept, removed)` vertex indices.
    pub(crate) fn contract(&mut self, e: usize) -> (usize, usize) {
        let [u, v] = self.ends[e];
        let keep = if self.vertex_ids[u] <= self.vertex_ids[v] { u } else { v };
        self.contract_keep(e, keep)
    }

    /// Contract edge `e` into its endpoint `keep`.
    pub(crate) fn contract_keep(&mut self, e: usize, keep: usize) -> (usize, usize) {
        self.migrate_markers(e);
        let [u, v] = self.ends[e];
        let (gone, a, b) = if u == keep { (v, 2 * e, 2 * e + 1) } else { (u, 2 * e + 1, 2 * e) };
        let rk = &self.rotation[keep];
        let ia = rk.iter().position(|&x| x == a).expect("dart at kept vertex");
        let rg = &self.rotation[gone];
        let ib = rg.iter().position(|&x| x == b).expect("dart at removed vertex");
        let mut merged = Vec::with_capacity(rk.len() + rg.len() - 2);
        for k in 1..rk.len() {
            merged.push(rk[(ia + k) % rk.len()]);
        }
        for k in 1..rg.len() {
            merged.push(rg[(ib + k) % rg.len()]);
        }
        for &d in &self.rotation[gone].clone() {
            if d >> 1 != e {
                self.ends[d >> 1][d & 1] = keep;
            }
        }
        self.rotation[keep] = merged;
        self.rotation[gone].clear();
        self.valive[gone] = false;
        self.ealive[e] = false;
        (keep, gone)
    }

    pub(crate) fn delete(&mut self, e: usize) {
        self.migrate_markers(e);
        for d in [2 * e, 2 * e + 1] {
            let t = self.tail(d);
            self.rotation[t].retain(|&x| x != d);
        }
        self.ealive[e] = false;
    }

    pub(crate) fn set_length(&mut self, e: usize, length: i64) {
        self.lengths[e] = length;
    }

    /// Insert an edge from the tail of `gx` to the tail of `gy`, placed just
    /// before those darts in their rotations (inside the face that contains
    /// both darts).
    pub(crate) fn insert_before(&mut self, gx: usize, gy: usize, length: i64) -> usize {
        let x = self.tail(gx);
        let y = self.tail(gy);
        let e = self.ends.len();
        self.ends.push([x, y]);
        self.lengths.push(length);
        self.edge_ids.push(self.next_eid);
        self.next_eid += 1;
        self.ealive.push(true);
        let px = self.rotation[x].iter().position(|&d| d == gx).expect("dart at x");
        self.rotation[x].insert(px, 2 * e);
        let py = self.rotation[y].iter().position(|&d| d == gy).expect("dart at y");
        self.rotation[y].insert(py, 2 * e + 1);
        e
    }

    /// Split edge `e = (u, v)` into `(u, w)` of length `first` and `(w, v)`
    /// of length `second`. Returns the new vertex index.
    pub(crate) fn subdivide(&mut self, e: usize, first: i64, second: i64) -> usize {
        let [_, v] = self.ends[e];
        let w = self.vertex_ids.len();
        self.vertex_ids.push(self.next_vid);
        self.next_vid += 1;
        self.valive.push(true);
        let e2 = self.ends.len();
        self.ends.push([w, v]);
        self.lengths.push(second);
        self.edge_ids.push(self.next_eid);
        self.next_eid += 1;
        self.ealive.push(true);
        self.lengths[e] = first;
        self.ends[e][1] = w;
        let pos = self.rotation[v].iter().position(|&d| d == 2 * e + 1).expect("dart at v");
        self.rotation[v][pos] = 2 * e2 + 1;
        self.rotation.push(vec![2 * e + 1, 2 * e2]);
        w
    }

    /// Contract zero edges, drop loops and resolve parallel bundles until
    /// none remain.
    pub(crate) fn normalize(&mut self, log: &mut NormalizeLog) {
        loop {
            if let Some(e) = (0..self.ends.len())
                .find(|&e| self.ealive[e] && self.lengths[e] == 0 && self.ends[e][0] != self.ends[e][1])
            {
                let (keep, gone) = self.contract(e);
                log.merges.push((self.vertex_ids[gone], self.vertex_ids[keep]));
                continue;
            }
            if let Some(e) = (0..self.ends.len()).find(|&e| self.ealive[e] && self.ends[e][0] == self.ends[e][1]) {
                log.deleted_edges.push(self.edge_ids[e]);
                self.delete(e);
                continue;
            }
            if let Some(e) = self.parallel_victim() {
                log.deleted_edges.push(self.edge_ids[e]);
                self.delete(e);
                continue;
            }
            break;
        }
        self.dedup_markers();
    }

    /// Picks the edge to delete from the first parallel bundle: a longest
    /// edge, preferring the one whose removal enlarges holes the least.
    fn parallel_victim(&self) -> Option<usize> {
        let mut by_pair: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for e in 0..self.ends.len() {
            if !self.ealive[e] {
                continue;
            }
            let [u, v] = self.ends[e];
            by_pair.entry((u.min(v), u.max(v))).or_default().push(e);
        }
        let bundle = by_pair.into_values().find(|b| b.len() > 1)?;
        let longest = bundle.iter().map(|&e| self.lengths[e]).max()?;
        bundle
            .into_iter()
            .filter(|&e| self.lengths[e] == longest)
            .min_by_key(|&e| (self.merge_cost(e), self.edge_ids[e]))
    }

    fn merge_cost(&self, e: usize) -> usize {
        let a = 2 * e;
        let b = 2 * e + 1;
        let ha = self.is_hole_face(a);
        let hb = self.is_hole_face(b);
        if !ha && !hb {
            return 0;
        }
        let va: BTreeSet<usize> = self.face_cycle(a).iter().map(|&d| self.tail(d)).collect();
        let vb: BTreeSet<usize> = self.face_cycle(b).iter().map(|&d| self.tail(d)).collect();
        let union = va.union(&vb).count();
        match (ha, hb) {
            (true, true) => union - va.len().max(vb.len()),
            (true, false) => union - va.len(),
            _ => union - vb.len(),
        }
    }

    pub(crate) fn finish(self) -> Result<Instance, PlanarError> {
        let mut vmap = vec![usize::MAX; self.vertex_ids.len()];
        let mut vertex_ids = Vec::new();
        for (v, &alive) in self.valive.iter().enumerate() {
            if alive {
                vmap[v] = vertex_ids.len();
                vertex_ids.push(self.vertex_ids[v]);
            }
        }
        let mut emap = vec![usize::MAX; self.ends.len()];
        let mut edge_ids = Vec::new();
        let mut ends = Vec::new();
        let mut lengths = Vec::new();
        for e in 0..self.ends.len() {
            if self.ealive[e] {
                emap[e] = edge_ids.len();
                edge_ids.push(self.edge_ids[e]);
                ends.push([vmap[self.ends[e][0]], vmap[self.ends[e][1]]]);
                lengths.push(self.lengths[e]);
            }
        }
        let dmap = |d: usize| 2 * emap[d >> 1] + (d & 1);
        let rotation: Vec<Vec<usize>> = (0..self.vertex_ids.len())
            .filter(|&v| self.valive[v])
            .map(|v| self.rotation[v].iter().map(|&d| dmap(d)).collect())
            .collect();
        let mut graph = PlanarGraph::assemble(vertex_ids, edge_ids, ends, rotation)?;
        let mut holes: Vec<usize> = self
            .hole_darts
            .iter()
            .filter(|&&h| self.ealive[h >> 1])
            .map(|&h| graph.face_of(dmap(h)))
            .collect();
        holes.sort_unstable();
        holes.dedup();
        graph.set_holes(holes);
        let mut inst = Instance::new(graph, lengths)?;
        inst.next_vertex_id = inst.next_vertex_id.max(self.next_vid);
        inst.next_edge_id = inst.next_edge_id.max(self.next_eid);
        Ok(inst)
    }

    pub(crate) fn hole_count(&self) -> usize {
        self.hole_darts.len()
    }
}

impl Instance {
    /// Apply one surgery with its precondition checks. Contraction is followed
    /// by removal of loops and parallel edges; any loss of a hole is reported
    /// as `HoleDestroyed`.
    pub fn apply_surgery(&self, kind: &Surgery) -> Result<Instance, PlanarError> {
        let g = &self.graph;
        let mut draft = Draft::new(self);
        let holes_before = g.holes().len();
        match *kind {
            Surgery::Contract { edge } => {
                self.check_edge(edge)?;
                if self.lengths[edge] != 0 {
                    return Err(PlanarError::SurgeryPrecondition(format!(
                        "edge {} has nonzero length",
                        g.edge_id(edge)
                    )));
                }
                draft.contract(edge);
                let mut log = NormalizeLog::default();
                draft.normalize(&mut log);
            }
            Surgery::InsertInFace { face, x, y, length } => {
                if face >= g.face_count() || g.is_hole(face) {
                    return Err(PlanarError::SurgeryPrecondition("face is not an inner face".into()));
                }
                if x == y || g.edge_between(x, y).is_some() || length < 0 {
                    return Err(PlanarError::SurgeryPrecondition(
                        "endpoints must be distinct and non-adjacent".into(),
                    ));
                }
                let darts = g.face_darts(face);
                let gx = darts.iter().copied().find(|&d| g.tail(d) == x);
                let gy = darts.iter().copied().find(|&d| g.tail(d) == y);
                match (gx, gy) {
                    (Some(gx), Some(gy)) => {
                        draft.insert_before(gx, gy, length);
                    }
                    _ => {
                        return Err(PlanarError::SurgeryPrecondition(
                            "endpoints are not on the face".into(),
                        ))
                    }
                }
            }
            Surgery::Delete { edge } => {
                self.check_edge(edge)?;
                let (a, b) = (2 * edge, 2 * edge + 1);
                if g.face_of(a) == g.face_of(b) {
                    return Err(PlanarError::SurgeryPrecondition("edge is a bridge".into()));
                }
                if g.is_hole(g.face_of(a)) && g.is_hole(g.face_of(b)) {
                    return Err(PlanarError::HoleDestroyed("deletion merges two holes".into()));
                }
                draft.delete(edge);
            }
            Surgery::Subdivide { edge, first, second } => {
                self.check_edge(edge)?;
                if first < 0 || second < 0 || first + second != self.lengths[edge] {
                    return Err(PlanarError::SurgeryPrecondition(
                        "subdivision lengths must be nonnegative and sum to the edge length".into(),
                    ));
                }
                draft.subdivide(edge, first, second);
            }
        }
        if draft.hole_count() < holes_before || draft.holes_lost > 0 {
            return Err(PlanarError::HoleDestroyed(format!("{kind:?}")));
        }
        let out = draft.finish()?;
        out.parity_potential()?;
        Ok(out)
    }

    fn check_edge(&self, e: usize) -> Result<(), PlanarError> {
        if e < self.graph.edge_count() {
            Ok(())
        } else {
            Err(PlanarError::SurgeryPrecondition(format!("no edge with index {e}")))
        }
    }

    /// Contract all zero edges and remove loops and parallel edges, keeping
    /// the smaller vertex id on every merge. Holes may merge or vanish.
    pub fn normalize(&self) -> Result<(Instance, NormalizeLog), PlanarError> {
        let mut draft = Draft::new(self);
        let mut log = NormalizeLog::default();
        draft.normalize(&mut log);
        log.holes_lost = draft.holes_lost;
        Ok((draft.finish()?, log))
    }

    /// Run a sequence of draft edits followed by normalization. Holes may
    /// merge or vanish; the log records it.
    pub(crate) fn edit_normalized<F>(&self, f: F) -> Result<(Instance, NormalizeLog), PlanarError>
    where
        F: FnOnce(&mut Draft),
    {
        let mut draft = Draft::new(self);
        f(&mut draft);
        let mut log = NormalizeLog::default();
        draft.normalize(&mut log);
        log.holes_lost = draft.holes_lost;
        Ok((draft.finish()?, log))
    }

    /// Whether `normalize` would change anything.
    pub fn needs_normalize(&self) -> bool {
        self.lengths.contains(&0) || self.graph.c1_violation().is_some_and(|m| {
            m.contains("parallel") || m.contains("loop")
        })
    }

    /// Subdivide several edges at once. Each request is `(edge, offsets)`
    /// where `offsets` are strictly increasing distances from the first
    /// endpoint of the edge, all strictly inside it. Returns new vertex
    /// indices per request, in offset order.
    pub fn subdivide_many(&self, requests: &[(usize, Vec<i64>)]) -> Result<(Instance, Vec<Vec<VertexId>>), PlanarError> {
        let mut draft = Draft::new(self);
        let mut created = Vec::new();
        for (edge, offsets) in requests {
            let total = self.lengths[*edge];
            let mut ids = Vec::new();
            let mut cur = *edge;
            let mut done = 0;
            for &off in offsets {
                if off <= done || off >= total {
                    return Err(PlanarError::SurgeryPrecondition("bad subdivision offset".into()));
                }
                let rest = total - off;
                let w = draft.subdivide(cur, off - done, rest);
                ids.push(draft.vertex_ids[w]);
                cur = draft.ends.len() - 1;
                done = off;
            }
            created.push(ids);
        }
        Ok((draft.finish()?, created))
    }

    /// Remove degree-two vertices from the given list, merging their two
    /// edges into one with the summed length. Vertices that are not of
    /// degree two, or whose merge would create a parallel edge, are kept.
    pub fn suppress_vertices(&self, ids: &[VertexId]) -> Result<Instance, PlanarError> {
        let mut cur = self.clone();
        for &id in ids {
            let Some(w) = cur.graph.vertex_index(id) else { continue };
            if cur.graph.degree(w) != 2 {
                continue;
            }
            let r = cur.graph.rotation(w).to_vec();
            let (p, q) = (cur.graph.head(r[0]), cur.graph.head(r[1]));
            if p == q || cur.graph.edge_between(p, q).is_some() {
                continue;
            }
            let e0 = r[0] >> 1;
            let e1 = r[1] >> 1;
            let total = cur.lengths[e0] + cur.lengths[e1];
            let mut draft = Draft::new(&cur);
            draft.lengths[e0] = total;
            draft.lengths[e1] = 0;
            draft.contract_keep(e1, q);
            cur = draft.finish()?;
        }
        Ok(cur)
    }
}
