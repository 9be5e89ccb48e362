//! The necklace of a hole: the union of its type-0 geodesics, directed
//! coherently, with a cyclic potential modulo the boundary length.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::geodesics::{classify_type, enumerate_shortest_paths, geodesic_region, DistanceTable, GeodesicError, HoleBoundary};
use crate::planar::{Instance, PlanarGraph, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NecklaceError {
    #[error("potentials disagree at vertex {vertex}: {first} and {second} modulo {sigma}")]
    PotentialClash { vertex: VertexId, first: i64, second: i64, sigma: i64 },
    #[error("edge {0} is used in both directions")]
    DirectionConflict(crate::planar::EdgeId),
    #[error(transparent)]
    Geodesic(#[from] GeodesicError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Necklace {
    pub hole: usize,
    pub sigma: i64,
    /// Directed darts of the necklace, sorted.
    pub darts: Vec<usize>,
    /// Potential in `0..sigma` of every necklace vertex.
    pub potential: BTreeMap<usize, i64>,
    /// Boundary indices `(i, t_i)` of the maximal shortest boundary arcs.
    pub arcs: Vec<(usize, usize)>,
    /// `true` if the necklace is the hole boundary alone.
    pub trivial: bool,
}

/// Maximal shortest forward arcs of the boundary, as index pairs `(i, j)`.
pub fn maximal_arcs(dist: &DistanceTable, hb: &HoleBoundary) -> Vec<(usize, usize)> {
    let m = hb.len();
    let reach: Vec<usize> = (0..m)
        .map(|i| {
            (1..m)
                .take_while(|&k| {
                    let j = (i + k) % m;
                    hb.arc_length(i, j) == dist.get(hb.vertices[i], hb.vertices[j])
                })
                .last()
                .unwrap_or(0)
        })
        .collect();
    // The arc from `i` is maximal unless the arc from `i - 1` already covers it.
    (0..m)
        .filter(|&i| reach[i] > 0)
        .filter(|&i| {
            let p = (i + m - 1) % m;
            reach[p] < reach[i] + 1
        })
        .map(|i| (i, (i + reach[i]) % m))
        .collect()
}

/// Assemble the necklace of `hole` and its cyclic potential.
pub fn build_necklace(inst: &Instance, dist: &DistanceTable, hole: usize) -> Result<Necklace, NecklaceError> {
    let g = &inst.graph;
    let hb = HoleBoundary::of(inst, hole);
    let sigma = hb.sigma();
    let mut potential: BTreeMap<usize, i64> = BTreeMap::new();
    let assign = |v: usize, p: i64, potential: &mut BTreeMap<usize, i64>| -> Result<(), NecklaceError> {
        let p = p.rem_euclid(sigma);
        match potential.insert(v, p) {
            Some(q) if q != p => Err(NecklaceError::PotentialClash { vertex: g.vertex_id(v), first: q, second: p, sigma }),
            _ => Ok(()),
        }
    };
    for (k, &v) in hb.vertices.iter().enumerate() {
        assign(v, hb.prefix[k], &mut potential)?;
    }
    let mut darts: BTreeSet<usize> = hb.darts.iter().copied().collect();
    let arcs = maximal_arcs(dist, &hb);
    for &(i, j) in &arcs {
        let region = geodesic_region(inst, dist, &hb, i, j)?;
        let s = hb.vertices[i];
        for &d in region.union.iter().chain(&region.boundary) {
            darts.insert(d);
            for v in [g.tail(d), g.head(d)] {
                assign(v, hb.prefix[i] + dist.get(s, v), &mut potential)?;
            }
        }
    }
    if let Some(&d) = darts.iter().find(|&&d| darts.contains(&(d ^ 1))) {
        return Err(NecklaceError::DirectionConflict(g.edge_id(d >> 1)));
    }
    let boundary: BTreeSet<usize> = hb.darts.iter().copied().collect();
    let trivial = darts == boundary;
    Ok(Necklace { hole, sigma, darts: darts.into_iter().collect(), potential, arcs, trivial })
}

impl Necklace {
    /// Darts violating `l(e) = pi(v) - pi(u)`, taken modulo `sigma` into
    /// `1..=sigma`.
    pub fn edge_rule_violations(&self, inst: &Instance) -> Vec<usize> {
        let g = &inst.graph;
        self.darts
            .iter()
            .copied()
            .filter(|&d| {
                let (pu, pv) = (self.potential[&g.tail(d)], self.potential[&g.head(d)]);
                let expect = if pu <= pv { pv - pu } else { pv - pu + self.sigma };
                inst.len_of(d) != expect
            })
            .collect()
    }

    /// Simple directed cycles as dart lists, at most `cap` of them; the flag
    /// tells whether the enumeration was cut short.
    pub fn directed_cycles(&self, g: &PlanarGraph, cap: usize) -> (Vec<Vec<usize>>, bool) {
        let mut out_darts: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &d in &self.darts {
            out_darts.entry(g.tail(d)).or_default().push(d);
        }
        let mut cycles = Vec::new();
        let mut truncated = false;
        let vertices: Vec<usize> = self.potential.keys().copied().collect();
        for &root in &vertices {
            let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
            let mut path: Vec<usize> = Vec::new();
            let mut on_path: BTreeSet<usize> = BTreeSet::from([root]);
            while let Some(top) = stack.last_mut() {
                let (v, k) = *top;
                top.1 += 1;
                let outs = out_darts.get(&v).map(Vec::as_slice).unwrap_or(&[]);
                if k >= outs.len() {
                    stack.pop();
                    on_path.remove(&v);
                    path.pop();
                    continue;
                }
                let d = outs[k];
                let w = g.head(d);
                if w == root {
                    let mut c = path.clone();
                    c.push(d);
                    cycles.push(c);
                    if cycles.len() >= cap {
                        truncated = true;
                        return (cycles, truncated);
                    }
                } else if w > root && !on_path.contains(&w) {
                    on_path.insert(w);
                    path.push(d);
                    stack.push((w, 0));
                }
            }
        }
        (cycles, truncated)
    }

    /// Faces on the hole side of a closed directed walk.
    pub fn enclosed(&self, g: &PlanarGraph, cycle: &[usize]) -> BTreeSet<usize> {
        let barrier: BTreeSet<usize> = cycle.iter().map(|&d| d >> 1).collect();
        let split = g.split_faces(&barrier);
        let c = split.component[self.hole];
        (0..g.face_count()).filter(|&f| split.component[f] == c).collect()
    }

    /// Check that every simple directed cycle has length `sigma` and leaves
    /// all other holes outside its hole-side region. Returns the number of
    /// cycles checked.
    pub fn check_cycles(&self, inst: &Instance, cap: usize) -> Result<usize, String> {
        let g = &inst.graph;
        let (cycles, truncated) = self.directed_cycles(g, cap);
        if truncated {
            return Err(format!("more than {cap} directed cycles"));
        }
        for c in &cycles {
            let len = inst.path_length(c);
            if len != self.sigma {
                return Err(format!("directed cycle of length {len}, boundary length {}", self.sigma));
            }
            let inside = self.enclosed(g, c);
            if g.holes().iter().any(|&h| h != self.hole && inside.contains(&h)) {
                return Err("directed cycle encloses another hole".into());
            }
        }
        Ok(cycles.len())
    }

    /// The union of the hole-side regions of all directed cycles, and the
    /// length of its boundary (the maximal cycle).
    pub fn maximal_region(&self, inst: &Instance, cap: usize) -> (BTreeSet<usize>, i64) {
        let g = &inst.graph;
        let (cycles, _) = self.directed_cycles(g, cap);
        let mut region: BTreeSet<usize> = BTreeSet::from([self.hole]);
        for c in &cycles {
            region.extend(self.enclosed(g, c));
        }
        let len = (0..g.edge_count())
            .filter(|&e| region.contains(&g.face_of(2 * e)) != region.contains(&g.face_of(2 * e + 1)))
            .map(|e| inst.lengths[e])
            .sum();
        (region, len)
    }
}

/// The type of a hole: the largest, over shortest paths between two of its
/// boundary vertices, of the smaller hole count on the two sides. Paths are
/// enumerated up to `cap` per pair.
pub fn hole_type(inst: &Instance, dist: &DistanceTable, hole: usize, cap: usize) -> usize {
    let g = &inst.graph;
    let hb = HoleBoundary::of(inst, hole);
    let m = hb.len();
    let mut best = 0;
    for i in 0..m {
        for j in i + 1..m {
            let (s, t) = (hb.vertices[i], hb.vertices[j]);
            if s == t {
                continue;
            }
            let (l1, l2) = (hb.arc(i, j), hb.arc(j, i));
            for p in enumerate_shortest_paths(inst, dist, s, t, cap) {
                let tau = classify_type(g, hole, &p, &l1).tau.min(classify_type(g, hole, &p, &l2).tau);
                best = best.max(tau);
            }
        }
    }
    best
}
