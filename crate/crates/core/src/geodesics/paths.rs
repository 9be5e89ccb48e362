//! Hole boundary arcs, extremal shortest paths and the regions they cut off.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{dag_darts, DistanceTable, GeodesicError};
use crate::planar::{Instance, PlanarGraph};

/// The boundary cycle of a hole, as the darts having the hole on their left.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HoleBoundary {
    pub face: usize,
    pub darts: Vec<usize>,
    /// `vertices[k]` is the tail of `darts[k]`.
    pub vertices: Vec<usize>,
    /// `prefix[k]` is the length of `darts[..k]`.
    pub prefix: Vec<i64>,
}

impl HoleBoundary {
    pub fn of(inst: &Instance, face: usize) -> HoleBoundary {
        let g = &inst.graph;
        let darts = g.face_darts(face).to_vec();
        let vertices = darts.iter().map(|&d| g.tail(d)).collect();
        let mut prefix = vec![0];
        for &d in &darts {
            prefix.push(prefix.last().unwrap() + inst.len_of(d));
        }
        HoleBoundary { face, darts, vertices, prefix }
    }

    pub fn len(&self) -> usize {
        self.darts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.darts.is_empty()
    }

    pub fn sigma(&self) -> i64 {
        *self.prefix.last().unwrap()
    }

    /// Index of the first occurrence of `v` on the boundary.
    pub fn position(&self, v: usize) -> Option<usize> {
        self.vertices.iter().position(|&w| w == v)
    }

    /// Darts from `vertices[i]` forward to `vertices[j]`.
    pub fn arc(&self, i: usize, j: usize) -> Vec<usize> {
        let m = self.len();
        let mut out = Vec::new();
        let mut k = i;
        while k != j {
            out.push(self.darts[k]);
            k = (k + 1) % m;
        }
        out
    }

    /// Length of the forward arc from `vertices[i]` to `vertices[j]`.
    pub fn arc_length(&self, i: usize, j: usize) -> i64 {
        if i <= j {
            self.prefix[j] - self.prefix[i]
        } else {
            self.sigma() - self.prefix[i] + self.prefix[j]
        }
    }

    /// The outgoing dart at `vertices[i]` that bounds, together with the
    /// first dart of the arc starting there, the corner of the hole.
    pub fn reference(&self, g: &PlanarGraph, i: usize) -> usize {
        let m = self.len();
        g.twin(self.darts[(i + m - 1) % m])
    }
}

/// Which extremal path to follow inside a region lying to the right of a
/// boundary arc.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Closest to the arc: sharpest left turn first.
    Near,
    /// Farthest from the arc: sharpest right turn first.
    Remote,
}

/// Walk from `s` to `t` over allowed darts, at every vertex choosing the
/// first allowed dart in a rotation sweep from `reference`, an outgoing dart
/// at `s` bounding the side the walk stays on. At later vertices the sweep
/// starts from the reversed incoming dart.
pub fn extremal_walk(
    g: &PlanarGraph,
    allowed: &[bool],
    s: usize,
    t: usize,
    reference: usize,
    side: Side,
) -> Option<Vec<usize>> {
    let mut out = Vec::new();
    let mut v = s;
    let mut r = reference;
    while v != t {
        if out.len() > g.dart_count() {
            return None;
        }
        // Near sweeps clockwise starting after the reference, remote sweeps
        // counterclockwise starting at it.
        let mut d = match side {
            Side::Near => g.rot_next(r),
            Side::Remote => r,
        };
        let mut found = None;
        for _ in 0..g.degree(v) {
            if allowed[d] {
                found = Some(d);
                break;
            }
            d = match side {
                Side::Near => g.rot_next(d),
                Side::Remote => g.rot_prev(d),
            };
        }
        let d = found?;
        out.push(d);
        v = g.head(d);
        r = g.twin(d);
    }
    Some(out)
}

fn mask(g: &PlanarGraph, darts: &[usize]) -> Vec<bool> {
    let mut m = vec![false; g.dart_count()];
    for &d in darts {
        m[d] = true;
    }
    m
}

/// Number of holes strictly inside a region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PairType {
    pub tau: usize,
}

/// Faces enclosed between a path and a boundary arc of `hole`, on the side
/// away from the hole.
pub fn region_between(g: &PlanarGraph, hole: usize, path: &[usize], arc: &[usize]) -> BTreeSet<usize> {
    g.faces_cut_off(&[path, arc], hole)
}

/// The type of a pair `(P, L)`: holes inside the region they bound away
/// from the hole of `L`.
pub fn classify_type(g: &PlanarGraph, hole: usize, path: &[usize], arc: &[usize]) -> PairType {
    let region = region_between(g, hole, path, arc);
    PairType { tau: g.holes_in(&region).len() }
}

/// `true` if the boundary arc is longer than the distance of its ends.
pub fn pair_is_excessive(inst: &Instance, dist: &DistanceTable, path: &[usize], arc: &[usize]) -> Result<bool, GeodesicError> {
    let g = &inst.graph;
    let (s, t) = match (path.first(), path.last()) {
        (Some(&a), Some(&b)) => (g.tail(a), g.head(b)),
        _ => return Ok(false),
    };
    let lp = inst.path_length(path);
    if lp != dist.get(s, t) {
        return Err(GeodesicError::NotAGeodesic(lp, dist.get(s, t)));
    }
    Ok(inst.path_length(arc) > lp)
}

/// The type-0 shortest paths between the ends of a shortest boundary arc and
/// the most remote of them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeodesicRegion {
    pub hole: usize,
    pub s: usize,
    pub t: usize,
    /// The boundary arc `L`, from `s` to `t` with the hole on its left.
    pub boundary: Vec<usize>,
    /// The most remote type-0 shortest path `D`.
    pub remote: Vec<usize>,
    /// Darts lying on some type-0 shortest path, oriented from `s` to `t`.
    pub union: Vec<usize>,
    /// Faces between `L` and `D`.
    pub region: BTreeSet<usize>,
}

/// The nearest shortest path from `s` to `t` to the right of the arc starting
/// at boundary index `i`.
pub fn nearest_path(inst: &Instance, dist: &DistanceTable, hb: &HoleBoundary, i: usize, t: usize) -> Option<Vec<usize>> {
    let g = &inst.graph;
    let s = hb.vertices[i];
    let allowed = mask(g, &dag_darts(inst, dist, s, t));
    extremal_walk(g, &allowed, s, t, hb.reference(g, i), Side::Near)
}

/// Compute `D(st)` for the arc from boundary index `i` to index `j`.
pub fn geodesic_region(
    inst: &Instance,
    dist: &DistanceTable,
    hb: &HoleBoundary,
    i: usize,
    j: usize,
) -> Result<GeodesicRegion, GeodesicError> {
    let g = &inst.graph;
    let (s, t) = (hb.vertices[i], hb.vertices[j]);
    let boundary = hb.arc(i, j);
    let lb = inst.path_length(&boundary);
    if lb != dist.get(s, t) {
        return Err(GeodesicError::NotShortestBoundary(lb, dist.get(s, t)));
    }
    if s == t {
        return Ok(GeodesicRegion {
            hole: hb.face,
            s,
            t,
            boundary,
            remote: Vec::new(),
            union: Vec::new(),
            region: BTreeSet::new(),
        });
    }
    let reference = hb.reference(g, i);
    let dag = dag_darts(inst, dist, s, t);
    let dag_mask = mask(g, &dag);
    let mut in_union = vec![false; g.dart_count()];
    for &a in &dag {
        if in_union[a] {
            continue;
        }
        let u = g.tail(a);
        let head_part = if u == s {
            Vec::new()
        } else {
            let allowed = mask(g, &dag_darts(inst, dist, s, u));
            match extremal_walk(g, &allowed, s, u, reference, Side::Near) {
                Some(p) => p,
                None => continue,
            }
        };
        let Some(tail_part) = extremal_walk(g, &dag_mask, g.head(a), t, g.twin(a), Side::Near) else {
            continue;
        };
        let mut path = head_part;
        path.push(a);
        path.extend(tail_part);
        if classify_type(g, hb.face, &path, &boundary).tau == 0 {
            for d in path {
                in_union[d] = true;
            }
        }
    }
    let union: Vec<usize> = (0..g.dart_count()).filter(|&d| in_union[d]).collect();
    let remote = extremal_walk(g, &in_union, s, t, reference, Side::Remote).unwrap_or_else(|| boundary.clone());
    let region = region_between(g, hb.face, &remote, &boundary);
    Ok(GeodesicRegion { hole: hb.face, s, t, boundary, remote, union, region })
}

/// All shortest `s`-`t` paths as dart lists, up to `cap` of them.
pub fn enumerate_shortest_paths(inst: &Instance, dist: &DistanceTable, s: usize, t: usize, cap: usize) -> Vec<Vec<usize>> {
    let g = &inst.graph;
    let allowed = mask(g, &dag_darts(inst, dist, s, t));
    let mut out = Vec::new();
    let mut stack = Vec::new();
    fn rec(
        g: &PlanarGraph,
        allowed: &[bool],
        on_path: &mut [bool],
        v: usize,
        t: usize,
        stack: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
        cap: usize,
    ) {
        if out.len() >= cap {
            return;
        }
        if v == t {
            out.push(stack.clone());
            return;
        }
        on_path[v] = true;
        for &d in g.rotation(v) {
            if allowed[d] && !on_path[g.head(d)] {
                stack.push(d);
                rec(g, allowed, on_path, g.head(d), t, stack, out, cap);
                stack.pop();
            }
        }
        on_path[v] = false;
    }
    let mut on_path = vec![false; g.vertex_count()];
    rec(g, &allowed, &mut on_path, s, t, &mut stack, &mut out, cap);
    out
}
