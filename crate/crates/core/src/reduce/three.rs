//! Reduction III: cuts through a hole edge and a chord of an adjacent inner
//! face, found in the part of the graph cut off by a type-1 geodesic.

use std::collections::{BTreeMap, BTreeSet};

use super::{ReduceContext, ReduceError};
use crate::geodesics::{all_distances, dag_darts, enumerate_shortest_paths, extremal_walk, DistanceTable, Side};
use crate::metricspace::VertexSet;
use crate::planar::{Instance, PlanarGraph, Surgery, VertexId};
use crate::twohole::{certify_reduction, make_certificate, pack_cuts_small_holes, MonotonicityCheck, ReductionCertificate};

/// A configuration `(F, e, x, y, z, s)` admitting the reduction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChordCandidate {
    pub hole: usize,
    pub face: usize,
    pub x: VertexId,
    pub y: VertexId,
    pub z: VertexId,
    pub s: VertexId,
    /// `(d(xy) + d(xz) - d(yz)) / 2`.
    pub a1: i64,
}

/// `true` if some edge lies on no hole boundary, or some inner face has at
/// least four vertices.
pub fn has_inner_structure(g: &PlanarGraph) -> bool {
    let on_hole = |e: usize| g.is_hole(g.face_of(2 * e)) || g.is_hole(g.face_of(2 * e + 1));
    (0..g.edge_count()).any(|e| !on_hole(e)) || (0..g.face_count()).any(|f| !g.is_hole(f) && g.face_darts(f).len() >= 4)
}

fn face_qualifies(g: &PlanarGraph, f: usize) -> bool {
    g.face_darts(f).len() >= 4 || g.face_darts(f).iter().any(|&d| !g.is_hole(g.face_of(d ^ 1)))
}

/// The instance with chords `xz` and `yz` drawn in face `f`, and the index
/// of the triangle face they bound with `xy`.
struct Augmented {
    inst: Instance,
    x: usize,
    z: usize,
    xz: usize,
    triangle: usize,
}

fn augment(inst: &Instance, dist: &DistanceTable, f: usize, x: usize, y: usize, z: usize) -> Option<Augmented> {
    let g = &inst.graph;
    let on_face = |a: usize, b: usize, face: usize, g: &PlanarGraph| {
        g.edge_between(a, b).is_some_and(|e| g.face_of(2 * e) == face || g.face_of(2 * e + 1) == face)
    };
    let mut cur = inst.clone();
    let (ix, iy, iz) = (g.vertex_id(x), g.vertex_id(y), g.vertex_id(z));
    if g.edge_between(x, z).is_some() {
        if !on_face(x, z, f, g) || inst.lengths[g.edge_between(x, z)?] != dist.get(x, z) {
            return None;
        }
    } else {
        cur = cur.apply_surgery(&Surgery::InsertInFace { face: f, x, y: z, length: dist.get(x, z) }).ok()?;
    }
    let cg = &cur.graph;
    let (cx, cy, cz) = (cg.vertex_index(ix)?, cg.vertex_index(iy)?, cg.vertex_index(iz)?);
    // The face on the inner side of `xy`.
    let exy = cg.edge_between(cx, cy)?;
    let side = if cg.is_hole(cg.face_of(2 * exy)) { 2 * exy + 1 } else { 2 * exy };
    let inner = cg.face_of(side);
    if let Some(eyz) = cg.edge_between(cy, cz) {
        if !on_face(cy, cz, inner, cg) || cur.lengths[eyz] != dist.get(y, z) {
            return None;
        }
    } else {
        cur = cur.apply_surgery(&Surgery::InsertInFace { face: inner, x: cy, y: cz, length: dist.get(y, z) }).ok()?;
    }
    let cg = &cur.graph;
    let (cx, cy, cz) = (cg.vertex_index(ix)?, cg.vertex_index(iy)?, cg.vertex_index(iz)?);
    let exy = cg.edge_between(cx, cy)?;
    let side = if cg.is_hole(cg.face_of(2 * exy)) { 2 * exy + 1 } else { 2 * exy };
    let triangle = cg.face_of(side);
    if cg.face_darts(triangle).len() != 3 {
        return None;
    }
    let xz = cg.edge_between(cx, cz)?;
    Some(Augmented { inst: cur, x: cx, z: cz, xz, triangle })
}

/// Faces of the side of `x -> z -> s` away from the triangle, if the path
/// splits the complement of the hole into exactly two parts with one other
/// hole each.
fn far_side(aug: &Augmented, hole_face: usize, path: &[usize]) -> Option<BTreeSet<usize>> {
    let g = &aug.inst.graph;
    let mut barrier: BTreeSet<usize> = path.iter().map(|&d| d >> 1).collect();
    barrier.insert(aug.xz);
    barrier.extend(g.face_darts(hole_face).iter().map(|&d| d >> 1));
    let split = g.split_faces(&barrier);
    if split.count != 3 {
        return None;
    }
    let near = split.component[aug.triangle];
    let hc = split.component[hole_face];
    let far: BTreeSet<usize> = (0..g.face_count()).filter(|&f| split.component[f] != near && split.component[f] != hc).collect();
    let near_faces: BTreeSet<usize> = (0..g.face_count()).filter(|&f| split.component[f] == near).collect();
    (g.holes_in(&far).len() == 1 && g.holes_in(&near_faces).len() == 1).then_some(far)
}

/// Shortest `z`-`s` paths to try: the two extremal ones, then a bounded
/// enumeration.
fn candidate_paths(aug: &Augmented, dist: &DistanceTable, s: usize) -> Vec<Vec<usize>> {
    let inst = &aug.inst;
    let g = &inst.graph;
    let dag = dag_darts(inst, dist, aug.z, s);
    let mut allowed = vec![false; g.dart_count()];
    for &d in &dag {
        allowed[d] = true;
    }
    let reference = 2 * aug.xz + usize::from(g.tail(2 * aug.xz) != aug.z);
    let mut out = Vec::new();
    for side in [Side::Near, Side::Remote] {
        if let Some(p) = extremal_walk(g, &allowed, aug.z, s, reference, side) {
            if !out.contains(&p) {
                out.push(p);
            }
        }
    }
    for p in enumerate_shortest_paths(inst, dist, aug.z, s, 64) {
        if !out.contains(&p) {
            out.push(p);
        }
    }
    out
}

/// Try one candidate `(F, e, x, y, z)`; on success return it with its
/// certificate.
fn try_candidate(
    inst: &Instance,
    dist: &DistanceTable,
    ctx: &ReduceContext,
    hole: usize,
    f: usize,
    (x, y, z): (usize, usize, usize),
    oracle_calls: &mut usize,
) -> Result<Option<(ChordCandidate, ReductionCertificate)>, ReduceError> {
    let g = &inst.graph;
    let twice_a1 = dist.get(x, y) + dist.get(x, z) - dist.get(y, z);
    if twice_a1 <= 0 {
        return Ok(None);
    }
    let Some(aug) = augment(inst, dist, f, x, y, z) else { return Ok(None) };
    let ag = &aug.inst.graph;
    let Some(hole_face) = ag.holes().iter().copied().find(|&h| ag.face_key(h) == g.face_key(hole)) else {
        return Ok(None);
    };
    let adist = all_distances(&aug.inst, ctx.mode);
    let hole_vertices = ag.face_vertices(hole_face);
    for &s in &hole_vertices {
        if s == aug.x || s == aug.z || adist.get(aug.x, aug.z) + adist.get(aug.z, s) != adist.get(aug.x, s) {
            continue;
        }
        for q in candidate_paths(&aug, &adist, s) {
            if q.iter().any(|&d| d >> 1 == aug.xz) {
                continue;
            }
            let Some(mut region) = far_side(&aug, hole_face, &q) else { continue };
            region.insert(aug.triangle);
            let Ok(sub) = aug.inst.sub_instance(&region, ag.holes(), true) else { continue };
            if sub.instance.graph.holes().len() != 2 {
                continue;
            }
            *oracle_calls += 1;
            let Ok(packing) = pack_cuts_small_holes(&sub.instance, ctx.oracle) else { continue };
            let sg = &sub.instance.graph;
            let all: VertexSet = sg.vertex_ids().iter().copied().collect();
            let (ix, iy, iz) = (g.vertex_id(x), g.vertex_id(y), g.vertex_id(z));
            let mut cuts = Vec::new();
            for (side, w) in packing.cuts {
                let cx = side.contains(&ix);
                if cx == side.contains(&iy) || cx == side.contains(&iz) {
                    continue;
                }
                let side = if cx { side } else { all.difference(&side).copied().collect() };
                cuts.push((side, w));
            }
            let total: i64 = cuts.iter().map(|(_, w)| w).sum();
            if 2 * total != twice_a1 {
                continue;
            }
            let cand = ChordCandidate { hole, face: f, x: ix, y: iy, z: iz, s: ag.vertex_id(s), a1: total };
            let cert = certificate(inst, &cand, cuts);
            if certify_reduction(inst, &cert, MonotonicityCheck::None, ctx.mode).ok {
                return Ok(Some((cand, cert)));
            }
        }
    }
    Ok(None)
}

/// Reduction III applied to the first configuration found.
pub fn reduction_three(
    inst: &Instance,
    dist: &DistanceTable,
    ctx: &ReduceContext,
) -> Result<(Option<ReductionCertificate>, usize), ReduceError> {
    let g = &inst.graph;
    let mut calls = 0;
    if g.holes().len() != 3 || !has_inner_structure(g) {
        return Ok((None, 0));
    }
    for &h in g.holes() {
        for &d in g.face_darts(h) {
            let f = g.face_of(d ^ 1);
            if g.is_hole(f) || !face_qualifies(g, f) {
                continue;
            }
            let (u, v) = (g.tail(d), g.head(d));
            for (x, y) in [(u, v), (v, u)] {
                for z in g.face_vertices(f) {
                    if z == x || z == y {
                        continue;
                    }
                    if let Some((_, cert)) = try_candidate(inst, dist, ctx, h, f, (x, y, z), &mut calls)? {
                        return Ok((Some(cert), calls));
                    }
                }
            }
        }
    }
    Ok((None, calls))
}

fn certificate(inst: &Instance, cand: &ChordCandidate, cuts: Vec<(VertexSet, i64)>) -> ReductionCertificate {
    let mut registers = BTreeMap::new();
    registers.insert("a1".to_string(), cand.a1);
    registers.insert("x".to_string(), i64::from(cand.x));
    registers.insert("y".to_string(), i64::from(cand.y));
    registers.insert("z".to_string(), i64::from(cand.z));
    registers.insert("s".to_string(), i64::from(cand.s));
    make_certificate(inst, "reduction III", cuts, registers)
}
