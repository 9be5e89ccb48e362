//! Excessive boundary arcs whose region holds at most one hole.

use std::collections::{BTreeMap, BTreeSet};

use super::{ReduceContext, ReduceError};
use crate::geodesics::{classify_type, nearest_path, region_between, DistanceTable, HoleBoundary};
use crate::metricspace::VertexSet;
use crate::planar::{Instance, VertexId};
use crate::twohole::{make_certificate, pack_cuts_small_holes, ReductionCertificate};

/// An excessive pair `(P, L)` of type at most one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExcessivePair {
    pub hole: usize,
    /// Boundary indices of the arc ends.
    pub i: usize,
    pub j: usize,
    pub path: Vec<usize>,
    pub arc: Vec<usize>,
    pub tau: usize,
    pub alpha: i64,
}

/// Arcs `(i, j)` of a hole boundary ordered by the number of darts, then by
/// start index.
fn arcs_by_size(m: usize) -> impl Iterator<Item = (usize, usize)> {
    (1..m).flat_map(move |len| (0..m).map(move |i| (i, (i + len) % m)))
}

/// The first excessive pair of type at most one whose nearest shortest path
/// meets the arc only at its ends.
pub fn find_excessive_pair(inst: &Instance, dist: &DistanceTable) -> Option<ExcessivePair> {
    let g = &inst.graph;
    for &h in g.holes() {
        let hb = HoleBoundary::of(inst, h);
        for (i, j) in arcs_by_size(hb.len()) {
            let (s, t) = (hb.vertices[i], hb.vertices[j]);
            if s == t {
                continue;
            }
            let d = dist.get(s, t);
            let la = hb.arc_length(i, j);
            if la <= d {
                continue;
            }
            let Some(path) = nearest_path(inst, dist, &hb, i, t) else { continue };
            let arc = hb.arc(i, j);
            let inner: BTreeSet<usize> = arc.iter().skip(1).map(|&a| g.tail(a)).collect();
            if path.iter().any(|&p| inner.contains(&g.head(p))) {
                continue;
            }
            let tau = classify_type(g, h, &path, &arc).tau;
            if tau > 1 {
                continue;
            }
            return Some(ExcessivePair { hole: h, i, j, path, arc, tau, alpha: (la - d) / 2 });
        }
    }
    None
}

/// Cuts of the region packing that cross the arc twice and miss the path,
/// with the side away from the path.
pub fn reduction_one_cuts(inst: &Instance, pair: &ExcessivePair, ctx: &ReduceContext) -> Result<Vec<(VertexSet, i64)>, ReduceError> {
    let g = &inst.graph;
    let region = region_between(g, pair.hole, &pair.path, &pair.arc);
    let sub = inst.sub_instance(&region, g.holes(), true)?;
    let packing = pack_cuts_small_holes(&sub.instance, ctx.oracle)?;
    let sg = &sub.instance.graph;
    let sub_ids: VertexSet = sg.vertex_ids().iter().copied().collect();
    let edge_ids = |darts: &[usize]| -> Vec<(VertexId, VertexId)> {
        darts
            .iter()
            .map(|&d| {
                let [u, v] = g.ends(d >> 1);
                (g.vertex_id(u), g.vertex_id(v))
            })
            .collect()
    };
    let arc_edges = edge_ids(&pair.arc);
    let path_edges = edge_ids(&pair.path);
    let crossings = |x: &VertexSet, edges: &[(VertexId, VertexId)]| edges.iter().filter(|(u, v)| x.contains(u) != x.contains(v)).count();
    let s = g.vertex_id(g.tail(pair.path[0]));
    let mut out = Vec::new();
    for (x, w) in packing.cuts {
        if crossings(&x, &arc_edges) != 2 || crossings(&x, &path_edges) != 0 {
            continue;
        }
        let side = if x.contains(&s) { sub_ids.difference(&x).copied().collect() } else { x };
        out.push((side, w));
    }
    Ok(out)
}

/// Reduction I applied to the first excessive pair, if any.
pub fn reduction_one(
    inst: &Instance,
    dist: &DistanceTable,
    ctx: &ReduceContext,
) -> Result<Option<ReductionCertificate>, ReduceError> {
    let Some(pair) = find_excessive_pair(inst, dist) else { return Ok(None) };
    let cuts = reduction_one_cuts(inst, &pair, ctx)?;
    let total: i64 = cuts.iter().map(|(_, w)| w).sum();
    if total != pair.alpha {
        return Err(ReduceError::CertificationFailure(format!(
            "reduction I: cuts crossing the arc twice weigh {total}, expected {}",
            pair.alpha
        )));
    }
    let g = &inst.graph;
    let mut registers = BTreeMap::new();
    registers.insert("alpha".to_string(), pair.alpha);
    registers.insert("tau".to_string(), pair.tau as i64);
    registers.insert("s".to_string(), g.vertex_id(g.tail(pair.path[0])) as i64);
    registers.insert("t".to_string(), g.vertex_id(g.head(*pair.path.last().unwrap())) as i64);
    Ok(Some(make_certificate(inst, "reduction I", cuts, registers)))
}

/// `true` if every hole boundary pair has a shortest boundary arc.
pub fn check_c4(inst: &Instance, dist: &DistanceTable) -> bool {
    let g = &inst.graph;
    g.holes().iter().all(|&h| {
        let hb = HoleBoundary::of(inst, h);
        let m = hb.len();
        (0..m).all(|i| {
            (0..m).all(|j| {
                let d = dist.get(hb.vertices[i], hb.vertices[j]);
                i == j || hb.arc_length(i, j).min(hb.arc_length(j, i)) == d
            })
        })
    })
}
