//! Detection of hole-free lenses between geodesics of distinct holes.

use std::collections::BTreeSet;

use super::{dag_darts, DistanceTable};
use crate::exec::Parallelism;
use crate::planar::{Instance, PlanarGraph};

/// A lens with ends `x`, `y` bounded by two internally disjoint shortest
/// paths and enclosing no hole.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LensWitness {
    /// The two holes whose geodesics carry `q` and `q_prime`.
    pub holes: (usize, usize),
    pub x: usize,
    pub y: usize,
    /// Shortest `x`-`y` paths (darts) bounding the lens, up to common ends.
    pub q: Vec<usize>,
    pub q_prime: Vec<usize>,
    /// Faces inside the lens.
    pub faces: BTreeSet<usize>,
}

/// For every hole, which ordered vertex pairs `(x, y)` occur in this order
/// on a common geodesic of the hole.
fn on_common_geodesic(g: &PlanarGraph, dist: &DistanceTable, hole: usize) -> Vec<bool> {
    let n = g.vertex_count();
    let mut vs = g.face_vertices(hole);
    vs.sort_unstable();
    vs.dedup();
    let mut out = vec![false; n * n];
    for &s in &vs {
        for &t in &vs {
            if s == t {
                continue;
            }
            let dst = dist.get(s, t);
            let on: Vec<usize> = (0..n).filter(|&v| dist.get(s, v) + dist.get(v, t) == dst).collect();
            for &x in &on {
                for &y in &on {
                    if x != y && dist.get(s, x) + dist.get(x, y) + dist.get(y, t) == dst {
                        out[x * n + y] = true;
                    }
                }
            }
        }
    }
    out
}

/// Search for a 0-lens. Returns the first witness in order of `(x, y)`.
pub fn find_0lens(inst: &Instance, dist: &DistanceTable, mode: Parallelism) -> Option<LensWitness> {
    let g = &inst.graph;
    let n = g.vertex_count();
    let holes = g.holes().to_vec();
    if holes.len() < 2 {
        return None;
    }
    let tables: Vec<Vec<bool>> = mode.map_slice(&holes, |&h| on_common_geodesic(g, dist, h));
    mode.find_first(n, |x| {
        for y in 0..n {
            let carriers: Vec<usize> = (0..holes.len()).filter(|&k| tables[k][x * n + y]).collect();
            if carriers.len() < 2 {
                continue;
            }
            if let Some(w) = lens_at(inst, dist, x, y) {
                return Some(LensWitness { holes: (holes[carriers[0]], holes[carriers[1]]), ..w });
            }
        }
        None
    })
    .map(|(_, w)| w)
}

/// A hole-free face of the union of shortest `x`-`y` paths, if any.
fn lens_at(inst: &Instance, dist: &DistanceTable, x: usize, y: usize) -> Option<LensWitness> {
    let g = &inst.graph;
    let dag = dag_darts(inst, dist, x, y);
    let barrier: BTreeSet<usize> = dag.iter().map(|&d| d >> 1).collect();
    let split = g.split_faces(&barrier);
    let mut has_hole = vec![false; split.count];
    for &h in g.holes() {
        has_hole[split.component[h]] = true;
    }
    let comp = (0..split.count).find(|&c| !has_hole[c])?;
    let faces: BTreeSet<usize> = (0..g.face_count()).filter(|&f| split.component[f] == comp).collect();
    let mut on_dag = vec![false; g.dart_count()];
    for &d in &dag {
        on_dag[d] = true;
    }
    // Boundary darts of the lens, oriented from x towards y.
    let rim: Vec<usize> = dag
        .iter()
        .copied()
        .filter(|&d| faces.contains(&g.face_of(d)) != faces.contains(&g.face_of(d ^ 1)))
        .collect();
    let heads: BTreeSet<usize> = rim.iter().map(|&d| g.head(d)).collect();
    let tails: BTreeSet<usize> = rim.iter().map(|&d| g.tail(d)).collect();
    let xf = *tails.difference(&heads).next()?;
    let yf = *heads.difference(&tails).next()?;
    let mut sides = Vec::new();
    for &first in rim.iter().filter(|&&d| g.tail(d) == xf) {
        let mut path = vec![first];
        let mut v = g.head(first);
        while v != yf {
            let next = *rim.iter().find(|&&d| g.tail(d) == v)?;
            path.push(next);
            v = g.head(next);
        }
        sides.push(path);
    }
    if sides.len() != 2 {
        return None;
    }
    let walk = |from: usize, to: usize| -> Option<Vec<usize>> {
        let mut out = Vec::new();
        let mut v = from;
        while v != to {
            let d = *g.rotation(v).iter().find(|&&d| on_dag[d] && dist.get(g.head(d), to) + inst.len_of(d) == dist.get(v, to))?;
            out.push(d);
            v = g.head(d);
        }
        Some(out)
    };
    let pre = walk(x, xf)?;
    let post = walk(yf, y)?;
    let extend = |side: &Vec<usize>| {
        let mut p = pre.clone();
        p.extend(side.iter().copied());
        p.extend(post.iter().copied());
        p
    };
    let q = extend(&sides[0]);
    let q_prime = extend(&sides[1]);
    Some(LensWitness { holes: (0, 0), x, y, q, q_prime, faces })
}
