//! Exact distances, excess functions and shortest-path structure.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};

use thiserror::Error;

use crate::exec::Parallelism;
use crate::planar::{Instance, PlanarGraph};

mod lens;
mod paths;

pub use lens::{find_0lens, LensWitness};
pub use paths::{
    classify_type, enumerate_shortest_paths, extremal_walk, geodesic_region, nearest_path, pair_is_excessive,
    region_between, GeodesicRegion, HoleBoundary, PairType, Side,
};

pub const INF: i64 = i64::MAX / 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeodesicError {
    #[error("boundary path has length {0} but the distance is {1}")]
    NotShortestBoundary(i64, i64),
    #[error("path of length {0} is not a geodesic (distance {1})")]
    NotAGeodesic(i64, i64),
}

/// All-pairs distances, indexed by internal vertex index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceTable {
    n: usize,
    d: Vec<i64>,
}

impl DistanceTable {
    pub fn get(&self, u: usize, v: usize) -> i64 {
        self.d[u * self.n + v]
    }

    pub fn row(&self, u: usize) -> &[i64] {
        &self.d[u * self.n..(u + 1) * self.n]
    }

    pub fn size(&self) -> usize {
        self.n
    }

    /// `d(x s) + d(x t) - d(s t)`.
    pub fn eps(&self, x: usize, s: usize, t: usize) -> i64 {
        self.get(x, s) + self.get(x, t) - self.get(s, t)
    }

    /// Minimum over terminal pairs of `d(s x) + d(x y) + d(y t) - d(s t)`.
    pub fn excess(&self, pairs: &[(usize, usize)], x: usize, y: usize) -> i64 {
        let dxy = self.get(x, y);
        pairs
            .iter()
            .map(|&(s, t)| {
                let a = self.get(s, x) + dxy + self.get(y, t);
                let b = self.get(t, x) + dxy + self.get(y, s);
                a.min(b) - self.get(s, t)
            })
            .min()
            .unwrap_or(INF)
    }
}

/// Single-source distances over the whole graph.
pub fn dijkstra(g: &PlanarGraph, lengths: &[i64], s: usize) -> Vec<i64> {
    dijkstra_masked(g, lengths, s, None)
}

/// Single-source distances through vertices allowed by `blocked` only;
/// blocked vertices are still reached but never expanded.
pub fn dijkstra_masked(g: &PlanarGraph, lengths: &[i64], s: usize, blocked: Option<&[bool]>) -> Vec<i64> {
    let n = g.vertex_count();
    let mut dist = vec![INF; n];
    dist[s] = 0;
    let mut heap = BinaryHeap::from([Reverse((0i64, s))]);
    while let Some(Reverse((d, v))) = heap.pop() {
        if d > dist[v] {
            continue;
        }
        if v != s && blocked.is_some_and(|b| b[v]) {
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

pub fn all_distances(inst: &Instance, mode: Parallelism) -> DistanceTable {
    let g = &inst.graph;
    let n = g.vertex_count();
    let rows = mode.map_range(n, |s| dijkstra(g, &inst.lengths, s));
    let mut d = Vec::with_capacity(n * n);
    for r in rows {
        d.extend(r);
    }
    DistanceTable { n, d }
}

/// Distances from the given sources only, as a table whose rows for other
/// vertices are left at `INF`.
pub fn distances_from(inst: &Instance, sources: &[usize], mode: Parallelism) -> DistanceTable {
    let g = &inst.graph;
    let n = g.vertex_count();
    let rows = mode.map_slice(sources, |&s| dijkstra(g, &inst.lengths, s));
    let mut d = vec![INF; n * n];
    for (&s, r) in sources.iter().zip(rows) {
        d[s * n..(s + 1) * n].copy_from_slice(&r);
    }
    DistanceTable { n, d }
}

/// Darts `a -> b` lying on some shortest `s`-`t` path.
pub fn dag_darts(inst: &Instance, dist: &DistanceTable, s: usize, t: usize) -> Vec<usize> {
    let g = &inst.graph;
    let dst = dist.get(s, t);
    (0..g.dart_count())
        .filter(|&d| {
            let (a, b) = (g.tail(d), g.head(d));
            dist.get(s, a) + inst.len_of(d) + dist.get(b, t) == dst
        })
        .collect()
}

/// Vertices lying on some shortest `s`-`t` path.
pub fn dag_vertices(dist: &DistanceTable, s: usize, t: usize) -> Vec<usize> {
    let dst = dist.get(s, t);
    (0..dist.size()).filter(|&v| dist.get(s, v) + dist.get(v, t) == dst).collect()
}

/// Sum of lengths along a dart path, checking that the darts chain.
pub fn path_length(inst: &Instance, darts: &[usize]) -> i64 {
    inst.path_length(darts)
}

/// Vertex sequence of a dart path starting at `start`.
pub fn path_vertices(g: &PlanarGraph, start: usize, darts: &[usize]) -> Vec<usize> {
    let mut out = vec![start];
    for &d in darts {
        debug_assert_eq!(g.tail(d), *out.last().unwrap());
        out.push(g.head(d));
    }
    out
}

/// Inner vertices of all hole boundaries, as a mask.
pub fn terminal_mask(g: &PlanarGraph) -> Vec<bool> {
    let mut mask = vec![false; g.vertex_count()];
    for v in g.terminals() {
        mask[v] = true;
    }
    mask
}

/// Distinct vertices of a set of faces.
pub fn face_vertex_set(g: &PlanarGraph, faces: &BTreeSet<usize>) -> BTreeSet<usize> {
    faces.iter().flat_map(|&f| g.face_vertices(f)).collect()
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::fixtures::{lens, random_grid, theta};
    use crate::preprocess::preprocess_pieces;

    fn floyd_warshall(inst: &Instance) -> Vec<Vec<i64>> {
        let g = &inst.graph;
        let n = g.vertex_count();
        let inf = i64::MAX / 4;
        let mut d = vec![vec![inf; n]; n];
        for (v, row) in d.iter_mut().enumerate() {
            row[v] = 0;
        }
        for e in 0..g.edge_count() {
            let [u, v] = g.ends(e);
            d[u][v] = d[u][v].min(inst.lengths[e]);
            d[v][u] = d[u][v];
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    d[i][j] = d[i][j].min(d[i][k] + d[k][j]);
                }
            }
        }
        d
    }

    #[test]
    fn theta_distances() {
        let d = all_distances(&theta(), Parallelism::Sequential);
        assert_eq!(d.get(0, 1), 2);
        assert_eq!(d.get(2, 3), 2);
        assert_eq!(d.get(0, 4), 1);
    }

    #[test]
    fn lens_fixture_has_a_witness() {
        let inst = lens();
        let dist = all_distances(&inst, Parallelism::Sequential);
        let w = find_0lens(&inst, &dist, Parallelism::Sequential).expect("lens");
        assert_eq!(inst.graph.holes_in(&w.faces).len(), 0);
        assert_eq!(inst.path_length(&w.q), inst.path_length(&w.q_prime));
    }

    #[test]
    fn dag_paths_are_shortest() {
        let inst = random_grid(3, 5, 3, 10);
        let dist = all_distances(&inst, Parallelism::Sequential);
        for p in enumerate_shortest_paths(&inst, &dist, 0, 24, 50) {
            assert_eq!(inst.path_length(&p), dist.get(0, 24));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn distances_match_floyd_warshall(seed in 0u64..5_000, k in 3usize..8) {
            let inst = random_grid(seed, k, 3.min((k - 1) * (k - 1)), 12);
            let fw = floyd_warshall(&inst);
            for mode in [Parallelism::Sequential, Parallelism::Parallel] {
                let d = all_distances(&inst, mode);
                for (u, row) in fw.iter().enumerate() {
                    prop_assert_eq!(d.row(u), &row[..]);
                }
            }
        }

        #[test]
        fn remote_path_region_contains_every_type0_region(seed in 0u64..5_000, k in 4usize..6) {
            let inst = random_grid(seed, k, 3, 6);
            for piece in preprocess_pieces(&inst, Parallelism::Sequential).unwrap() {
                let inst = piece.instance;
                let g = &inst.graph;
                let dist = all_distances(&inst, Parallelism::Sequential);
                for &h in g.holes() {
                    let hb = HoleBoundary::of(&inst, h);
                    let m = hb.len();
                    for i in 0..m {
                        for j in [(i + 1) % m, (i + m / 2) % m] {
                            let Ok(r) = geodesic_region(&inst, &dist, &hb, i, j) else { continue };
                            if r.s == r.t {
                                continue;
                            }
                            prop_assert_eq!(inst.path_length(&r.remote), dist.get(r.s, r.t));
                            for p in enumerate_shortest_paths(&inst, &dist, r.s, r.t, 200) {
                                if classify_type(g, h, &p, &r.boundary).tau != 0 {
                                    continue;
                                }
                                let region = paths::region_between(g, h, &p, &r.boundary);
                                prop_assert!(region.is_subset(&r.region));
                            }
                        }
                    }
                }
            }
        }
    }
}
