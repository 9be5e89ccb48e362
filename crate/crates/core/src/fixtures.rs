//! Named instances used across tests, benches and the command line.

use std::collections::BTreeMap;

use crate::planar::{Instance, RotationSpec, VertexId};

/// Theta graph: `s = 0`, `s' = 1`, `x_j = 2, 3, 4`; every face is a hole and
/// every edge has length 1. Edge `2j` joins `s` to `x_j`, edge `2j + 1`
/// joins `x_j` to `s'`.
pub fn theta() -> Instance {
    let spec = RotationSpec {
        vertices: vec![0, 1, 2, 3, 4],
        edges: vec![(0, 0, 2), (1, 2, 1), (2, 0, 3), (3, 3, 1), (4, 0, 4), (5, 4, 1)],
        rotation: vec![vec![0, 2, 4], vec![5, 3, 1], vec![0, 1], vec![2, 3], vec![4, 5]],
        holes: vec![vec![0, 2, 1, 3], vec![0, 3, 1, 4], vec![0, 4, 1, 2]],
    };
    let lengths = (0..6).map(|e| (e, 1)).collect();
    Instance::from_spec(&spec, &lengths).expect("theta fixture")
}

/// Square `x a b y` (ids 0, 1, 2, 3) with unit sides `xa`, `ab`, `by` and
/// closing edge `yx` of length 3; the outer face is the hole.
pub fn sq_dom() -> Instance {
    let spec = RotationSpec {
        vertices: vec![0, 1, 2, 3],
        edges: vec![(0, 0, 1), (1, 1, 2), (2, 2, 3), (3, 3, 0)],
        rotation: vec![vec![0, 3], vec![1, 0], vec![2, 1], vec![3, 2]],
        holes: vec![],
    };
    let lengths: BTreeMap<u32, i64> = [(0, 1), (1, 1), (2, 1), (3, 3)].into_iter().collect();
    let inst = Instance::from_spec(&spec, &lengths).expect("square fixture");
    let outer = (0..inst.graph.face_count())
        .find(|&f| inst.graph.face_darts(f).first().is_some_and(|&d| inst.graph.tail(d) == 0 && inst.graph.head(d) == 1))
        .expect("face through x a");
    let other = 1 - outer;
    inst.with_holes(&[other])
}

/// Two unit-length routes `x a y` and `x b y` (ids 0, 2, 1, 3) enclosing an
/// empty face, plus outer routes `x p y` and `x q y` (ids 4, 5). The holes
/// are `x p y a`, `x b y q` and `x p y q`, so the middle face is a lens
/// between geodesics of two holes that contains no hole.
pub fn lens() -> Instance {
    let spec = RotationSpec {
        vertices: vec![0, 1, 2, 3, 4, 5],
        edges: vec![(0, 0, 2), (1, 2, 1), (2, 0, 3), (3, 3, 1), (4, 0, 4), (5, 4, 1), (6, 0, 5), (7, 5, 1)],
        rotation: vec![vec![4, 0, 2, 6], vec![7, 3, 1, 5], vec![0, 1], vec![2, 3], vec![4, 5], vec![6, 7]],
        holes: vec![vec![0, 4, 1, 2], vec![0, 3, 1, 5], vec![0, 4, 1, 5]],
    };
    let lengths = (0..8).map(|e| (e, 1)).collect();
    Instance::from_spec(&spec, &lengths).expect("lens fixture")
}

/// Edge id of the edge right of `(r, c)` in a `k x k` grid.
pub fn grid_right_edge(k: usize, r: usize, c: usize) -> u32 {
    (2 * (r * k + c)) as u32
}

/// Edge id of the edge below `(r, c)` in a `k x k` grid.
pub fn grid_down_edge(k: usize, r: usize, c: usize) -> u32 {
    (2 * (r * k + c) + 1) as u32
}

/// Rotation spec of a `k x k` grid. Vertex `(r, c)` has id `r k + c`. The
/// interior face with top-left corner `(r, c)` is listed in `holes` by that
/// corner.
pub fn grid_spec(k: usize, holes: &[(usize, usize)]) -> RotationSpec {
    let id = |r: usize, c: usize| (r * k + c) as VertexId;
    let mut edges = Vec::new();
    for r in 0..k {
        for c in 0..k {
            if c + 1 < k {
                edges.push((grid_right_edge(k, r, c), id(r, c), id(r, c + 1)));
            }
            if r + 1 < k {
                edges.push((grid_down_edge(k, r, c), id(r, c), id(r + 1, c)));
            }
        }
    }
    let mut rotation = Vec::new();
    for r in 0..k {
        for c in 0..k {
            let mut rot = Vec::new();
            if r > 0 {
                rot.push(grid_down_edge(k, r - 1, c));
            }
            if c + 1 < k {
                rot.push(grid_right_edge(k, r, c));
            }
            if r + 1 < k {
                rot.push(grid_down_edge(k, r, c));
            }
            if c > 0 {
                rot.push(grid_right_edge(k, r, c - 1));
            }
            rotation.push(rot);
        }
    }
    let holes = holes
        .iter()
        .map(|&(r, c)| vec![id(r, c), id(r, c + 1), id(r + 1, c + 1), id(r + 1, c)])
        .collect();
    RotationSpec { vertices: (0..(k * k) as VertexId).collect(), edges, rotation, holes }
}

/// Grid instance with lengths given by edge id.
pub fn grid(k: usize, holes: &[(usize, usize)], lengths: &BTreeMap<u32, i64>) -> Instance {
    Instance::from_spec(&grid_spec(k, holes), lengths).expect("grid fixture")
}

/// Grid with every edge of length 1.
pub fn unit_grid(k: usize, holes: &[(usize, usize)]) -> Instance {
    let spec = grid_spec(k, holes);
    let lengths = spec.edges.iter().map(|&(e, _, _)| (e, 1)).collect();
    Instance::from_spec(&spec, &lengths).expect("grid fixture")
}

/// Random `k x k` grid instance: `hole_count` distinct interior faces are
/// holes, lengths are drawn uniformly from `0..=max_len` and then moved by
/// one towards the parity prescribed by a random vertex potential.
pub fn random_grid(seed: u64, k: usize, hole_count: usize, max_len: i64) -> Instance {
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut faces: Vec<(usize, usize)> = (0..k - 1).flat_map(|r| (0..k - 1).map(move |c| (r, c))).collect();
    faces.shuffle(&mut rng);
    let mut holes: Vec<(usize, usize)> = faces.into_iter().take(hole_count).collect();
    holes.sort_unstable();
    let spec = grid_spec(k, &holes);
    let potential: Vec<i64> = (0..k * k).map(|_| rng.gen_range(0..2)).collect();
    let mut lengths = BTreeMap::new();
    for &(e, u, v) in &spec.edges {
        let mut l: i64 = rng.gen_range(0..=max_len);
        let want = (potential[u as usize] + potential[v as usize]) % 2;
        if l % 2 != want {
            l = if l < max_len { l + 1 } else { l - 1 };
        }
        lengths.insert(e, l);
    }
    Instance::from_spec(&spec, &lengths).expect("random grid")
}
