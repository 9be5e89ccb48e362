use std::collections::BTreeMap;

use proptest::prelude::*;

use super::*;
use crate::fixtures::{grid_spec, random_grid, theta, unit_grid};

#[test]
fn theta_counts() {
    let t = theta();
    let g = &t.graph;
    assert_eq!((g.vertex_count(), g.edge_count(), g.face_count()), (5, 6, 3));
    assert_eq!(g.holes().len(), 3);
    assert!(g.c1_violation().is_none());
}

#[test]
fn grid6_counts() {
    let g = unit_grid(6, &[]).graph;
    assert_eq!((g.vertex_count(), g.edge_count(), g.face_count()), (36, 60, 26));
}

#[test]
fn odd_triangle_is_rejected() {
    let spec = RotationSpec {
        vertices: vec![0, 1, 2],
        edges: vec![(0, 0, 1), (1, 1, 2), (2, 2, 0)],
        rotation: vec![vec![0, 2], vec![1, 0], vec![2, 1]],
        holes: vec![],
    };
    let lengths: BTreeMap<EdgeId, i64> = [(0, 1), (1, 1), (2, 1)].into_iter().collect();
    let inst = Instance::from_spec(&spec, &lengths).unwrap();
    match inst.parity_potential() {
        Err(PlanarError::OddCycle(cycle)) => assert_eq!(cycle.len(), 3),
        other => panic!("expected an odd cycle, got {other:?}"),
    }
}

#[test]
fn unknown_hole_cycle() {
    let mut spec = grid_spec(3, &[]);
    spec.holes = vec![vec![0, 4, 8]];
    assert!(matches!(PlanarGraph::build(&spec), Err(PlanarError::UnknownHoleCycle(_))));
}

#[test]
fn spec_round_trip() {
    let inst = random_grid(7, 5, 3, 10);
    let back = Instance::from_spec(&inst.graph.to_spec(), &inst.length_by_id()).unwrap();
    assert_eq!(back.graph.to_spec(), inst.graph.to_spec());
    assert_eq!(back.lengths, inst.lengths);
}

#[test]
fn zero_edge_contracts_on_normalize() {
    let mut lengths: BTreeMap<EdgeId, i64> = grid_spec(3, &[]).edges.iter().map(|&(e, _, _)| (e, 2)).collect();
    lengths.insert(0, 0);
    let inst = Instance::from_spec(&grid_spec(3, &[(1, 1)]), &lengths).unwrap();
    let (norm, log) = inst.normalize().unwrap();
    assert_eq!(norm.graph.vertex_count(), 8);
    assert_eq!(log.merges.len(), 1);
    assert!(norm.lengths.iter().all(|&l| l > 0));
}

#[test]
fn subdivide_then_suppress() {
    let inst = unit_grid(4, &[(0, 0)]);
    let mut doubled = inst.clone();
    for l in doubled.lengths.iter_mut() {
        *l = 4;
    }
    let (split, created) = doubled.subdivide_many(&[(0, vec![1, 3])]).unwrap();
    assert_eq!(split.graph.vertex_count(), 18);
    let back = split.suppress_vertices(&created[0]).unwrap();
    assert_eq!(back.graph.vertex_count(), 16);
    let mut a = back.lengths.clone();
    a.sort_unstable();
    assert_eq!(a, vec![4; 24]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn euler_and_dart_structure(seed in 0u64..10_000, k in 3usize..8, holes in 0usize..4) {
        let inst = random_grid(seed, k, holes.min((k - 1) * (k - 1)), 10);
        let g = &inst.graph;
        prop_assert_eq!(g.vertex_count() + g.face_count(), g.edge_count() + 2);
        let mut seen = vec![0; g.dart_count()];
        for f in 0..g.face_count() {
            for &d in g.face_darts(f) {
                seen[d] += 1;
                prop_assert_eq!(g.face_of(d), f);
                prop_assert_eq!(g.twin(g.twin(d)), d);
                prop_assert_eq!(g.face_prev(g.face_next(d)), d);
                prop_assert_eq!(g.tail(g.face_next(d)), g.head(d));
            }
        }
        prop_assert!(seen.iter().all(|&c| c == 1));
    }

    #[test]
    fn generated_lengths_are_cyclically_even(seed in 0u64..10_000, k in 3usize..9, max_len in 1i64..40) {
        let inst = random_grid(seed, k, 3.min((k - 1) * (k - 1)), max_len);
        let pot = inst.parity_potential().unwrap();
        for e in 0..inst.graph.edge_count() {
            let [u, v] = inst.graph.ends(e);
            prop_assert_eq!((pot[u] ^ pot[v]) as i64, inst.lengths[e] % 2);
        }
        for f in 0..inst.graph.face_count() {
            prop_assert_eq!(inst.face_length(f) % 2, 0);
        }
    }

    #[test]
    fn normalize_is_idempotent(seed in 0u64..10_000, k in 3usize..7) {
        let inst = random_grid(seed, k, 3.min((k - 1) * (k - 1)), 4);
        if let Ok((a, _)) = inst.normalize() {
            let (b, log) = a.normalize().unwrap();
            prop_assert!(log.is_empty());
            prop_assert_eq!(a.graph.to_spec(), b.graph.to_spec());
            prop_assert!(a.parity_potential().is_ok());
        }
    }
}
