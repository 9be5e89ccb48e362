use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;

use super::*;
use crate::fixtures::{random_grid, theta};
use crate::geodesics::{all_distances, HoleBoundary};
use crate::planar::{EdgeId, RotationSpec};
use crate::preprocess::preprocess_pieces;
use crate::twohole::{apply_certificate, certify_reduction, MonotonicityCheck};

/// Square hole `a b c d` (ids 0..4) with a second route `a m c` (m = 4) of
/// the same length on the `b` side; the outer face `a d c m` is a hole too.
fn square_with_chord() -> Instance {
    let spec = RotationSpec {
        vertices: vec![0, 1, 2, 3, 4],
        edges: vec![(0, 0, 1), (1, 1, 2), (2, 2, 3), (3, 3, 0), (4, 0, 4), (5, 4, 2)],
        rotation: vec![vec![4, 0, 3], vec![0, 1], vec![2, 1, 5], vec![2, 3], vec![4, 5]],
        holes: vec![vec![0, 1, 2, 3], vec![0, 3, 2, 4]],
    };
    let lengths: BTreeMap<EdgeId, i64> = (0..6).map(|e| (e, 1)).collect();
    Instance::from_spec(&spec, &lengths).unwrap()
}

/// Wheel with five rim vertices (ids 0..5) around hub 5; rim edges have
/// length 2 and the outer face is the only hole.
fn pentagon_wheel() -> Instance {
    let mut edges = Vec::new();
    for i in 0..5u32 {
        edges.push((i, i, (i + 1) % 5));
        edges.push((5 + i, i, 5));
    }
    let rotation: Vec<Vec<EdgeId>> = (0..5u32).map(|i| vec![i, 5 + i, (i + 4) % 5]).chain([vec![5, 6, 7, 8, 9]]).collect();
    let spec = RotationSpec { vertices: (0..6).collect(), edges, rotation, holes: vec![] };
    let lengths: BTreeMap<EdgeId, i64> = (0..10).map(|e| (e, 2)).collect();
    let inst = Instance::from_spec(&spec, &lengths).unwrap();
    let outer = (0..inst.graph.face_count()).find(|&f| inst.graph.face_darts(f).len() == 5).unwrap();
    inst.with_holes(&[outer])
}

#[test]
fn antipodal_pairs_cover_every_unordered_pair_once() {
    for n in 1..7 {
        let pairs = antipodal_pairs(n);
        let set: BTreeSet<(usize, usize)> = pairs.iter().map(|&(i, j)| (i.min(j), i.max(j))).collect();
        assert_eq!(set.len(), pairs.len());
        assert_eq!(set.len(), n * (2 * n - 1));
    }
}

#[test]
fn pentagon_needs_five_antipodes() {
    let inst = pentagon_wheel();
    let hole = inst.graph.holes()[0];
    let sym = symmetrize(&inst, hole).unwrap();
    assert_eq!(sym.added.len(), 5);
    let hb = HoleBoundary::of(&sym.instance, sym.hole);
    assert_eq!(hb.len(), 10);
    assert!(hb.prefix.windows(2).all(|w| w[1] - w[0] == 1));
}

#[test]
fn theta_necklaces_are_trivial() {
    let inst = theta();
    let dist = all_distances(&inst, Parallelism::Sequential);
    for &h in inst.graph.holes() {
        let n = build_necklace(&inst, &dist, h).unwrap();
        assert!(n.trivial);
        assert!(n.edge_rule_violations(&inst).is_empty());
        assert_eq!(n.check_cycles(&inst, 100), Ok(1));
    }
}

#[test]
fn chord_route_joins_the_necklace() {
    let inst = square_with_chord();
    let dist = all_distances(&inst, Parallelism::Sequential);
    let h = inst.graph.find_face_by_cycle(&[0, 1, 2, 3]).unwrap();
    let n = build_necklace(&inst, &dist, h).unwrap();
    assert!(!n.trivial);
    assert_eq!(n.darts.len(), 6);
    assert!(n.edge_rule_violations(&inst).is_empty());
    assert_eq!(n.check_cycles(&inst, 100), Ok(2));
    let m = inst.graph.vertex_index(4).unwrap();
    let a = inst.graph.vertex_index(0).unwrap();
    assert!([1, 3].contains(&(n.potential[&m] - n.potential[&a]).rem_euclid(n.sigma)));
    let (_, len) = n.maximal_region(&inst, 100);
    assert_eq!(len, n.sigma);
    assert_eq!(hole_type(&inst, &dist, h, 64), 0);
}

fn ctx_oracle() -> crate::twohole::ReferenceOracle {
    crate::twohole::ReferenceOracle::with_mode(Parallelism::Sequential)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn reduction_one_steps_are_certified_and_reach_c4(seed in 0u64..100_000, k in 4usize..7) {
        let oracle = ctx_oracle();
        let ctx = ReduceContext { mode: Parallelism::Sequential, oracle: &oracle };
        for piece in preprocess_pieces(&random_grid(seed, k, 3, 10), Parallelism::Sequential).unwrap() {
            let mut cur = piece.instance;
            if cur.graph.holes().len() != 3 {
                continue;
            }
            let n = cur.graph.vertex_count();
            let mut steps = 0;
            loop {
                let dist = all_distances(&cur, Parallelism::Sequential);
                let Some(cert) = reduction_one(&cur, &dist, &ctx).unwrap() else {
                    prop_assert!(check_c4(&cur, &dist));
                    break;
                };
                prop_assert!(cert.registers["alpha"] > 0);
                prop_assert!(certify_reduction(&cur, &cert, MonotonicityCheck::Full, Parallelism::Sequential).ok);
                cur = apply_certificate(&cur, &cert).normalize().unwrap().0;
                steps += 1;
                prop_assert!(steps <= n * n);
                if cur.graph.c1_violation().is_some() || cur.graph.holes().len() != 3 {
                    break;
                }
            }
        }
    }
}
