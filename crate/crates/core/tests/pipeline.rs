use holepack::finalize::{solve, SolveOptions};
use holepack::fixtures::{random_grid, sq_dom, theta, grid_spec};
use holepack::metricspace::verify_packing;
use holepack::twohole::{certify_reduction, MonotonicityCheck};
use holepack::{Instance, Parallelism, PlanarError, PlanarGraph};
use proptest::prelude::*;

fn solved(inst: &Instance, mode: Parallelism) -> holepack::finalize::Solution {
    let sol = solve(inst, &SolveOptions::with_mode(mode)).unwrap();
    let rep = verify_packing(inst, &sol.packing, mode);
    assert!(rep.passed(), "{:?}", rep.failures());
    sol
}

#[test]
fn fixtures_solve() {
    for inst in [theta(), sq_dom()] {
        solved(&inst, Parallelism::Sequential);
    }
}

#[test]
fn four_holes_are_refused() {
    let spec = grid_spec(5, &[(0, 0), (0, 2), (2, 0), (2, 2)]);
    assert!(matches!(PlanarGraph::build(&spec), Err(PlanarError::TooManyHoles(4))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn solutions_verify_and_modes_agree(seed in 0u64..1_000_000, k in 3usize..7, holes in 0usize..4, max_len in 1i64..20) {
        let inst = random_grid(seed, k, holes.min((k - 1) * (k - 1)), max_len);
        let par = solved(&inst, Parallelism::Parallel);
        let seq = solved(&inst, Parallelism::Sequential);
        prop_assert_eq!(&par.packing, &seq.packing);
        prop_assert_eq!(&par.certificates, &seq.certificates);
        prop_assert!(par.packing.items.iter().all(|(_, w)| *w > 0));
    }

    #[test]
    fn recorded_certificates_recertify(seed in 0u64..1_000_000, k in 4usize..7) {
        let inst = random_grid(seed, k, 3, 10);
        let opts = SolveOptions { record_trace: true, ..SolveOptions::with_mode(Parallelism::Sequential) };
        let sol = solve(&inst, &opts).unwrap();
        for f in &sol.trace {
            let Some((phase, idx)) = f.label.rsplit_once(' ') else { continue };
            let Ok(idx) = idx.parse::<usize>() else { continue };
            let cert = &sol.certificates[idx - 1];
            prop_assert_eq!(&cert.phase, phase);
            let lengths = f.snapshot.lengths.iter().copied().collect();
            let before = Instance::from_spec(&f.snapshot.spec, &lengths).unwrap();
            prop_assert!(certify_reduction(&before, cert, MonotonicityCheck::Full, Parallelism::Sequential).ok);
        }
    }
}
