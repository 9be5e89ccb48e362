use holepack::fixtures::random_grid;
use holepack::metricspace::{Metric, TwoThreeMetric, WeightedPacking};
use holepack::PlanarError;
use holepack_cli::files::{read_instance, FileError, InstanceFile, SolutionFile};

const TRIANGLE: &str = "\
holepack-instance 1
# an odd cycle
vertices 3
edge 0 0 1 1
edge 1 1 2 1
edge 2 2 0 1
rotation 0 0 2
rotation 1 1 0
rotation 2 2 1
";

#[test]
fn text_and_json_round_trip() {
    for seed in 0..10 {
        let file = InstanceFile::from_instance(&random_grid(seed, 5, 3, 10));
        assert_eq!(InstanceFile::parse(&file.to_text()).unwrap(), file);
        assert_eq!(InstanceFile::parse(&file.to_json()).unwrap(), file);
        let inst = read_instance(&file.to_text()).unwrap();
        assert_eq!(InstanceFile::from_instance(&inst), file);
    }
}

#[test]
fn odd_cycle_is_reported() {
    match read_instance(TRIANGLE) {
        Err(FileError::Planar(PlanarError::OddCycle(c))) => assert_eq!(c.len(), 3),
        other => panic!("expected an odd cycle, got {other:?}"),
    }
}

#[test]
fn grid6_has_expected_counts() {
    let text = InstanceFile::from_instance(&random_grid(1, 6, 3, 10)).to_text();
    let inst = read_instance(&text).unwrap();
    let g = &inst.graph;
    assert_eq!((g.vertex_count(), g.edge_count(), g.face_count()), (36, 60, 26));
    assert_eq!(g.holes().len(), 3);
}

#[test]
fn bad_lines_carry_line_numbers() {
    let text = TRIANGLE.replace("edge 1 1 2 1", "edge 1 1 two 1");
    match InstanceFile::parse(&text) {
        Err(FileError::Parse { line, .. }) => assert_eq!(line, 5),
        other => panic!("expected a parse error, got {other:?}"),
    }
    assert!(matches!(InstanceFile::parse("holepack-solution 1\n"), Err(FileError::Parse { line: 1, .. })));
    assert!(matches!(InstanceFile::parse("{ not json"), Err(FileError::Json(_))));
}

#[test]
fn solution_round_trip() {
    let set = |v: &[u32]| v.iter().copied().collect();
    let mut p = WeightedPacking::default();
    p.push(Metric::Cut(holepack::metricspace::CutMetric::new(set(&[0, 3]))), 2);
    p.push(Metric::TwoThree(TwoThreeMetric { s: [set(&[0]), set(&[1])], t: [set(&[2]), set(&[3]), set(&[4, 5])] }), 1);
    let file = SolutionFile::from_packing(&p);
    assert_eq!(SolutionFile::parse(&file.to_text()).unwrap().to_packing().unwrap(), p);
    assert_eq!(SolutionFile::parse(&file.to_json()).unwrap().to_packing().unwrap(), p);
}
