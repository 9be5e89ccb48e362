use std::path::Path;
use std::process::{Command, Output};

fn holepack(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_holepack")).args(args).current_dir(dir).output().unwrap()
}

#[test]
fn gen_solve_verify_render() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(holepack(&["gen", "--seed", "5", "--k", "5", "--max-len", "10", "-o", "g.txt"], d).status.success());
    let solved = holepack(&["solve", "g.txt", "--trace", "tr", "-o", "g.sol"], d);
    assert!(solved.status.success(), "{}", String::from_utf8_lossy(&solved.stderr));
    for f in ["trace.json", "certificates.json", "stats.json"] {
        assert!(d.join("tr").join(f).is_file());
    }
    let verified = holepack(&["verify", "g.txt", "g.sol"], d);
    assert_eq!(verified.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&verified.stdout).trim(), "PASS");
    let rendered = holepack(&["render", "tr", "--format", "dot", "-o", "frames"], d);
    assert!(rendered.status.success());
    let frames: Vec<_> = std::fs::read_dir(d.join("frames")).unwrap().collect();
    assert!(!frames.is_empty());
    let seq = holepack(&["solve", "g.txt", "--sequential"], d);
    assert_eq!(seq.stdout, std::fs::read(d.join("g.sol")).unwrap());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("junk.txt"), "hello\n").unwrap();
    assert_eq!(holepack(&["solve", "junk.txt"], d).status.code(), Some(1));
    assert!(holepack(&["gen", "--seed", "2", "--k", "4", "--max-len", "6", "--json-out", "-o", "g.json"], d).status.success());
    std::fs::write(d.join("bad.sol"), "holepack-solution 1\ncut 1000 | 0\n").unwrap();
    assert_eq!(holepack(&["verify", "g.json", "bad.sol"], d).status.code(), Some(3));
    assert_eq!(holepack(&["verify", "g.json", "missing.sol"], d).status.code(), Some(1));
}

#[test]
fn batch_writes_one_solution_per_input() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    for s in 0..4 {
        let name = format!("i{s}.txt");
        assert!(holepack(&["gen", "--seed", &s.to_string(), "--k", "4", "--max-len", "8", "-o", &name], d).status.success());
    }
    let out = holepack(&["solve", "--batch", "i0.txt", "i1.txt", "i2.txt", "i3.txt", "--out-dir", "sols"], d);
    assert!(out.status.success());
    for s in 0..4 {
        let sol = format!("sols/i{s}.sol");
        assert_eq!(holepack(&["verify", &format!("i{s}.txt"), &sol], d).status.code(), Some(0));
    }
}
