use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_linmodal")).current_dir(dir).args(args).output().expect("run linmodal")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn setup() -> TempDir {
    let d = tempfile::tempdir().unwrap();
    fs::write(d.path().join("one.txt"), "tiles 1\n0: 0 0 0 0\n").unwrap();
    fs::write(d.path().join("two.txt"), "tiles 2\n0: 0 1 5 5\n1: 1 0 6 6\n").unwrap();
    // same size, but every tile matches itself horizontally
    fs::write(d.path().join("flat.txt"), "tiles 2\n0: 0 0 7 7\n1: 1 1 8 8\n").unwrap();
    d
}

#[test]
fn gen_star_reports_one_monadic_and_one_nullary_letter() {
    let d = setup();
    let o = run(d.path(), &["gen", "--tiles", "two.txt", "--variant", "Astar", "--out", "a.txt"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("letters {P:1, q:0}"), "{s}");
    assert!(s.contains("variables 2 (x y)"), "{s}");
    assert!(fs::read_to_string(d.path().join("a.txt")).unwrap().starts_with("#! variant Astar"));
}

#[test]
fn pipeline_on_constant_tiling_has_empty_diff() {
    let d = setup();
    let o = run(d.path(), &["pipeline", "--tiles", "one.txt", "--out", "run"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("diff: empty"));
    for f in ["artifact.txt", "model.txt", "check.txt", "grid.txt", "expected.txt", "provenance.txt"] {
        assert!(d.path().join("run").join(f).exists(), "{f}");
    }
    assert_eq!(
        fs::read_to_string(d.path().join("run/grid.txt")).unwrap(),
        fs::read_to_string(d.path().join("run/expected.txt")).unwrap()
    );
}

#[test]
fn sep_finds_z_countermodel_on_reflexive_chain() {
    let d = setup();
    let o = run(d.path(), &["sep", "--formula", "Z", "--frame", "gn:0", "--len", "5", "--out", "w.txt"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("countermodel found"));
    let w = fs::read_to_string(d.path().join("w.txt")).unwrap();
    assert!(w.starts_with("explicit\nworlds 5\n"), "{w}");
}

#[test]
fn sep_finds_nothing_on_irreflexive_chain() {
    let d = setup();
    let o = run(d.path(), &["sep", "--formula", "Z", "--frame", "hn:0", "--len", "5"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("no countermodel"));
}

#[test]
fn build_check_extract_roundtrip() {
    let d = setup();
    let p = d.path();
    assert_eq!(run(p, &["gen", "--tiles", "two.txt", "--out", "a.txt"]).status.code(), Some(0));
    assert_eq!(run(p, &["build", "--tiles", "two.txt", "--out", "m.txt"]).status.code(), Some(0));
    let o = run(p, &["check", "--model", "m.txt", "--artifact", "a.txt"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert_eq!(s.lines().count(), 10);
    assert!(s.starts_with("A_0: TRUE ("), "{s}");
    let o = run(p, &["extract", "--model", "m.txt", "--out", "g.txt"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("diff: empty"));
    let prov = fs::read_to_string(p.join("g.txt.prov")).unwrap();
    assert_eq!(prov.lines().count(), 65);
    assert!(prov.contains("\n0 0 0 P0(0)\n"), "{prov}");
}

#[test]
fn reports_are_deterministic() {
    let d = setup();
    let p = d.path();
    run(p, &["gen", "--tiles", "two.txt", "--variant", "Aprime", "--out", "a.txt"]);
    run(p, &["build", "--tiles", "two.txt", "--variant", "Aprime", "--out", "m.txt"]);
    let args = ["check", "--model", "m.txt", "--artifact", "a.txt", "--report", "structured"];
    let (a, b) = (run(p, &args), run(p, &args));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["conjuncts"].as_array().unwrap().len(), 10);
}

#[test]
fn random_tiles_are_reproducible() {
    let d = setup();
    let args = ["gen", "--tiles", "random:3", "--seed", "11", "--out", "r.txt"];
    run(d.path(), &args);
    let first = fs::read_to_string(d.path().join("r.txt")).unwrap();
    run(d.path(), &args);
    assert_eq!(first, fs::read_to_string(d.path().join("r.txt")).unwrap());
}

#[test]
fn false_verdict_exits_3() {
    let d = setup();
    let p = d.path();
    run(p, &["gen", "--tiles", "two.txt", "--out", "a.txt"]);
    run(p, &["build", "--tiles", "flat.txt", "--out", "m.txt"]);
    let o = run(p, &["check", "--model", "m.txt", "--artifact", "a.txt"]);
    assert_eq!(o.status.code(), Some(3), "{}", stdout(&o));
    assert!(stdout(&o).contains(": FALSE (trace: "));
}

#[test]
fn input_errors_exit_2() {
    let d = setup();
    assert_eq!(run(d.path(), &["gen", "--tiles", "missing.txt"]).status.code(), Some(2));
    assert_eq!(run(d.path(), &["gen", "--tiles", "two.txt", "--variant", "C"]).status.code(), Some(2));
    assert_eq!(run(d.path(), &["sep", "--formula", "Q", "--len", "3"]).status.code(), Some(2));
}

#[test]
fn guards_exit_4() {
    let d = setup();
    let o = run(d.path(), &["solve", "--tiles", "two.txt", "--width", "10", "--height", "10"]);
    assert_eq!(o.status.code(), Some(4));
    let o = run(d.path(), &["sep", "--formula", "Z", "--len", "5", "--max-interpretations", "3"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn solve_writes_a_grid() {
    let d = setup();
    let o = run(d.path(), &["solve", "--tiles", "two.txt", "--width", "4", "--height", "2", "--wrap"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "grid 4 2\n0 1 0 1\n0 1 0 1\n");
}
