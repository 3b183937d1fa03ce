use std::io::Write;
use std::process::{Command, Stdio};

use orbit_lift_cli::document::Document;

fn run(args: &[&str], input: &str) -> (i32, String, String) {
    let mut child = Command::new(env!("CARGO_BIN_EXE_orbit-lift"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).ok();
    let out = child.wait_with_output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap())
}

const SQRT: &str = "rep: sym:2\ncoefficients: 0; -t\n";

#[test]
fn lift_square_root_golden() {
    let (code, out, _) = run(&["lift", "--format", "structured", "--at", "0"], SQRT);
    assert_eq!(code, 0);
    let expected = "\
orbit-lift/1
kind: local-lift
rep: sym:2
coefficient: 0
coefficient: -t
base: 0
N: 2
scale: 1
order: 8
branch: +
root: -s
root: s
trace: reduce m=1/2 d=2 next=0
trace: principal
branch: -
root: -i*s
root: i*s
trace: reduce m=1/2 d=2 next=0
trace: principal
";
    assert_eq!(out, expected);
}

#[test]
fn constant_and_zero_curves() {
    let (code, out, _) = run(&["lift", "--format", "structured"], "rep: sym:2\ncoefficients: 3; 2\n");
    assert_eq!(code, 0);
    let d = Document::parse(&out).unwrap();
    assert_eq!(d.get("N"), Some("1"));
    assert_eq!(d.get_all("root").collect::<Vec<_>>(), vec!["1", "2"]);
    let (code, out, _) = run(&["lift", "--format", "structured"], "rep: sym:2\ncoefficients: 0; 0\n");
    assert_eq!(code, 0);
    let d = Document::parse(&out).unwrap();
    assert_eq!(d.get("N"), Some("1"));
    assert_eq!(d.get_all("root").collect::<Vec<_>>(), vec!["0", "0"]);
}

#[test]
fn branch_filter() {
    let (_, out, _) = run(&["lift", "--format", "structured", "--branch", "-"], SQRT);
    let d = Document::parse(&out).unwrap();
    assert_eq!(d.get_all("branch").collect::<Vec<_>>(), vec!["-"]);
    assert_eq!(d.get_all("root").collect::<Vec<_>>(), vec!["-i*s", "i*s"]);
}

#[test]
fn global_two_pieces() {
    let (code, out, _) = run(&["global", "--format", "structured", "--interval", "-1:1"], SQRT);
    assert_eq!(code, 0);
    let d = Document::parse(&out).unwrap();
    let pieces: Vec<_> = d.get_all("piece").collect();
    assert_eq!(pieces.len(), 2);
    assert!(pieces[0].starts_with("1 [-1, 0]") && pieces[1].starts_with("2 [0, 1]"));
    assert_eq!(d.get_all("junction").collect::<Vec<_>>(), vec!["0 (0, 0)"]);
    assert_eq!(d.get("tv-numeric"), Some("2.00000000000, 2.00000000000"));
}

#[test]
fn regularity_verdicts() {
    let (code, out, _) = run(&["regularity", "--format", "structured"], "rep: sym:2\ncoefficients: 0; -t^2\n");
    assert_eq!(code, 0);
    let d = Document::parse(&out).unwrap();
    assert_eq!(d.get("overall"), Some("pass"));
    assert_eq!(d.get("derivative"), Some("0 (-1, 1)"));
    let (code, out, _) = run(&["regularity", "--format", "structured"], SQRT);
    assert_eq!(code, 0);
    let d = Document::parse(&out).unwrap();
    assert_eq!(d.get("overall"), Some("fail"));
    assert_eq!(d.get("valuation"), Some("k=2 v=1 required=2 fail"));
    let (_, out, _) = run(&["regularity", "--format", "structured", "--at", "1/2"], SQRT);
    assert_eq!(Document::parse(&out).unwrap().get("overall"), Some("pass"));
}

#[test]
fn eigen_of_symmetric_pair() {
    let (code, out, _) = run(&["eigen", "--format", "structured"], "matrix: [[0, t], [t, 0]]\n");
    assert_eq!(code, 0);
    let d = Document::parse(&out).unwrap();
    assert_eq!(d.get_all("root").collect::<Vec<_>>(), vec!["-s", "s"]);
    assert_eq!(d.get("piece"), Some("1 [-1, 1] base 0 N=1 side both permutation ()"));
    let (code, out, _) = run(&["eigen", "--format", "structured", "--mode", "differentiable"], "row: 0, 1\nrow: t, 0\n");
    assert_eq!(code, 0);
    let d = Document::parse(&out).unwrap();
    assert_eq!(d.kind, "eigen-flatness-report");
    assert_eq!(d.get("overall"), Some("fail"));
}

#[test]
fn probe_columns() {
    let (code, out, _) = run(&["probe-lp", "--format", "structured", "--p", "3", "--eps", "1e-2,1e-4"], SQRT);
    assert_eq!(code, 0);
    let d = Document::parse(&out).unwrap();
    let rows: Vec<_> = d.get_all("numeric").collect();
    assert_eq!(rows, vec!["eps=0.0100000000000 I=4.50000000000", "eps=0.000100000000000 I=49.5000000000"]);
}

#[test]
fn exit_codes() {
    let (code, _, err) = run(&["lift", "--order", "2"], "rep: sym:2\ncoefficients: 0; O(t^3)\n");
    assert_eq!(code, 2, "{err}");
    assert!(err.contains("nonflat"));
    assert_eq!(run(&["lift"], "rep: sym:3\ncoefficients: 0\n").0, 3);
    assert_eq!(run(&["lift"], "rep: foo:2\ncoefficients: 0; 1\n").0, 3);
    assert_eq!(run(&["lift"], "rep: sym:1\ncoefficient: t +\n").0, 3);
    assert_eq!(run(&["lift", "--order", "x"], SQRT).0, 3);
    assert_eq!(run(&["global", "--interval", "1:0"], SQRT).0, 3);
    assert_eq!(run(&["--help"], "").0, 0);
}

#[test]
fn deterministic_and_round_trip() {
    let cases: [(&[&str], &str); 6] = [
        (&["lift", "--format", "structured"], "rep: sym:3\ncoefficients: 0; -t^2; t^3\n"),
        (&["global", "--format", "structured"], "rep: sym:2\ncoefficients: 0; t^2 - 1/4\n"),
        (&["regularity", "--format", "structured"], "rep: sym:3\ncoefficients: 0; -t^2; 0\n"),
        (&["lift", "--format", "structured"], "rep: prod:[sym:2,cyc:2]\ncoefficients: 0; -t^2; t\n"),
        (&["eigen", "--format", "structured", "--mode", "ac"], "matrix: [[1, t], [t, -1]]\n"),
        (&["lift", "--format", "structured", "--at", "0"], "rep: cyc:3\ncoefficient: t\n"),
    ];
    for (args, input) in cases {
        let (code, a, err) = run(args, input);
        assert_eq!(code, 0, "{args:?}: {err}");
        let (_, b, _) = run(args, input);
        assert_eq!(a, b);
        let d = Document::parse(&a).unwrap();
        assert_eq!(d.to_string(), a);
    }
}

#[test]
fn input_from_file() {
    let path = std::env::temp_dir().join(format!("orbit-lift-{}.txt", std::process::id()));
    std::fs::write(&path, "orbit-lift/1\nkind: curve\nrep: sym:2\ncoefficient: 0\ncoefficient: -t\nbase_point: 0\ntruncation: 4\n").unwrap();
    let (code, out, _) = run(&["lift", "--format", "structured", path.to_str().unwrap()], "");
    std::fs::remove_file(&path).ok();
    assert_eq!(code, 0);
    assert_eq!(Document::parse(&out).unwrap().get("order"), Some("4"));
}
