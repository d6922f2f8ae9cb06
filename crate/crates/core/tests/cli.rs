//! The `mulmetric` binary end to end.

use std::fs;
use std::process::{Command, Output};

use mulmetric::problem::{lookup, ProblemDefinition, TraceFile};

fn mulmetric(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mulmetric"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn solve_registry_scalar() {
    let o = mulmetric(&["solve", "paper-scalar"]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let trace = TraceFile::parse(&stdout(&o)).unwrap();
    assert!(trace.footer.converged);
    assert!((trace.footer.fixed_point[0] - 0.7411317711).abs() <= 1e-9);
}

#[test]
fn trace_is_byte_identical_across_runs() {
    let args = ["solve", "paper-segment", "--x0", "1,2"];
    let a = mulmetric(&args);
    let b = mulmetric(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn out_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trace.json");
    let to_file = mulmetric(&["solve", "sqrt-toy", "--out", path.to_str().unwrap()]);
    assert_eq!(to_file.status.code(), Some(0));
    let to_stdout = mulmetric(&["solve", "sqrt-toy"]);
    assert_eq!(fs::read_to_string(&path).unwrap(), stdout(&to_stdout));
}

#[test]
fn problem_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("quarter.toml");
    let def = lookup("quarter-chatterjea").unwrap().definition;
    fs::write(&path, def.to_toml().unwrap()).unwrap();
    let from_file = mulmetric(&["solve", "--problem", path.to_str().unwrap()]);
    let from_registry = mulmetric(&["solve", "quarter-chatterjea"]);
    assert_eq!(from_file.status.code(), Some(0));
    assert_eq!(from_file.stdout, from_registry.stdout);
    let reread = ProblemDefinition::parse(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(reread, def);
}

#[test]
fn exit_codes() {
    assert_eq!(mulmetric(&["examples"]).status.code(), Some(0));
    assert_eq!(
        mulmetric(&["solve", "no-such-problem"]).status.code(),
        Some(2)
    );
    assert_eq!(mulmetric(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        mulmetric(&["solve", "--problem", "/nonexistent/p.toml"])
            .status
            .code(),
        Some(1)
    );
    // x^2 with a claimed rate 1/2 on R+: the ratio monitor trips
    let o = mulmetric(&[
        "solve", "--space", "mul-abs", "--expr", "x^2", "--lambda", "0.5", "--x0", "2",
    ]);
    assert_eq!(o.status.code(), Some(3));
    let o = mulmetric(&["solve", "sqrt-toy", "--max-iter", "2"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn verify_refutes_squared_gap_distance() {
    let o = mulmetric(&["verify", "--expr", "exp((x-y)^2)", "--samples", "200"]);
    assert_eq!(o.status.code(), Some(4));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["m3_ok"], false);
    let w = report["witnesses"]
        .as_array()
        .unwrap()
        .iter()
        .find(|w| w["axiom"] == "m3")
        .unwrap();
    let pts: Vec<f64> = w["points"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p[0].as_f64().unwrap())
        .collect();
    assert_eq!(pts, vec![0.0, 1.0, 2.0]);
}

#[test]
fn verify_space_and_map() {
    assert_eq!(
        mulmetric(&["verify", "d-star", "--dim", "3", "--samples", "500"])
            .status
            .code(),
        Some(0)
    );
    assert_eq!(
        mulmetric(&["verify", "paper-scalar", "--samples", "500"])
            .status
            .code(),
        Some(0)
    );
    let o = mulmetric(&[
        "verify",
        "--space",
        "mul-abs",
        "--map",
        "square",
        "--lambda",
        "0.5",
        "--samples",
        "50",
    ]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn estimate_is_seeded() {
    let a = mulmetric(&["estimate", "paper-scalar", "--pairs", "2000", "--seed", "7"]);
    let b = mulmetric(&["estimate", "paper-scalar", "--pairs", "2000", "--seed", "7"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let lambda: f64 = stdout(&a).trim().parse().unwrap();
    assert!(lambda <= 0.7 + 1e-9 && lambda > 0.5, "{lambda}");
}
