use std::io::Write;
use std::process::{Command, Output, Stdio};

fn pll(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pll")).args(args).output().expect("run pll")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn prove_exit_codes() {
    let o = pll(&["prove", "=> O O p -> O p"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("derivable"));

    let o = pll(&["prove", "--calculus", "g3", "=> O p -> p"]);
    assert_eq!(o.status.code(), Some(1));

    let o = pll(&["prove", "=> p &"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn prove_json_round_trips_through_cut_elimination() {
    let o = pll(&["--format", "json", "prove", "--calculus", "g3", "p & q => q & p"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["derivable"], true);
    let derivation = v["derivation"].to_string();

    let mut child = Command::new(env!("CARGO_BIN_EXE_pll"))
        .args(["eliminate-cut", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(derivation.as_bytes()).unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("cuts removed: 0"));
}

#[test]
fn interpolate_prints_a_verified_interpolant() {
    let o = pll(&["interpolate", "--phi", "p & q", "--psi", "q | r"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("interpolant: q\n"));

    let o = pll(&["interpolate", "--phi", "p", "--psi", "q"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn uniform_toy_calculi() {
    let o = pll(&["uniform", "--atom", "p", "--sequent", "p & q, r, s => t", "--calculus", "land-only"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("raw: false | t | false | t\n"), "{out}");
    assert!(out.contains("simplified: t\n"), "{out}");

    let o = pll(&["uniform", "--quantifier", "exists", "--atom", "p", "--sequent", "r => p | q", "--calculus", "ror-only"]);
    assert!(stdout(&o).contains("simplified: r\n"));
}

#[test]
fn uniform_reports_properties() {
    let o = pll(&["--format", "json", "uniform", "--atom", "p", "--sequent", "=> O O p -> O p"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["properties"]["p_free"], true);
    assert_eq!(v["properties"]["forall_left"], true);
}

#[test]
fn check_runs_a_suite() {
    let o = pll(&["check", "equivalence", "--count", "100", "--seed", "7", "--max-depth", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "equivalence: 100/100 agree\n");

    let o = pll(&["check", "nonsense"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn budget_exhaustion_exits_with_three() {
    let o = pll(&["--budget", "5", "prove", "--calculus", "g3", "=> (p -> q) -> (q -> r) -> p -> r"]);
    assert_eq!(o.status.code(), Some(3));
}
