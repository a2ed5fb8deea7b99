//! End-to-end tests of the binary: output formats, exit codes, and
//! byte-stability across runs.

use std::io::Write;
use std::process::{Command, Output, Stdio};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_polyauto"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write_tmp(name: &str, content: &str) -> std::path::PathBuf {
    let path = std::env::temp_dir().join(format!("polyauto-cli-{name}"));
    std::fs::write(&path, content).unwrap();
    path
}

#[test]
fn lemma_prints_zero() {
    let out = run(&["lemma", "--n", "0", "--k", "2", "--m", "2", "--r", "0", "--a", "2", "--b", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "0\n");
}

#[test]
fn counterexample_output() {
    let out = run(&["counterexample", "--a", "2", "--c", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("source=(5)"));
    assert!(text.contains("target=(2,2,2)"));
    assert!(text.contains("dim_source=11"));
    assert!(text.contains("dim_target=12"));
    assert!(text.contains("preceq=false"));
}

#[test]
fn polydegree_and_failure_exit_codes() {
    let good = write_tmp("good.map", "A: 1\nF: Y\nG: X + Y^2\n");
    let out = run(&["polydegree", "-f", good.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "(2)\n");

    // Not an automorphism: verification failure, exit 1.
    let bad = write_tmp("bad.map", "A: 1\nF: X + Y^2\nG: X\n");
    let out = run(&["polydegree", "-f", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));

    // Syntax error in the file: exit 2.
    let broken = write_tmp("broken.map", "A: 1\nF: 2Y\nG: X\n");
    let out = run(&["polydegree", "-f", broken.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn check_triangular_pass_and_fail() {
    let u = write_tmp("u.map", "A: 2\nF: u2*Y^2 + u1*Y + u0\n");
    let out = run(&["check-triangular", "--m", "1", "--a", "2", "-f", u.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("triangular=true"));
    assert!(text.contains("q=1,1,1"));

    let neg = write_tmp("neg.map", "A: 2\nF: -1*u2*Y^2\n");
    let out = run(&["check-triangular", "--m", "1", "--a", "2", "-f", neg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("triangular=false"));
}

#[test]
fn compose_outermost_first() {
    let pi = write_tmp("pi.map", "A: 1\nF: Y\nG: X\n");
    let t = write_tmp("t.map", "A: 1\nF: X + Y^2\nG: Y\n");
    let out = run(&["compose", "-f", pi.to_str().unwrap(), "-f", t.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "A: 1\nF: Y\nG: Y^2 + X\n");
}

#[test]
fn inverse_geometric_series() {
    // U = Y at (0,1), b = 1: I = Y(1 - Z + Z^2 - Z^3).
    let out = run(&["inverse", "--a", "1", "--b", "1", "--order", "3", "--at", "0,1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "a0=Y\na1=-Y\na2=Y\na3=-Y\n");
}

#[test]
fn build_verify_pipeline_and_byte_stability() {
    let tau = write_tmp("tau.map", "A: 2\nF: X - 8*Y^3 - 5*Y^4 - 2*Y^5\nG: Y\n");
    let args = ["build-family", "--a", "2", "--b", "2", "--c", "1", "--tau", tau.to_str().unwrap()];
    let out1 = run(&args);
    let out2 = run(&args);
    assert_eq!(out1.status.code(), Some(0));
    assert_eq!(out1.stdout, out2.stdout, "build output must be byte-stable");
    let block = stdout(&out1);
    assert!(block.contains("x=1,1,1"));
    assert!(block.contains("ubar=Y^2 + Y + 1"));

    // Pipe the block into verify-family over stdin.
    let mut child = bin()
        .args(["verify-family", "--seed", "11"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.as_mut().unwrap().write_all(block.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report = String::from_utf8(out.stdout).unwrap();
    assert!(report.contains("overall=pass"));
    assert_eq!(report.matches("[PASS]").count(), 7);

    // Tamper with a stored factor: exit 1 and a named failing check.
    let tampered = block.replace("+ 4*Y + X*Z^-1", "+ 5*Y + X*Z^-1");
    assert_ne!(tampered, block);
    let tampered_file = write_tmp("tampered.fam", &tampered);
    let out = run(&["verify-family", "-f", tampered_file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn build_family_no_rational_root_is_domain_error() {
    let tau = write_tmp("tau-irr.map", "A: 2\nF: X - 4*Y^5\nG: Y\n");
    let out = run(&["build-family", "--a", "2", "--b", "2", "--c", "1", "--tau", tau.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("no rational"));
    assert!(err.contains("y_5 = -2"));
}

#[test]
fn build_family_from_x_mode() {
    let args = ["build-family", "--a", "2", "--b", "2", "--c", "1", "--from-x", "1,-1,3/2"];
    let out = run(&args);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("x=1,-1,3/2"));
}
