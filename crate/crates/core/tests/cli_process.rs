//! End-to-end checks of the installed binary: real process spawning,
//! argv handling, exit codes, and stream separation.

use std::process::Command;

fn run(args: &[&str]) -> (i32, String, String) {
    let output = Command::new(env!("CARGO_BIN_EXE_angularft"))
        .args(args)
        .output()
        .expect("spawn binary");
    (
        output.status.code().expect("exit code"),
        String::from_utf8(output.stdout).expect("utf8 stdout"),
        String::from_utf8(output.stderr).expect("utf8 stderr"),
    )
}

#[test]
fn transform_writes_result_to_stdout() {
    let (code, stdout, stderr) = run(&["transform", "p^-2"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("output: 1/4*pi^-1 * r^-1"), "stdout: {stdout}");
    assert!(stderr.is_empty());
}

#[test]
fn malformed_expression_exits_2_with_diagnostic() {
    let (code, stdout, stderr) = run(&["transform", "p^"]);
    assert_eq!(code, 2);
    assert!(stdout.is_empty());
    assert!(stderr.contains("parse error at byte 2"), "stderr: {stderr}");
}

#[test]
fn unknown_flag_exits_2() {
    let (code, _, stderr) = run(&["--no-such-flag"]);
    assert_eq!(code, 2);
    assert!(!stderr.is_empty());
}

#[test]
fn out_of_domain_request_exits_1() {
    let (code, stdout, stderr) = run(&["chi", "3", "2"]);
    assert_eq!(code, 1);
    assert!(stdout.is_empty());
    assert!(stderr.contains("outside definable region"), "stderr: {stderr}");
}

#[test]
fn out_of_framework_transform_exits_1() {
    let (code, _, stderr) = run(&["transform", "p^4"]);
    assert_eq!(code, 1);
    assert!(stderr.contains("outside framework"), "stderr: {stderr}");
}

#[test]
fn help_and_version_exit_0() {
    let (code, stdout, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("Usage"));
    let (code, stdout, _) = run(&["--version"]);
    assert_eq!(code, 0);
    assert!(!stdout.is_empty());
}

#[test]
fn verification_run_exits_0() {
    let (code, stdout, _) = run(&["verify", "delta3", "1"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("verdict: pass"), "stdout: {stdout}");
}
