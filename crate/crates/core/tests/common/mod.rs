//! Shared helpers for the integration test targets.

use std::path::PathBuf;

/// Runs the command line interface in-process and captures
/// `(exit code, stdout, stderr)`.
pub fn run_cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("angularft".to_string()).chain(args.iter().map(|s| s.to_string()));
    let code = angularft::cli::run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).expect("utf8 stdout"),
        String::from_utf8(err).expect("utf8 stderr"),
    )
}

/// Workspace-level fixtures directory.
pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .join("fixtures")
}

/// Loads one fixture: the command line from the leading `$ ` line and
/// the expected stdout from the remainder.
pub fn load_fixture(path: &std::path::Path) -> (Vec<String>, String) {
    let content = std::fs::read_to_string(path)
        .unwrap_or_else(|e| panic!("read {}: {e}", path.display()));
    let mut lines = content.lines();
    let header = lines
        .next()
        .unwrap_or_else(|| panic!("{} is empty", path.display()));
    let command = header
        .strip_prefix("$ ")
        .unwrap_or_else(|| panic!("{} must start with `$ `", path.display()));
    let args: Vec<String> = command.split_whitespace().map(|s| s.to_string()).collect();
    let mut expected = lines.collect::<Vec<_>>().join("\n");
    if !expected.is_empty() {
        expected.push('\n');
    }
    (args, expected)
}
