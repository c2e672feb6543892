//! Golden-file equality for the command line and stability of the JSON
//! envelope across all verbs.

mod common;

use serde_json::Value;

/// Every fixture file replays byte for byte.
#[test]
fn fixtures_replay_exactly() {
    let dir = common::fixtures_dir();
    let mut paths: Vec<_> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("fixtures at {}: {e}", dir.display()))
        .map(|entry| entry.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "txt"))
        .collect();
    paths.sort();
    assert!(paths.len() >= 14, "expected the full fixture set");
    for path in &paths {
        let (args, expected) = common::load_fixture(path);
        let argv: Vec<&str> = args.iter().map(|s| s.as_str()).collect();
        let (code, stdout, stderr) = common::run_cli(&argv);
        assert_eq!(code, 0, "{}: exit (stderr: {stderr})", path.display());
        assert_eq!(stdout, expected, "{} diverged", path.display());
        assert!(stderr.is_empty(), "{}: unexpected stderr", path.display());
    }
}

fn json_output(args: &[&str]) -> Value {
    let mut argv = vec!["--format", "json"];
    argv.extend_from_slice(args);
    let (code, stdout, stderr) = common::run_cli(&argv);
    assert_eq!(code, 0, "{args:?}: stderr: {stderr}");
    serde_json::from_str(&stdout).unwrap_or_else(|e| panic!("{args:?}: invalid JSON: {e}"))
}

fn assert_envelope(value: &Value, command: &str) {
    let object = value.as_object().unwrap_or_else(|| panic!("{command}: not an object"));
    let keys: Vec<&str> = object.keys().map(|k| k.as_str()).collect();
    assert_eq!(
        keys,
        ["command", "diagnostics", "inputs", "result_terms", "verdict"],
        "{command}: envelope keys"
    );
    assert_eq!(object["command"], command);
}

/// The JSON envelope exposes exactly the five documented keys, in
/// order, for every verb.
#[test]
fn json_envelope_is_stable() {
    let cases: &[(&str, &[&str])] = &[
        ("transform", &["transform", "p^-2*phat[i1]*phat[i2]"]),
        ("inverse", &["inverse", "r^-1"]),
        ("decompose", &["decompose", "2"]),
        ("chi", &["chi", "0", "2"]),
        ("radial", &["radial", "-2", "0", "1.0"]),
        ("identity", &["identity", "inv-r", "2"]),
        ("verify", &["verify", "delta3", "1"]),
        ("selftest", &["selftest"]),
    ];
    for (command, args) in cases {
        let value = json_output(args);
        assert_envelope(&value, command);
    }
}

/// Representative result shapes inside the envelope stay fixed.
#[test]
fn json_result_shapes() {
    let value = json_output(&["chi", "-2", "0"]);
    let term = &value["result_terms"][0];
    assert_eq!(term["rational"], "1/2");
    assert_eq!(term["i_pow"], 0);
    assert_eq!(term["pi_pow"], 1);
    assert_eq!(value["diagnostics"]["float"], 1.5707963267948966);

    let value = json_output(&["transform", "p^-2"]);
    let terms = value["result_terms"].as_array().unwrap();
    assert_eq!(terms.len(), 1);
    assert_eq!(terms[0]["power"], -1);
    assert_eq!(terms[0]["point_mass"], false);
    assert_eq!(terms[0]["coeff"], "1/4*pi^-1");
    assert_eq!(terms[0]["angular"], "1");

    let value = json_output(&["verify", "delta3", "1"]);
    assert_eq!(value["verdict"], "pass");
    let rows = value["result_terms"].as_array().unwrap();
    assert!(!rows.is_empty());
    for row in rows {
        assert_eq!(row["pass"], true);
        assert!(row["error"].as_f64().unwrap() >= 0.0);
    }

    let value = json_output(&["decompose", "2"]);
    let rows = value["result_terms"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0]["ell"], 2);
    assert_eq!(rows[1]["ell"], 0);
}
