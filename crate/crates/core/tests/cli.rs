//! Golden-file tests for the command-line front end: a fixed corpus covering
//! every subcommand, each case run twice and compared byte-for-byte against
//! the stored expected output.
//!
//! To regenerate the `.out` files after an intentional output change, run
//! each corpus command by hand and save stdout over the corresponding file.

mod common;

use common::{corpus, fixture, run};

#[test]
fn corpus_outputs_match_golden_files_and_repeat_identically() {
    for case in corpus() {
        let (first, code1) = run(&case.args);
        let (second, code2) = run(&case.args);
        assert_eq!(code1, case.exit, "{}: exit code", case.name);
        assert_eq!(code2, case.exit, "{}: exit code on rerun", case.name);
        assert_eq!(
            first, second,
            "{}: repeated runs must be byte-identical",
            case.name
        );
        let golden_path = fixture(&format!("{}.out", case.name));
        let golden = std::fs::read(&golden_path)
            .unwrap_or_else(|e| panic!("{}: missing golden file {golden_path}: {e}", case.name));
        assert_eq!(
            first,
            golden,
            "{}: output differs from golden file\n got: {}\nwant: {}",
            case.name,
            String::from_utf8_lossy(&first),
            String::from_utf8_lossy(&golden),
        );
    }
}

#[test]
fn usage_errors_exit_one_with_an_error_envelope() {
    let (stdout, code) = run(&["eldiv".to_string()]);
    assert_eq!(code, 1);
    let doc: serde_json::Value = serde_json::from_slice(&stdout).expect("valid JSON envelope");
    assert_eq!(doc["error"]["code"], serde_json::json!("usage"));
    assert!(doc["result"].is_null());
}

#[test]
fn domain_errors_exit_two_with_code_and_status() {
    let problem = fixture("bform2.json");
    let (stdout, code) = run(&[
        "jm".to_string(),
        "--problem".to_string(),
        problem,
        "--T".to_string(),
        "I".to_string(),
    ]);
    assert_eq!(code, 2);
    let doc: serde_json::Value = serde_json::from_slice(&stdout).expect("valid JSON envelope");
    assert_eq!(doc["error"]["code"], serde_json::json!("zero-nilpotent"));
    assert_eq!(doc["error"]["status"], serde_json::json!(11));
    assert_eq!(doc["command"], serde_json::json!("jm"));
}
