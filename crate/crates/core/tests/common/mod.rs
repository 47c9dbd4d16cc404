//! Shared helpers for the integration-test targets: the fixed CLI corpus
//! and a runner for the compiled binary.

use std::path::Path;
use std::process::Command;

/// Absolute path of a file under `tests/golden/`.
pub fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name)
        .display()
        .to_string()
}

/// One corpus entry: a case name (also the golden-file stem), the argument
/// list, and the expected exit code.
pub struct Case {
    pub name: &'static str,
    pub args: Vec<String>,
    pub exit: i32,
}

/// The fixed command corpus: every subcommand appears at least once.
pub fn corpus() -> Vec<Case> {
    let bform2 = fixture("bform2.json");
    let sp2 = fixture("sp2.json");
    let sp4 = fixture("sp4.json");
    let case = |name: &'static str, args: &[&str], exit: i32| Case {
        name,
        args: args.iter().map(|s| s.to_string()).collect(),
        exit,
    };
    vec![
        case("check_isometry", &["check", "--problem", &bform2, "--T", "U3"], 0),
        case("check_non_isometry", &["check", "--problem", &bform2, "--T", "N"], 0),
        case("eldiv_unipotent", &["eldiv", "--problem", &bform2, "--T", "U3"], 0),
        case("eldiv_mixed", &["eldiv", "--problem", &sp4, "--T", "M"], 0),
        case("primary_mixed", &["primary", "--problem", &sp4, "--T", "M"], 0),
        case("jordan_mixed", &["jordan", "--problem", &sp4, "--T", "M"], 0),
        case("jm_unipotent", &["jm", "--problem", &bform2, "--T", "U3"], 0),
        case("unidec_unipotent", &["unidec", "--problem", &bform2, "--T", "U3"], 0),
        case("conj_conjugate_pair", &["conj", "--problem", &sp2, "--S", "S", "--T", "T"], 0),
        case("conj_divisor_mismatch", &["conj", "--problem", &sp2, "--S", "S", "--T", "I"], 0),
        case("symform_weight_two", &["symform", "2", "--p", "7"], 0),
        case(
            "oracle_extension_search",
            &["oracle", "--problem", &sp2, "--S", "S", "--T", "T", "--degree", "2"],
            0,
        ),
    ]
}

/// Run the compiled binary with `args`; return (stdout, exit code).
pub fn run(args: &[String]) -> (Vec<u8>, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_isoconj"))
        .args(args)
        .output()
        .expect("binary runs");
    (out.stdout, out.status.code().expect("exit code"))
}
