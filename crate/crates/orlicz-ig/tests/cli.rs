//! End-to-end checks of the binary: exit codes, output determinism,
//! configuration precedence, and the fixture regeneration flow.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_orlicz-ig"));
    // Isolate from the ambient environment so tests control the seed.
    c.env_remove("ORLICZ_IG_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_str(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is UTF-8")
}

fn stderr_str(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr is UTF-8")
}

#[test]
fn successful_runs_exit_zero_with_json_on_stdout() {
    let out = run(&["norm", "--phi", "cosh2", "--f", "x"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_str(&out));
    let doc: serde_json::Value = serde_json::from_str(&stdout_str(&out)).expect("stdout is JSON");
    let value = doc["value"].as_f64().expect("value present");
    // Printed at 12 significant digits.
    assert_eq!(value, 0.849321800288);
    assert!(stdout_str(&out).contains("\"value\":0.849321800288"));
}

#[test]
fn domain_verdicts_serialize_with_exit_code_two() {
    let out = run(&["k1", "--u", "x^2"]);
    assert_eq!(out.status.code(), Some(2));
    let doc: serde_json::Value = serde_json::from_str(&stdout_str(&out)).expect("verdict JSON");
    assert_eq!(doc["verdict"]["kind"], "outside-domain");
    assert!(doc["verdict"]["message"].as_str().expect("message").contains("diverges"));
}

#[test]
fn usage_errors_exit_one_with_distinct_messages() {
    let unknown = run(&["norm", "--phi", "wobbly", "--f", "x"]);
    assert_eq!(unknown.status.code(), Some(1));
    assert!(stderr_str(&unknown).contains("unknown preset"));

    let malformed = run(&["norm", "--phi", "cosh2", "--f", "x +* 3"]);
    assert_eq!(malformed.status.code(), Some(1));
    assert!(stderr_str(&malformed).contains("malformed field expression"));

    let mismatch = run(&[
        "norm",
        "--phi",
        "cosh2",
        "--f",
        "{\"dim\":2,\"expr\":{\"op\":\"coord\",\"axis\":0}}",
        "--n",
        "1",
    ]);
    assert_eq!(mismatch.status.code(), Some(1));
    assert!(stderr_str(&mismatch).contains("dimension mismatch"));

    let texts = [stderr_str(&unknown), stderr_str(&malformed), stderr_str(&mismatch)];
    assert!(texts[0] != texts[1] && texts[1] != texts[2] && texts[0] != texts[2]);
}

#[test]
fn every_subcommand_offers_help() {
    let subs = [
        "norm",
        "dualnorm",
        "momentnorm",
        "tailcert",
        "class",
        "truncation",
        "conjugate",
        "domination",
        "hermite",
        "expand",
        "k1",
        "chart",
        "fisher",
        "hyvarinen",
        "otto",
        "logsob",
        "sphere",
        "portmanteau",
        "sobolev",
        "gen-fixtures",
    ];
    for sub in subs {
        let out = run(&[sub, "--help"]);
        assert_eq!(out.status.code(), Some(0), "{sub} --help failed");
        assert!(!stdout_str(&out).is_empty(), "{sub} --help printed nothing");
    }
    // Usage without arguments is an error, not a hang.
    let bare = run(&[]);
    assert_eq!(bare.status.code(), Some(1));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let args =
        ["class", "--f", "x^2"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);

    let mc = ["norm", "--phi", "cosh2", "--f", "x", "--backend", "montecarlo", "--samples",
        "20000", "--seed", "5"];
    let c = run(&mc);
    let d = run(&mc);
    assert_eq!(c.status.code(), Some(0), "stderr: {}", stderr_str(&c));
    assert_eq!(c.stdout, d.stdout);
}

#[test]
fn config_file_applies_and_flags_then_env_override_it() {
    let dir = tempfile::tempdir().expect("tempdir");
    let cfg_path = dir.path().join("run.json");
    std::fs::write(
        &cfg_path,
        "{\"backend\":\"montecarlo\",\"samples\":20000,\"seed\":5}",
    )
    .expect("config written");
    let cfg = cfg_path.to_str().expect("utf-8 path");

    let from_config = run(&["norm", "--phi", "cosh2", "--f", "x", "--config", cfg]);
    assert_eq!(from_config.status.code(), Some(0));
    assert!(stdout_str(&from_config).contains("monte-carlo"));

    let explicit = run(&[
        "norm", "--phi", "cosh2", "--f", "x", "--backend", "montecarlo", "--samples", "20000",
        "--seed", "5",
    ]);
    assert_eq!(from_config.stdout, explicit.stdout, "config file reproduces explicit flags");

    let flag_override =
        run(&["norm", "--phi", "cosh2", "--f", "x", "--config", cfg, "--seed", "6"]);
    assert_ne!(from_config.stdout, flag_override.stdout, "seed flag overrides config");

    let env_override = bin()
        .args(["norm", "--phi", "cosh2", "--f", "x", "--config", cfg, "--seed", "6"])
        .env("ORLICZ_IG_SEED", "5")
        .output()
        .expect("binary runs");
    assert_eq!(
        env_override.stdout, from_config.stdout,
        "environment seed overrides both flag and config"
    );

    let bad_env = bin()
        .args(["norm", "--phi", "cosh2", "--f", "x"])
        .env("ORLICZ_IG_SEED", "garden")
        .output()
        .expect("binary runs");
    assert_eq!(bad_env.status.code(), Some(1));
}

#[test]
fn csv_format_emits_tables() {
    let tail = run(&[
        "tailcert", "--f", "x", "--points", "3", "--tmax", "3", "--format", "csv",
    ]);
    assert_eq!(tail.status.code(), Some(0));
    let text = stdout_str(&tail);
    assert!(text.starts_with("t,empirical_tail,bound\n"), "got: {text}");
    assert_eq!(text.lines().count(), 4);

    let flat = run(&["k1", "--u", "0.3 * x", "--format", "csv"]);
    assert!(stdout_str(&flat).starts_with("key,value\n"));
}

#[test]
fn gen_fixtures_regenerates_deterministically() {
    let dir = tempfile::tempdir().expect("tempdir");
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for d in [&a, &b] {
        let out = run(&["gen-fixtures", "--dir", d.to_str().expect("utf-8 path")]);
        assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_str(&out));
    }
    let fa = std::fs::read(a.join("fixtures.json")).expect("first corpus");
    let fb = std::fs::read(b.join("fixtures.json")).expect("second corpus");
    assert_eq!(fa, fb, "same binary must regenerate identical bytes");

    let parsed: Vec<serde_json::Value> =
        serde_json::from_slice(&fa).expect("fixtures parse as JSON");
    assert_eq!(parsed.len(), 50);

    // The committed corpus parses and has the same shape.
    let committed = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/fixtures.json");
    let committed: Vec<serde_json::Value> =
        serde_json::from_slice(&std::fs::read(committed).expect("committed corpus"))
            .expect("committed corpus parses");
    assert_eq!(committed.len(), 50);
}
