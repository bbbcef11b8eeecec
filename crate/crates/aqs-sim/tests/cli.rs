//! Binary contract: exit codes, output files, and printed numbers.

use std::path::Path;
use std::process::{Command, Output};

use aqs_sim::cli::files::{AttackReportFile, TranscriptFile};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_aqs-sim"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

const VALID_CONFIG: &str = concat!(
    "{\n",
    "  \"n\": 4,\n",
    "  \"key_a\": \"1011\",\n",
    "  \"key_b\": \"110100\",\n",
    "  \"message\": \"0000\",\n",
    "  \"r_loop\": [\"0\", \"1\", \"+\"],\n",
    "  \"comparator\": { \"kind\": \"ideal\", \"epsilon\": 1e-9 },\n",
    "  \"seed\": 7\n",
    "}\n"
);

#[test]
fn demo_example_exits_zero_and_prints_golden_summary() {
    let out = run(&["demo-example"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("(10; 1, 0 \u{b7} 11; 1, 1)"));
    assert!(text.contains("(2; 1 \u{b7} 3; 1)"));
    assert!(text.contains("golden check: ok"));
}

#[test]
fn demo_example_perturbed_exits_one() {
    let out = run(&["demo-example", "--perturb-golden"]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("golden mismatch:"));
    assert!(text.contains("5 mismatched value(s)"));
}

#[test]
fn run_honest_writes_transcript_and_accepts() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "config.json", VALID_CONFIG);
    let out_path = dir.path().join("transcript.json");
    let out = run(&["run-honest", "--config", &config, "--out", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));

    let file: TranscriptFile =
        serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert!(file.verdict.accepted);
    assert_eq!(file.header.seed, 7);
    assert_eq!(file.header.config_digest.len(), 64);
    let steps: Vec<&str> = file.events.iter().map(|e| e.step.as_str()).collect();
    assert_eq!(
        steps,
        ["I1", "I2", "S1", "S2", "S3", "S4", "S5", "V1", "V2", "V3", "V4", "V5", "V6", "V7", "V8"]
    );
    let evidence = file.verdict.evidence.as_ref().unwrap();
    assert_eq!(evidence.n, 4);
    assert_eq!(evidence.qubits.len(), 8);
}

#[test]
fn run_honest_seed_override_changes_header_not_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "config.json", VALID_CONFIG);
    let out_path = dir.path().join("transcript.json");
    let out = run(&[
        "run-honest",
        "--config",
        &config,
        "--seed",
        "123",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let file: TranscriptFile =
        serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(file.header.seed, 123);
    assert!(file.verdict.accepted);
}

#[test]
fn short_signing_key_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    // L_A = 2 < ceil(4/2) + 2 = 4
    let config = write_config(
        dir.path(),
        "short.json",
        &VALID_CONFIG.replace("\"1011\"", "\"10\""),
    );
    let out = run(&["run-honest", "--config", &config]);
    assert_eq!(out.status.code(), Some(64));
    assert!(!out.stderr.is_empty());
}

#[test]
fn malformed_json_and_unknown_fields_are_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let broken = write_config(dir.path(), "broken.json", "{ not json");
    assert_eq!(run(&["run-honest", "--config", &broken]).status.code(), Some(64));

    let extra = write_config(
        dir.path(),
        "extra.json",
        &VALID_CONFIG.replace("\"seed\": 7", "\"seed\": 7,\n  \"bogus\": 1"),
    );
    assert_eq!(run(&["run-honest", "--config", &extra]).status.code(), Some(64));

    let missing = write_config(dir.path(), "missing.json", "{}");
    assert_eq!(run(&["run-honest", "--config", &missing]).status.code(), Some(64));
}

#[test]
fn run_attack_ideal_succeeds_and_reports_positions() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "config.json", VALID_CONFIG);
    let out_path = dir.path().join("report.json");
    let out = run(&[
        "run-attack",
        "--config",
        &config,
        "--ops",
        "all:X",
        "--oracle",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));

    let report: AttackReportFile =
        serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(report.trials, 1);
    assert_eq!(report.success_count, 1);
    assert_eq!(report.success_rate, 1.0);
    assert_eq!(report.located_positions, vec![2, 4, 6, 7]);
    assert_eq!(report.expected_positions.as_deref(), Some(&[2, 4, 6, 7][..]));
    let forged = report.forged_message.as_ref().unwrap();
    assert_eq!(
        serde_json::to_value(forged).unwrap(),
        serde_json::json!(["1", "1", "1", "1"])
    );
    assert_eq!(report.ops_spec, "all:X");
}

#[test]
fn run_attack_swap_below_threshold_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "swap.json",
        &VALID_CONFIG.replace(
            "{ \"kind\": \"ideal\", \"epsilon\": 1e-9 }",
            "{ \"kind\": \"swap\", \"m\": 1 }",
        ),
    );
    let out_path = dir.path().join("report.json");
    let out = run(&[
        "run-attack",
        "--config",
        &config,
        "--ops",
        "all:X",
        "--trials",
        "200",
        "--threshold",
        "0.9",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));

    let report: AttackReportFile =
        serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(report.trials, 200);
    assert!(report.success_rate < 0.9);
    let total: u64 = report.outcomes.iter().map(|o| o.count).sum();
    assert_eq!(total, 200);
}

#[test]
fn run_attack_rejects_bad_ops_spec() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "config.json", VALID_CONFIG);
    for spec in ["all:Q", "0:X", "9:X", "1", ";"] {
        let out = run(&["run-attack", "--config", &config, "--ops", spec]);
        assert_eq!(out.status.code(), Some(64), "spec {spec:?} should be rejected");
    }
    // a custom matrix parses: X written out as JSON
    let out = run(&[
        "run-attack",
        "--config",
        &config,
        "--ops",
        "all:[[[0,0],[1,0]],[[1,0],[0,0]]]",
    ]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn tamper_stats_message_class_shows_zero_detection() {
    let out = run(&["tamper-stats", "--class", "message", "--op", "X", "--trials", "300"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("empirical detection rate: 0.000000"));
    assert!(text.contains("analytic detection rate:  0.000000"));
}

#[test]
fn tamper_stats_decoy_class_matches_analytic_rate() {
    let dir = tempfile::tempdir().unwrap();
    // every decoy is |+⟩ or |-⟩, so a Z flip is always caught
    let config = write_config(
        dir.path(),
        "phase.json",
        &VALID_CONFIG.replace("[\"0\", \"1\", \"+\"]", "[\"+\", \"-\"]"),
    );
    let out = run(&[
        "tamper-stats",
        "--class",
        "decoy",
        "--op",
        "Z",
        "--trials",
        "300",
        "--config",
        &config,
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("empirical detection rate: 1.000000"), "{text}");
    assert!(text.contains("analytic detection rate:  1.000000"), "{text}");
}

#[test]
fn swap_stats_prints_rate_table() {
    let out = run(&[
        "swap-stats",
        "--m",
        "1,3",
        "--cases",
        "0.0,1.0",
        "--trials",
        "400",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    // F=1 rows are one-sided: analytic and empirical both exactly 1.000000
    let one_sided = text
        .lines()
        .filter(|l| l.split_whitespace().filter(|f| *f == "1.000000").count() >= 2)
        .count();
    assert!(one_sided >= 2, "{text}");
    for needle in ["F", "m", "analytic", "empirical"] {
        assert!(text.contains(needle), "missing column {needle}: {text}");
    }
}

#[test]
fn swap_stats_rejects_invalid_inputs() {
    assert_eq!(run(&["swap-stats", "--m", "0", "--cases", "0.5"]).status.code(), Some(64));
    assert_eq!(run(&["swap-stats", "--m", "1", "--cases", "1.5"]).status.code(), Some(64));
    assert_eq!(run(&["swap-stats", "--m", "1", "--cases", "abc"]).status.code(), Some(64));
}

#[test]
fn usage_errors_and_help() {
    assert_eq!(run(&["no-such-command"]).status.code(), Some(64));
    assert_eq!(run(&[]).status.code(), Some(64));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["run-honest", "--config"]).status.code(), Some(64));
    let missing = run(&["run-honest", "--config", "/nonexistent/config.json"]);
    assert_eq!(missing.status.code(), Some(64));
}
