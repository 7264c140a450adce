//! End-to-end tests of the `onca` binary: output contracts, JSON schemas,
//! exit codes, and checkpoint behavior.

use std::path::Path;
use std::process::{Command, Output};

fn onca() -> Command {
    Command::new(env!("CARGO_BIN_EXE_onca"))
}

fn run(args: &[&str]) -> Output {
    onca().args(args).output().expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf-8 stderr")
}

fn json_lines(out: &Output) -> Vec<serde_json::Value> {
    stdout_of(out)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap_or_else(|e| panic!("bad JSON line {l:?}: {e}")))
        .collect()
}

#[test]
fn classify_reports_class_and_name() {
    let out = run(&["classify", "--rule", "116", "--span", "3"]);
    assert!(out.status.success());
    assert!(stdout_of(&out).contains("class=0 (none)"));

    let out = run(&["classify", "--rule", "116", "--span", "3", "--output", "json"]);
    let rows = json_lines(&out);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["rule"], "116");
    assert_eq!(rows[0]["N"], 2);
    assert_eq!(rows[0]["span"], 3);
    assert_eq!(rows[0]["class"], 0);
    assert_eq!(rows[0]["class_name"], "none");
    assert!(rows[0].get("openness_basis").is_none());
}

#[test]
fn classify_open_rule_names_its_basis() {
    let out = run(&["classify", "--rule", "90", "--span", "3", "--output", "json"]);
    let rows = json_lines(&out);
    assert_eq!(rows[0]["class"], 2);
    assert_eq!(rows[0]["class_name"], "open");
    assert_eq!(rows[0]["openness_basis"], "condensation-isolation");
}

#[test]
fn rule_sources_agree() {
    // The same rule through all three sources: number, tabular, polynomial.
    let by_rule = json_lines(&run(&[
        "classify", "--rule", "90", "--span", "3", "--output", "json",
    ]));
    let by_tabular = json_lines(&run(&[
        "classify", "--tabular", "01011010", "--output", "json",
    ]));
    let by_poly = json_lines(&run(&[
        "classify", "--poly", "x0 + x2", "--span", "3", "--output", "json",
    ]));
    assert_eq!(by_rule, by_tabular, "tabular span inference changed the verdict");
    assert_eq!(by_rule, by_poly);
}

#[test]
fn evolve_finite_line() {
    let out = run(&["evolve", "--rule", "76", "--span", "3", "--input", "01011"]);
    assert!(out.status.success());
    assert_eq!(stdout_of(&out).trim(), "101");
}

#[test]
fn evolve_circular_identity_preserves_word() {
    // Rule 240 projects onto the first window cell: the identity map.
    let out = run(&[
        "evolve", "--rule", "240", "--span", "3", "--input", "0110", "--circular",
        "--steps", "5",
    ]);
    assert!(out.status.success());
    assert_eq!(stdout_of(&out).trim(), "0110");

    // Rule 204 projects onto the second cell: one rotation per step.
    let out = run(&[
        "evolve", "--rule", "204", "--span", "3", "--input", "0110", "--circular",
    ]);
    assert_eq!(stdout_of(&out).trim(), "1100");
}

#[test]
fn decide_ap_witness_contract() {
    let out = run(&["decide-ap", "--rule", "116", "--span", "3", "--output", "json"]);
    let rows = json_lines(&out);
    assert_eq!(rows[0]["surjective"], false);
    assert_eq!(rows[0]["witness"], "010");

    let out = run(&["decide-ap", "--rule", "30", "--span", "3", "--output", "json"]);
    let rows = json_lines(&out);
    assert_eq!(rows[0]["surjective"], true);
    assert!(rows[0].get("witness").is_none());
}

#[test]
fn preimage_counts() {
    let out = run(&[
        "preimage", "--rule", "204", "--span", "3", "--word", "010", "--output", "json",
    ]);
    assert_eq!(json_lines(&out)[0]["count"], "4");

    let out = run(&[
        "preimage", "--rule", "116", "--span", "3", "--word", "010", "--output", "json",
    ]);
    assert_eq!(json_lines(&out)[0]["count"], "0");
}

#[test]
fn witness_subcommand() {
    let out = run(&["witness", "--rule", "116", "--span", "3", "--output", "json"]);
    let rows = json_lines(&out);
    assert_eq!(rows[0]["found"], true);
    assert_eq!(rows[0]["witness"], "010");
    assert_eq!(rows[0]["length"], 3);

    let out = run(&["witness", "--rule", "30", "--span", "3", "--output", "json"]);
    assert_eq!(json_lines(&out)[0]["found"], false);
}

#[test]
fn fdense_emits_one_pinned_record_per_pair() {
    let out = run(&[
        "fdense", "--tabular", "0011100111001100", "--m", "10", "--k-min", "10",
        "--k-max", "12", "--output", "json",
    ]);
    assert!(out.status.success());
    let rows = json_lines(&out);
    assert_eq!(rows.len(), 3);
    // Counts frozen from three independent implementations.
    let expected_p = [366u64, 166, 397];
    for (row, (k, p)) in rows.iter().zip((10..=12).zip(expected_p)) {
        assert_eq!(row["rule"], "13212");
        assert_eq!(row["N"], 2);
        assert_eq!(row["span"], 4);
        assert_eq!(row["k"], k);
        assert_eq!(row["m"], 10);
        assert_eq!(row["P"], p);
        assert_eq!(row["dense"], false);
        assert_eq!(
            row["missing_count"].as_u64().unwrap() > 0,
            true,
            "non-dense report lists missing words"
        );
        assert!(row["missing_sample"].as_array().unwrap().len() <= 8);
        assert!(row["v_k"].as_f64().unwrap() < 2.0);
    }
}

#[test]
fn fdense_checkpoint_resume_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let ckpt = dir.path().join("progress.jsonl");
    let base = [
        "fdense", "--tabular", "0011100111001100", "--m", "3", "--output", "json",
        "--checkpoint",
    ];
    let ckpt_str = ckpt.to_str().unwrap();

    let first = onca()
        .args(base)
        .arg(ckpt_str)
        .args(["--k-set", "4,5"])
        .output()
        .unwrap();
    assert!(first.status.success());
    let second = onca()
        .args(base)
        .arg(ckpt_str)
        .args(["--k-set", "4,5,6"])
        .output()
        .unwrap();
    assert!(second.status.success());

    let first_lines: Vec<String> = stdout_of(&first).lines().map(str::to_owned).collect();
    let second_lines: Vec<String> = stdout_of(&second).lines().map(str::to_owned).collect();
    assert_eq!(first_lines.len(), 2);
    assert_eq!(second_lines.len(), 3);
    // Resumed pairs are re-emitted from the checkpoint verbatim.
    assert_eq!(&second_lines[..2], &first_lines[..]);

    // A corrupt checkpoint warns, starts fresh, and still succeeds.
    std::fs::write(&ckpt, "{not json\n").unwrap();
    let third = onca()
        .args(base)
        .arg(ckpt_str)
        .args(["--k-set", "4"])
        .output()
        .unwrap();
    assert!(third.status.success());
    assert!(stderr_of(&third).contains("starting fresh"));
}

#[test]
fn vstat_identity_rule_hits_the_alphabet_bound() {
    let out = run(&[
        "vstat", "--rule", "204", "--span", "3", "--k-set", "1,2,3,10", "--output", "json",
    ]);
    assert!(out.status.success());
    let rows = json_lines(&out);
    assert_eq!(rows.len(), 5); // four periods plus the summary
    for row in &rows[..4] {
        assert_eq!(row["v_k"], 2.0);
    }
    assert_eq!(rows[4]["summary"], true);
    assert_eq!(rows[4]["v_max"], 2.0);
}

#[test]
fn enumerate_full_span3_space() {
    let out = run(&["enumerate", "--span", "3", "--output", "json"]);
    assert!(out.status.success());
    let rows = json_lines(&out);
    assert_eq!(rows.len(), 257); // one per rule plus the summary
    let summary = &rows[256];
    assert_eq!(summary["summary"], true);
    assert_eq!(summary["scanned"], 256);
    assert_eq!(summary["counts"]["none"], 226);
    assert_eq!(summary["counts"]["surjective"], 16);
    assert_eq!(summary["counts"]["open"], 8);
    assert_eq!(summary["counts"]["injective"], 6);
}

#[test]
fn enumerate_shards_partition_the_range() {
    let mut scanned = 0u64;
    let mut rules: Vec<String> = Vec::new();
    for shard in ["0/3", "1/3", "2/3"] {
        let out = run(&[
            "enumerate", "--span", "3", "--start", "0", "--end", "255", "--shard", shard,
            "--output", "json",
        ]);
        let rows = json_lines(&out);
        let summary = rows.last().unwrap();
        scanned += summary["scanned"].as_u64().unwrap();
        for row in &rows[..rows.len() - 1] {
            rules.push(row["rule"].as_str().unwrap().to_owned());
        }
    }
    assert_eq!(scanned, 256);
    let expected: Vec<String> = (0..256).map(|r| r.to_string()).collect();
    assert_eq!(rules, expected);
}

#[test]
fn verify_list_exit_codes_and_per_item_errors() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rules.txt");
    std::fs::write(&path, "# bundled projection rule\n18446744069414584320\n").unwrap();
    let out = run(&["verify-list", "--span", "6", "--file", path.to_str().unwrap()]);
    assert!(out.status.success());

    let out = run(&[
        "verify-list", "--span", "6", "18446744069414584320", "116", "zzz",
        "--output", "json",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let rows = json_lines(&out);
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0]["pass"], true);
    assert_eq!(rows[1]["pass"], false); // balanced check fails: class 0
    assert_eq!(rows[2]["pass"], false);
    assert!(rows[2]["error"].as_str().is_some()); // malformed, not dropped
}

#[test]
fn export_dfa_shows_the_missing_transition() {
    let out = run(&["export-dfa", "--rule", "76", "--span", "3"]);
    assert!(out.status.success());
    let dot = stdout_of(&out);
    assert!(dot.starts_with("digraph"));
    assert!(dot.contains("\"{u2}\""));
    assert!(dot.contains("\"{u2}\" --1--> (no transition)"));
}

#[test]
fn repro_table2_passes() {
    let out = run(&["repro-table2", "--output", "json"]);
    assert!(out.status.success());
    let rows = json_lines(&out);
    assert_eq!(rows.len(), 32);
    assert!(rows.iter().all(|r| r["pass"] == true));
}

#[test]
fn repro_table1_passes() {
    let out = run(&["repro-table1", "--output", "json"]);
    assert!(out.status.success());
    let rows = json_lines(&out);
    assert_eq!(rows.len(), 18);
    assert!(rows.iter().all(|r| r["pass"] == true));
}

#[test]
fn exit_codes_separate_usage_from_domain_errors() {
    // No rule source: usage error.
    let out = run(&["classify", "--span", "3"]);
    assert_eq!(out.status.code(), Some(2));

    // Rule number out of range: domain error, message on stderr only.
    let out = run(&["classify", "--rule", "999", "--span", "3"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout_of(&out).is_empty());
    assert!(stderr_of(&out).contains("error:"));

    // Missing k specification for fdense: usage error.
    let out = run(&["fdense", "--rule", "90", "--span", "3", "--m", "3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn budget_flag_overrides_environment() {
    // Budget too small via environment: the only k fails, domain error.
    let out = onca()
        .args(["vstat", "--rule", "204", "--span", "3", "--k-set", "20"])
        .env("ONCA_BUDGET_LOG2", "10")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_of(&out).contains("budget"));

    // The flag takes precedence over the environment.
    let out = onca()
        .args([
            "vstat", "--rule", "204", "--span", "3", "--k-set", "20", "--budget-log2", "21",
        ])
        .env("ONCA_BUDGET_LOG2", "10")
        .output()
        .unwrap();
    assert!(out.status.success());
}

#[test]
fn capacity_skips_warn_but_do_not_fail_fdense() {
    let out = run(&[
        "fdense", "--tabular", "0011100111001100", "--m", "10", "--k-set", "40",
        "--output", "json",
    ]);
    assert!(out.status.success());
    assert!(stdout_of(&out).is_empty());
    assert!(stderr_of(&out).contains("exceeds the memory budget"));
}

#[test]
fn checkpoint_directory_error_is_a_domain_error() {
    let missing = Path::new("/nonexistent-dir-for-onca-test/progress.jsonl");
    let out = run(&[
        "fdense", "--rule", "90", "--span", "3", "--m", "3", "--k-set", "4",
        "--checkpoint", missing.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
}
