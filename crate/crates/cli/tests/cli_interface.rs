//! Black-box tests of the `binsim` binary: exit codes, flag rules, file
//! outputs, and run-to-run byte stability.
//!
//! Exit-code contract: `0` success, `1` a check failed at runtime, `2`
//! configuration or usage error.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use binsim_cli::RunReport;

fn binsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_binsim"))
        .args(args)
        .output()
        .expect("the binary launches")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("the binary exits normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is UTF-8")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr is UTF-8")
}

fn write(path: &Path, contents: &str) {
    fs::write(path, contents).expect("test files are writable");
}

const CONFIG: &str = r#"{
  "name": "cli-test",
  "n": 16,
  "steps": 400,
  "seed": 11,
  "seeds_count": 2,
  "schedule": {"kind": "Sinusoid", "mid": 0.6, "amplitude": 0.2, "period": 100},
  "deletion_model": "bin",
  "sample_every": 100
}"#;

// ---------------------------------------------------------------------------
// usage errors (exit 2)
// ---------------------------------------------------------------------------

#[test]
fn unknown_flags_subcommands_and_suites_exit_2() {
    assert_eq!(code(&binsim(&["simulate", "--bogus"])), 2);
    assert_eq!(code(&binsim(&["frobnicate"])), 2);
    let unknown = binsim(&["suite", "no-such-suite"]);
    assert_eq!(code(&unknown), 2);
    assert!(stderr(&unknown).contains("available: all, ball-potential-identity"));
}

#[test]
fn bad_configs_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("config.json");

    // Missing file.
    assert_eq!(
        code(&binsim(&["simulate", "--config", path.to_str().unwrap()])),
        2
    );
    // Malformed JSON.
    write(&path, "{not json");
    assert_eq!(
        code(&binsim(&["simulate", "--config", path.to_str().unwrap()])),
        2
    );
    // Parses but violates an invariant (too few bins).
    write(&path, &CONFIG.replace("\"n\": 16", "\"n\": 1"));
    let invalid = binsim(&["simulate", "--config", path.to_str().unwrap()]);
    assert_eq!(code(&invalid), 2);
    assert!(stderr(&invalid).contains("2 bins"));
}

#[test]
fn conflicting_flags_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.json");
    write(&config, CONFIG);
    let schedule = dir.path().join("schedule.json");
    write(&schedule, r#"{"kind": "Constant", "beta": 0.5}"#);
    let c = config.to_str().unwrap();
    let s = schedule.to_str().unwrap();

    assert_eq!(
        code(&binsim(&["simulate", "--config", c, "--beta", "0.5", "--schedule", s])),
        2
    );
    assert_eq!(
        code(&binsim(&["simulate", "--config", c, "--seed", "1", "--seeds", "2"])),
        2
    );
    // couple needs exactly one of --beta/--schedule.
    assert_eq!(
        code(&binsim(&["couple", "--n", "8", "--steps", "10", "--seed", "1", "--mode", "meeting"])),
        2
    );
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

#[test]
fn simulate_writes_identical_bytes_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.json");
    write(&config, CONFIG);
    let c = config.to_str().unwrap();
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");

    for out in [&out_a, &out_b] {
        let run = binsim(&["simulate", "--config", c, "--out", out.to_str().unwrap()]);
        assert_eq!(code(&run), 0, "stderr: {}", stderr(&run));
    }
    for file in ["config.json", "samples.jsonl", "report.json"] {
        let a = fs::read(out_a.join(file)).unwrap();
        let b = fs::read(out_b.join(file)).unwrap();
        // report.json embeds wall-clock time; everything else is byte-stable.
        if file == "report.json" {
            let ra: RunReport = serde_json::from_slice(&a).unwrap();
            let rb: RunReport = serde_json::from_slice(&b).unwrap();
            assert_eq!(ra.seeds, rb.seeds);
            assert_eq!(ra.aggregate, rb.aggregate);
        } else {
            assert_eq!(a, b, "{file} differs between identical runs");
        }
    }

    // The report file round-trips field-exactly through its own type.
    let raw = fs::read_to_string(out_a.join("report.json")).unwrap();
    let report: RunReport = serde_json::from_str(&raw).unwrap();
    let rendered = serde_json::to_string_pretty(&report).unwrap() + "\n";
    assert_eq!(raw, rendered);
}

#[test]
fn simulate_pins_the_jsonl_key_order_and_csv_header() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.json");
    write(&config, CONFIG);
    let out = dir.path().join("run");
    let run = binsim(&[
        "simulate",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--csv",
    ]);
    assert_eq!(code(&run), 0, "stderr: {}", stderr(&run));

    let jsonl = fs::read_to_string(out.join("samples.jsonl")).unwrap();
    let first = jsonl.lines().next().unwrap();
    let keys: Vec<&str> = first
        .split('"')
        .skip(1)
        .step_by(2)
        .take_while(|k| !k.is_empty())
        .filter(|k| !k.starts_with(':') && !k.starts_with(','))
        .collect();
    assert_eq!(
        keys,
        [
            "replica",
            "step",
            "total_load",
            "max_total_load",
            "min_load",
            "max_load",
            "average",
            "disc",
            "adisc",
            "overload",
            "nonempty_bins"
        ]
    );
    // 2 replicas x 4 sampled steps.
    assert_eq!(jsonl.lines().count(), 8);

    let csv = fs::read_to_string(out.join("samples.csv")).unwrap();
    assert_eq!(
        csv.lines().next().unwrap(),
        "replica,step,total_load,max_total_load,min_load,max_load,average,disc,\
         adisc,overload,nonempty_bins"
    );
    assert_eq!(csv.lines().count(), 9); // header + 8 rows
}

#[test]
fn simulate_overrides_take_effect_and_print_a_report() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.json");
    write(&config, CONFIG);
    let run = binsim(&[
        "simulate",
        "--config",
        config.to_str().unwrap(),
        "--beta",
        "0.5",
        "--steps",
        "64",
        "--seeds",
        "3",
        "--n",
        "32",
        "--delete-model",
        "ball",
        "--sample-every",
        "64",
    ]);
    assert_eq!(code(&run), 0, "stderr: {}", stderr(&run));
    let report: RunReport = serde_json::from_str(&stdout(&run)).unwrap();
    assert_eq!(report.config.n, 32);
    assert_eq!(report.config.steps, 64);
    assert_eq!(report.config.seeds_count, 3);
    assert_eq!(report.seeds.len(), 3);
    assert_eq!(report.config.schedule.bounds(), (0.5, 0.5));
    assert_eq!(report.seeds[0].sample_count, 1);
}

// ---------------------------------------------------------------------------
// couple
// ---------------------------------------------------------------------------

#[test]
fn couple_reports_both_modes() {
    let maj = binsim(&[
        "couple", "--n", "8", "--steps", "2000", "--seed", "5", "--beta", "0.6", "--mode",
        "majorization",
    ]);
    assert_eq!(code(&maj), 0, "stderr: {}", stderr(&maj));
    let report: serde_json::Value = serde_json::from_str(&stdout(&maj)).unwrap();
    assert_eq!(report["violations"], 0);
    assert_eq!(report["passed"], true);

    let meet = binsim(&[
        "couple", "--n", "8", "--steps", "500000", "--seed", "5", "--beta", "0.6", "--mode",
        "meeting",
    ]);
    assert_eq!(code(&meet), 0, "stderr: {}", stderr(&meet));
    let report: serde_json::Value = serde_json::from_str(&stdout(&meet)).unwrap();
    assert!(report["met_at"].is_u64());
    assert_eq!(report["passed"], true);
}

// ---------------------------------------------------------------------------
// thresholds
// ---------------------------------------------------------------------------

#[test]
fn thresholds_prints_the_table_or_rejects_degenerate_sizes() {
    let ok = binsim(&["thresholds", "--n", "131072", "--beta-hat", "0.5", "--gamma", "1"]);
    assert_eq!(code(&ok), 0);
    let text = stdout(&ok);
    assert!(text.contains("level  0: alpha =       1024.000"));
    assert!(text.contains("level  1: alpha =        141.402"));
    assert!(text.contains("level  2: alpha =         24.000"));
    assert!(text.contains("ell_star = 1"));
    assert!(text.contains("sandwich bounds hold at every level"));

    let degenerate = binsim(&["thresholds", "--n", "8", "--beta-hat", "0.6", "--gamma", "1"]);
    assert_eq!(code(&degenerate), 2);
    assert!(stderr(&degenerate).contains("degenerate"));

    let bad_beta = binsim(&["thresholds", "--n", "1024", "--beta-hat", "1.5", "--gamma", "1"]);
    assert_eq!(code(&bad_beta), 2);
}

// ---------------------------------------------------------------------------
// walk
// ---------------------------------------------------------------------------

#[test]
fn walk_subcommands_match_their_closed_forms() {
    let cross = binsim(&[
        "walk", "cross", "--r", "2", "--a", "2", "--b", "3", "--trials", "20000",
    ]);
    assert_eq!(code(&cross), 0, "stdout: {}", stdout(&cross));
    assert!(stdout(&cross).contains("PASS"));
    assert!(stdout(&cross).contains("0.0967741935"));

    let hit = binsim(&[
        "walk", "hit", "--D", "5", "--lazy-alpha", "0.5", "--trials", "20000",
    ]);
    assert_eq!(code(&hit), 0, "stdout: {}", stdout(&hit));
    assert!(stdout(&hit).contains("PASS"));
    assert!(stdout(&hit).contains("60.000"));

    // Parameter errors are usage errors.
    assert_eq!(code(&binsim(&["walk", "cross", "--r", "1", "--a", "2", "--b", "3", "--trials", "10"])), 2);
    assert_eq!(code(&binsim(&["walk", "hit", "--D", "0", "--lazy-alpha", "0.5", "--trials", "10"])), 2);
}

// ---------------------------------------------------------------------------
// check-cgood
// ---------------------------------------------------------------------------

#[test]
fn check_cgood_distinguishes_good_violated_and_unbounded() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.json");
    let bad = dir.path().join("bad.json");
    let constant = dir.path().join("constant.json");
    write(&good, &format!(r#"{{"kind": "Explicit", "betas": [{}]}}"#, vec!["0.8"; 100].join(",")));
    let mut betas = vec!["0.9"; 50];
    betas.extend(vec!["0.3"; 50]);
    write(&bad, &format!(r#"{{"kind": "Explicit", "betas": [{}]}}"#, betas.join(",")));
    write(&constant, r#"{"kind": "Constant", "beta": 0.8}"#);
    let base = ["--c", "10", "--epsilon", "0.2", "--n", "4"];

    let ok = binsim(&[&["check-cgood", "--schedule", good.to_str().unwrap()], &base[..]].concat());
    assert_eq!(code(&ok), 0, "stderr: {}", stderr(&ok));
    assert!(stdout(&ok).contains("\"verdict\": \"Good\""));

    let violated =
        binsim(&[&["check-cgood", "--schedule", bad.to_str().unwrap()], &base[..]].concat());
    assert_eq!(code(&violated), 1);
    let report: serde_json::Value = serde_json::from_str(&stdout(&violated)).unwrap();
    assert_eq!(report["verdict"]["verdict"], "Violated");
    assert_eq!(report["passed"], false);

    // Unbounded schedules need an explicit window; with one they certify.
    let unbounded =
        binsim(&[&["check-cgood", "--schedule", constant.to_str().unwrap()], &base[..]].concat());
    assert_eq!(code(&unbounded), 2);
    assert!(stderr(&unbounded).contains("--t1 and --t2"));

    let windowed = binsim(
        &[
            &["check-cgood", "--schedule", constant.to_str().unwrap()],
            &base[..],
            &["--t1", "100", "--t2", "300"],
        ]
        .concat(),
    );
    assert_eq!(code(&windowed), 0, "stderr: {}", stderr(&windowed));
    let report: serde_json::Value = serde_json::from_str(&stdout(&windowed)).unwrap();
    assert_eq!(report["window"], serde_json::json!([100, 300]));

    // Half a window is a usage error, as is an empty one.
    let lone = binsim(
        &[&["check-cgood", "--schedule", constant.to_str().unwrap()], &base[..], &["--t1", "5"]]
            .concat(),
    );
    assert_eq!(code(&lone), 2);
    let empty = binsim(
        &[
            &["check-cgood", "--schedule", constant.to_str().unwrap()],
            &base[..],
            &["--t1", "5", "--t2", "5"],
        ]
        .concat(),
    );
    assert_eq!(code(&empty), 2);
}

// ---------------------------------------------------------------------------
// suite
// ---------------------------------------------------------------------------

#[test]
fn suite_prints_criterion_lines_and_reports_failures_via_exit_code() {
    let fast = binsim(&["suite", "level-step-probs"]);
    assert_eq!(code(&fast), 0, "stderr: {}", stderr(&fast));
    let text = stdout(&fast);
    assert!(text.contains("criterion 12/13 level-step-probs"));
    assert!(text.contains("PASS"));
    assert!(text.contains("suite level-step-probs: 1/1 passed"));

    // The drift criterion measures a genuinely positive exact drift at the
    // pinned state, so its suite fails — and must say so via exit code 1.
    let red = binsim(&["suite", "drift"]);
    assert_eq!(code(&red), 1);
    let text = stdout(&red);
    assert!(text.contains("criterion 10/13 drift"));
    assert!(text.contains("FAIL"));

    // --out writes the same results as a JSON report.
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("suite");
    let written = binsim(&[
        "suite",
        "ball-potential-identity",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&written), 0);
    let report: binsim_cli::SuiteReport =
        serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert!(report.passed);
    assert_eq!(report.results.len(), 1);
    assert_eq!(report.results[0].name, "ball-potential-identity");
}

#[test]
fn jobs_flag_does_not_change_simulation_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.json");
    write(&config, CONFIG);
    let c = config.to_str().unwrap();
    let one = dir.path().join("jobs1");
    let two = dir.path().join("jobs2");
    for (out, jobs) in [(&one, "1"), (&two, "2")] {
        let run = binsim(&["simulate", "--config", c, "--jobs", jobs, "--out", out.to_str().unwrap()]);
        assert_eq!(code(&run), 0, "stderr: {}", stderr(&run));
    }
    assert_eq!(
        fs::read(one.join("samples.jsonl")).unwrap(),
        fs::read(two.join("samples.jsonl")).unwrap()
    );
}
