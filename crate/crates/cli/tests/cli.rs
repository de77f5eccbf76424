use std::path::Path;
use std::process::{Command, Output};

use segsift::eval::evaluate;
use segsift::filter::FilterParams;
use segsift::seq::read_pairs;

fn segsift(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_segsift"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("spawn segsift")
}

fn ok(dir: &Path, args: &[&str]) -> Output {
    let out = segsift(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn gen(dir: &Path, name: &str, seed: &str) {
    ok(
        dir,
        &["generate", "--pairs", "100", "--read-len", "400", "--edit-rate", "0.02", "-E", "8", "--seed", seed, "-o", name],
    );
}

#[test]
fn generate_is_reproducible() {
    let d = tempfile::tempdir().unwrap();
    gen(d.path(), "a.txt", "11");
    gen(d.path(), "b.txt", "11");
    gen(d.path(), "c.txt", "12");
    let read = |n: &str| std::fs::read(d.path().join(n)).unwrap();
    assert_eq!(read("a.txt"), read("b.txt"));
    assert_ne!(read("a.txt"), read("c.txt"));
}

#[test]
fn filter_writes_one_row_per_pair() {
    let d = tempfile::tempdir().unwrap();
    gen(d.path(), "p.txt", "1");
    let out = ok(d.path(), &["filter", "--pairs", "p.txt", "-T", "8", "-E", "8"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "id,accept,matches,n_segments");
    assert_eq!(lines.len(), 101);
}

#[test]
fn pad_smaller_than_threshold_is_a_data_error() {
    let d = tempfile::tempdir().unwrap();
    gen(d.path(), "p.txt", "1");
    let out = segsift(d.path(), &["filter", "--pairs", "p.txt", "-T", "8", "-E", "9"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("pad 8"));
}

#[test]
fn pipeline_matches_in_process_evaluation() {
    let d = tempfile::tempdir().unwrap();
    gen(d.path(), "p.txt", "5");
    let before = std::fs::read(d.path().join("p.txt")).unwrap();
    ok(d.path(), &["filter", "--pairs", "p.txt", "-T", "8", "-E", "8", "-o", "v.csv"]);
    ok(d.path(), &["oracle", "--pairs", "p.txt", "-E", "8", "-o", "l.csv"]);
    ok(d.path(), &["evaluate", "--verdicts", "v.csv", "--labels", "l.csv", "-o", "m.json"]);
    assert_eq!(std::fs::read(d.path().join("p.txt")).unwrap(), before);

    let m: serde_json::Value = serde_json::from_slice(&std::fs::read(d.path().join("m.json")).unwrap()).unwrap();
    let pairs = read_pairs(d.path().join("p.txt")).unwrap();
    let want = evaluate(&pairs, &FilterParams::new(8, 8)).unwrap();
    assert_eq!(m["tp"], want.tp);
    assert_eq!(m["fp"], want.fp);
    assert_eq!(m["tn"], want.tn);
    assert_eq!(m["fn"], want.fn_);
    assert_eq!(want.fn_, 0);
}

#[test]
fn evaluate_rejects_mismatched_ids() {
    let d = tempfile::tempdir().unwrap();
    gen(d.path(), "p.txt", "2");
    ok(d.path(), &["filter", "--pairs", "p.txt", "-T", "8", "-E", "8", "-o", "v.csv"]);
    ok(d.path(), &["oracle", "--pairs", "p.txt", "-E", "8", "-o", "l.csv"]);
    let labels = std::fs::read_to_string(d.path().join("l.csv")).unwrap();
    let trimmed: Vec<&str> = labels.lines().take(50).collect();
    std::fs::write(d.path().join("l.csv"), trimmed.join("\n") + "\n").unwrap();
    let out = segsift(d.path(), &["evaluate", "--verdicts", "v.csv", "--labels", "l.csv"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_one() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(segsift(d.path(), &["filter", "--nope"]).status.code(), Some(1));
    assert_eq!(segsift(d.path(), &["frobnicate"]).status.code(), Some(1));
    gen(d.path(), "p.txt", "1");
    let out = segsift(d.path(), &["filter", "--pairs", "p.txt", "-T", "0", "-E", "4"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(segsift(d.path(), &["--help"]).status.success());
}

#[test]
fn unknown_config_key_is_rejected() {
    let d = tempfile::tempdir().unwrap();
    gen(d.path(), "p.txt", "1");
    std::fs::write(d.path().join("c.json"), r#"{"version":1,"filter":{"segment_len":8,"threshold":4,"bogus":1}}"#).unwrap();
    let out = segsift(d.path(), &["--config", "c.json", "filter", "--pairs", "p.txt"]);
    assert_eq!(out.status.code(), Some(1));
    std::fs::write(d.path().join("c.json"), r#"{"version":2}"#).unwrap();
    let out = segsift(d.path(), &["--config", "c.json", "filter", "--pairs", "p.txt", "-E", "4"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn simulate_agrees_and_writes_trace() {
    let d = tempfile::tempdir().unwrap();
    gen(d.path(), "p.txt", "4");
    ok(
        d.path(),
        &["--threads", "1", "simulate", "--pairs", "p.txt", "-T", "8", "-E", "8", "--timing", "cmos", "--trace", "t.csv", "-o", "s.json"],
    );
    let s: serde_json::Value = serde_json::from_slice(&std::fs::read(d.path().join("s.json")).unwrap()).unwrap();
    assert_eq!(s["jobs_dispatched"], s["jobs_expected"]);
    assert_eq!(s["verdicts"].as_object().unwrap().len(), 100);
    let trace = std::fs::read_to_string(d.path().join("t.csv")).unwrap();
    assert!(trace.lines().count() > 100);
}

#[test]
fn sweep_writes_json_report() {
    let d = tempfile::tempdir().unwrap();
    gen(d.path(), "p.txt", "6");
    ok(
        d.path(),
        &["sweep", "--pairs", "p.txt", "--t-list", "4,8", "--e-list", "4,8", "--format", "json", "--dataset", "toy", "-o", "r.json"],
    );
    let rows = segsift::eval::read_report_json(&d.path().join("r.json")).unwrap();
    assert!(rows.iter().all(|r| r.dataset == "toy"));
    let fns: f64 = rows.iter().filter(|r| r.metric == "fn").map(|r| r.value).sum();
    assert_eq!(fns, 0.0);
    assert_eq!(rows.iter().filter(|r| r.metric == "tp").count(), 4);
}

#[test]
fn config_file_supplies_defaults() {
    let d = tempfile::tempdir().unwrap();
    gen(d.path(), "p.txt", "3");
    std::fs::write(
        d.path().join("c.json"),
        r#"{"version":1,"filter":{"segment_len":8,"threshold":8,"mode":"hw"},"hw":{"timing":{"tile_xor":6}}}"#,
    )
    .unwrap();
    let from_cfg = ok(d.path(), &["--config", "c.json", "filter", "--pairs", "p.txt"]).stdout;
    let from_flags = ok(d.path(), &["filter", "--pairs", "p.txt", "-T", "8", "-E", "8", "--mode", "hw"]).stdout;
    assert_eq!(from_cfg, from_flags);
    ok(d.path(), &["--config", "c.json", "simulate", "--pairs", "p.txt", "-o", "s.json"]);
}
