//! End-to-end tests of the `uavsec` binary: exit codes, file outputs, and
//! byte-level determinism.

use std::path::Path;
use std::process::{Command, Output};

fn uavsec(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_uavsec"))
        .args(args)
        .env("UAVSEC_OUT_DIR", dir)
        .output()
        .expect("binary runs")
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

#[test]
fn run_emits_csv_with_exact_header() {
    let dir = tempfile::tempdir().unwrap();
    let out = uavsec(
        &["run", "--reps", "2", "--seed", "3", "--stage2", "AS", "--no-timestamp"],
        dir.path(),
    );
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let csv = read(&dir.path().join("results.csv"));
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "sweep_value,scheme,metric,mean,std,n");
    // One scheme pair, three metrics.
    assert_eq!(lines.count(), 3);
    assert!(csv.contains("PMA+AS"));
    assert!(csv.contains("default"));
}

#[test]
fn reruns_are_byte_identical_without_timestamp() {
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    let args =
        ["run", "--reps", "3", "--seed", "11", "--stage2", "OCFA,AS", "--no-timestamp"];
    assert!(uavsec(&args, dir_a.path()).status.success());
    assert!(uavsec(&args, dir_b.path()).status.success());
    assert_eq!(
        read(&dir_a.path().join("results.csv")),
        read(&dir_b.path().join("results.csv"))
    );
}

#[test]
fn timestamp_line_is_present_by_default_and_only_differs_there() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["run", "--reps", "2", "--seed", "5", "--stage2", "AS"];
    assert!(uavsec(&args, dir.path()).status.success());
    let first = read(&dir.path().join("results.csv"));
    assert!(first.starts_with("# generated_unix_s "));
    assert!(uavsec(&args, dir.path()).status.success());
    let second = read(&dir.path().join("results.csv"));
    let body = |text: &str| text.lines().skip(1).collect::<Vec<_>>().join("\n");
    assert_eq!(body(&first), body(&second));
}

#[test]
fn infeasible_quota_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = uavsec(&["run", "--quota", "0", "--reps", "1"], dir.path());
    assert_eq!(out.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("infeasible"), "stderr: {stderr}");
}

#[test]
fn unknown_config_key_exits_2_naming_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("bad.json");
    std::fs::write(&config_path, r#"{"bandwidth_khz": 100}"#).unwrap();
    let out = uavsec(&["run", "--config", config_path.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bandwidth_khz"));
}

#[test]
fn bad_unit_string_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = uavsec(&["run", "--p0", "tenDBM", "--reps", "1"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_with_quota_schedule_emits_rows_per_point() {
    let dir = tempfile::tempdir().unwrap();
    let out = uavsec(
        &[
            "sweep",
            "--axis",
            "M",
            "--values",
            "2,3",
            "--quota-schedule",
            "6,4",
            "--reps",
            "2",
            "--seed",
            "2",
            "--stage2",
            "AS",
            "--no-timestamp",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let csv = read(&dir.path().join("sweep_M.csv"));
    // 2 points x 1 scheme x 3 metrics data rows.
    assert_eq!(csv.lines().count(), 1 + 6);
    assert!(csv.lines().any(|l| l.starts_with("2,")));
    assert!(csv.lines().any(|l| l.starts_with("3,")));
}

#[test]
fn ablation_writes_four_tagged_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = uavsec(
        &["ablation", "--reps", "3", "--seed", "9", "--no-timestamp"],
        dir.path(),
    );
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let mean_of = |tag: char| -> f64 {
        let csv = read(&dir.path().join(format!("ablation_{tag}.csv")));
        let row = csv.lines().find(|l| l.contains("total_utility")).unwrap();
        row.split(',').nth(3).unwrap().parse().unwrap()
    };
    let (a, b, c, d) = (mean_of('a'), mean_of('b'), mean_of('c'), mean_of('d'));
    // Both stages on should not lose to neither stage on, even at 3 trials.
    assert!(d >= a, "quadrant d {d} below quadrant a {a}");
    assert!(c >= a && b >= a, "cooperative/matched quadrants below baseline");
}

#[test]
fn dump_trials_writes_one_json_record_per_trial() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("trials.jsonl");
    let out = uavsec(
        &[
            "run",
            "--reps",
            "2",
            "--seed",
            "4",
            "--stage2",
            "AS",
            "--dump-trials",
            dump.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let text = read(&dump);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    for line in lines {
        let record: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(record["ut_positions"].as_array().unwrap().len(), 12);
        assert_eq!(record["results"][0]["matching"].as_array().unwrap().len(), 12);
        assert!(record["results"][0]["structure"].is_array());
        assert!(record["results"][0]["total_utility"].is_object()
            || record["results"][0]["total_utility"].is_number());
    }
}

#[test]
fn verify_passes_on_a_healthy_build() {
    let dir = tempfile::tempdir().unwrap();
    let out = uavsec(
        &["verify", "--seed", "7", "--instances", "8", "--weights", "300"],
        dir.path(),
    );
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "stdout: {stdout}");
    assert_eq!(stdout.matches("[PASS]").count(), 3, "stdout: {stdout}");
}
