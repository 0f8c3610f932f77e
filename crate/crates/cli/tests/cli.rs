use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pam-magic"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8")
}

/// Parses CSV output into (header, rows).
fn csv(o: &Output) -> (Vec<String>, Vec<Vec<String>>) {
    let text = stdout(o);
    let mut lines = text.lines();
    let header = lines.next().expect("header").split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

fn column(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"))
}

fn value_of(rows: &[Vec<String>], header: &[String], key_col: &str, key: &str) -> f64 {
    let (k, v) = (column(header, key_col), column(header, "value"));
    rows.iter().find(|r| r[k] == key).unwrap_or_else(|| panic!("no row {key}"))[v].parse().unwrap()
}

#[test]
fn s3_bounds() {
    let o = run(&["bounds", "s3"]);
    assert!(o.status.success());
    let (h, rows) = csv(&o);
    assert_eq!(value_of(&rows, &h, "scenario", "C"), 3.0);
    assert!((value_of(&rows, &h, "scenario", "STAB") - (5f64.sqrt() + 2f64.sqrt())).abs() < 1e-8);
    assert!((value_of(&rows, &h, "scenario", "2-STAB") - (1.0 + 2.0 * 2f64.sqrt())).abs() < 1e-8);
    assert!((value_of(&rows, &h, "scenario", "Q") - (1.0 + 2.0 * 2f64.sqrt())).abs() < 1e-8);
}

#[test]
fn tn_bounds_and_tilted_closed_forms() {
    let o = run(&["bounds", "tn", "--n", "4"]);
    let (h, rows) = csv(&o);
    assert_eq!(value_of(&rows, &h, "scenario", "C"), 12.0);
    assert!((value_of(&rows, &h, "scenario", "STAB") - 10.0 * 2f64.sqrt()).abs() < 1e-3);
    assert!((value_of(&rows, &h, "scenario", "Q") - 15.458).abs() < 5e-3);
    assert!(!rows.iter().any(|r| r[0] == "2-STAB"));

    let o = run(&["bounds", "tilted", "--t", "0.25"]);
    let (h, rows) = csv(&o);
    let closed = column(&h, "closed_form");
    for r in rows.iter().filter(|r| !r[closed].is_empty()) {
        let (v, c): (f64, f64) = (r[column(&h, "value")].parse().unwrap(), r[closed].parse().unwrap());
        assert!((v - c).abs() < 1e-8, "{r:?}");
    }
}

#[test]
fn sweep_endpoints() {
    let o = run(&["sweep", "s3w", "--grid", "20"]);
    let (h, rows) = csv(&o);
    assert_eq!(h, ["w", "w_normalized", "value"]);
    assert_eq!(rows.len(), 21);
    let last: f64 = rows.last().unwrap()[2].parse().unwrap();
    assert!((last - 3.719).abs() < 1e-3);

    let o = run(&["sweep", "tnw", "--n", "2", "--grid", "4", "--restarts", "20"]);
    let (_, rows) = csv(&o);
    let last: f64 = rows.last().unwrap()[2].parse().unwrap();
    assert!((last - 2.7886).abs() < 1e-3);

    assert_eq!(run(&["sweep", "tnw", "--n", "6"]).status.code(), Some(2));
}

#[test]
fn t3_table() {
    let o = run(&["table", "t-stab", "--n", "3", "--restarts", "20"]);
    assert!(o.status.success());
    let (h, rows) = csv(&o);
    assert_eq!(rows.len(), 9);
    assert!((value_of(&rows, &h, "s", "8") - 6.3132).abs() < 1e-4);
    assert!((value_of(&rows, &h, "s", "1") - 6.9282).abs() < 1e-4);
    assert_eq!(rows[8][column(&h, "exact")], "true");
}

#[test]
fn fixture_check_passes() {
    let o = run(&["fixture-check", "--format", "json"]);
    assert!(o.status.success());
    let lines: Vec<serde_json::Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 3);
    assert!(lines.iter().all(|l| l["passed"] == true && l["xor_ok"] == true));
}

#[test]
fn gram_classification() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("identity.csv");
    std::fs::write(&path, "# identity\n3,3\n1,0,0\n0,1,0\n0,0,1\n").unwrap();
    let o = run(&["gram", path.to_str().unwrap(), "--format", "json"]);
    assert!(o.status.success());
    for line in stdout(&o).lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["compatible_entrywise"], true);
        assert_eq!(v["subset_match"], true);
    }

    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "2,2\n1,0\n").unwrap();
    assert_eq!(run(&["gram", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["gram", path.to_str().unwrap(), "--d", "4"]).status.code(), Some(2));
}

#[test]
fn selftest_lists_twelve_h_vectors() {
    let o = run(&["selftest-h", "--points", "20000"]);
    assert!(o.status.success());
    let (h, rows) = csv(&o);
    assert_eq!(rows.len(), 12);
    for r in &rows {
        let v: f64 = r[column(&h, "value")].parse().unwrap();
        assert!((v - (1.0 + 2.0 * 2f64.sqrt())).abs() < 1e-8);
    }
}

#[test]
fn qrac_traces() {
    let o = run(&["qrac", "--restarts", "12", "--format", "json"]);
    assert!(o.status.success());
    let lines: Vec<serde_json::Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 12);
    assert_eq!(lines.iter().filter(|l| l["best"] == true).count(), 1);
    let q = 0.5 * (1.0 + 1.0 / 3f64.sqrt());
    for l in &lines {
        let trace: Vec<f64> = l["trace"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
        assert!(trace.windows(2).all(|w| w[1] >= w[0] - 1e-9));
        assert!(l["value"].as_f64().unwrap() <= q + 1e-9);
    }
    assert_eq!(run(&["qrac", "--d", "5"]).status.code(), Some(2));
    assert_eq!(run(&["qrac", "--d", "4"]).status.code(), Some(2));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["bounds", "tn", "--n", "12"]).status.code(), Some(3));
    assert_eq!(run(&["bounds"]).status.code(), Some(2));
    assert_eq!(run(&["bounds", "tilted", "--t", "1.5"]).status.code(), Some(2));
}

#[test]
fn output_is_reproducible_across_thread_counts() {
    let args = ["sweep", "s3w-all", "--grid", "6", "--restarts", "16", "--seed", "5", "--format", "json"];
    let a = bin().args(args).env("RAYON_NUM_THREADS", "1").output().unwrap();
    let b = bin().args(args).env("RAYON_NUM_THREADS", "4").output().unwrap();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bounds.csv");
    let o = run(&["bounds", "s3", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    assert!(std::fs::read_to_string(&path).unwrap().starts_with("scenario,value"));
}
