use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn ringergo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ringergo"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = ringergo(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let header = lines
        .next()
        .unwrap()
        .split(',')
        .map(str::to_string)
        .collect();
    (
        header,
        lines
            .map(|l| l.split(',').map(str::to_string).collect())
            .collect(),
    )
}

fn column(header: &[String], name: &str) -> usize {
    header
        .iter()
        .position(|h| h == name)
        .unwrap_or_else(|| panic!("no column {name}"))
}

#[test]
fn distribution_endpoint_value() {
    let (h, rows) = csv_rows(&stdout(&[
        "distribution",
        "--L",
        "11",
        "--l1",
        "1",
        "--l2",
        "2",
        "--J",
        "1",
        "--Delta",
        "0",
    ]));
    assert_eq!(rows.len(), 11);
    let le: f64 = rows[10][column(&h, "le")].parse().unwrap();
    assert!((le - 1.827_881_521_211_735).abs() < 1e-12, "{le}");
    assert_eq!(rows[10][column(&h, "S")], "11");
}

#[test]
fn single_current_rows_are_equal() {
    let (h, rows) = csv_rows(&stdout(&["distribution", "--ell", "2", "--Delta", "-0.7"]));
    let le = column(&h, "le");
    assert!(rows.iter().all(|r| r[le] == rows[0][le]));
}

#[test]
fn x_optimal_tags_follow_the_field() {
    let (h, rows) = csv_rows(&stdout(&["distribution", "--Delta=-0.6"]));
    let (gs, tag) = (column(&h, "gS"), column(&h, "optimal"));
    for r in &rows {
        let g: f64 = r[gs].parse().unwrap();
        assert_eq!(r[tag] == "x_optimal", 0.6 > g, "{r:?}");
    }
}

#[test]
fn bell_profile_at_time_zero() {
    let (h, rows) = csv_rows(&stdout(&[
        "dynamics", "--bell", "1,11", "--Delta", "-0.5", "--t-max", "0.1", "--dt", "0.1",
    ]));
    let (t, s, le) = (column(&h, "t"), column(&h, "S"), column(&h, "le"));
    for r in rows.iter().filter(|r| r[t] == "0") {
        let want = if r[s] == "1" || r[s] == "11" {
            4.0
        } else {
            1.0
        };
        assert!(
            (r[le].parse::<f64>().unwrap() - want).abs() < 1e-12,
            "{r:?}"
        );
    }
}

#[test]
fn superposition_drift_vanishes_at_shift_times() {
    let doc: Value = serde_json::from_str(&stdout(&[
        "dynamics",
        "--Delta",
        "-0.5",
        "--t-max",
        "4",
        "--dt",
        "0.5",
        "--include-shifts",
        "--format",
        "json",
    ]))
    .unwrap();
    let rows = doc["rows"].as_array().unwrap();
    let shifts: Vec<&Value> = rows
        .iter()
        .filter(|r| r["drift_kind"].as_str().unwrap().starts_with("shift"))
        .collect();
    assert!(shifts.len() > 11);
    assert!(shifts.iter().all(|r| r["drift"].as_f64().unwrap() < 1e-8));
    assert_eq!(doc["report"]["applicable"], Value::Bool(true));
}

#[test]
fn sweep_endpoint_equals_single_current_sum() {
    let (h, rows) = csv_rows(&stdout(&["sweep", "--delta-grid", "-1:0:5"]));
    assert_eq!(rows.len(), 5);
    let last = &rows[4];
    assert_eq!(last[column(&h, "Delta")], "0");
    let max: f64 = last[column(&h, "max_le")].parse().unwrap();
    let sum: f64 = last[column(&h, "single_sum")].parse().unwrap();
    assert!((max - sum).abs() < 1e-12);
}

#[test]
fn antiferromagnetic_exchange_at_zero_field() {
    for ell in ["1", "2"] {
        let (h, rows) = csv_rows(&stdout(&[
            "sweep", "--J", "-1", "--Delta", "0", "--ell", ell,
        ]));
        assert_eq!(rows[0][column(&h, "max_le")], "0");
    }
    // the superposition keeps a small current-carried LE away from S = L
    let (h, rows) = csv_rows(&stdout(&["distribution", "--J", "-1", "--Delta", "0"]));
    assert_eq!(rows[10][column(&h, "le")], "0");
    let (h2, sweep) = csv_rows(&stdout(&["sweep", "--J", "-1", "--Delta", "0"]));
    let max: f64 = sweep[0][column(&h2, "max_le")].parse().unwrap();
    let (h3, brute) = csv_rows(&stdout(&[
        "compare", "--J", "-1", "--Delta", "0", "--S", "4",
    ]));
    let oracle: f64 = brute[0][column(&h3, "le_brute")].parse().unwrap();
    assert!(
        max > 0.03 && (max - oracle).abs() < 1e-9,
        "{max} vs {oracle}"
    );
}

#[test]
fn power_law_flag_matches_nearest_neighbour_limit() {
    let a = stdout(&[
        "distribution",
        "--alpha",
        "inf",
        "--J",
        "1.5",
        "--Delta",
        "-0.3",
    ]);
    let b = stdout(&["distribution", "--J", "1.5", "--Delta", "-0.3"]);
    assert_eq!(a, b);
}

#[test]
fn csv_and_json_carry_the_same_numbers() {
    let args = [
        "distribution",
        "--alpha",
        "3",
        "--Delta",
        "-1.1",
        "--l1",
        "1",
        "--l2",
        "3",
        "--phi21",
        "0.4",
    ];
    let (h, rows) = csv_rows(&stdout(&args));
    let mut json_args = args.to_vec();
    json_args.extend(["--format", "json"]);
    let doc: Value = serde_json::from_str(&stdout(&json_args)).unwrap();
    let jrows = doc["rows"].as_array().unwrap();
    assert_eq!(jrows.len(), rows.len());
    for (r, j) in rows.iter().zip(jrows) {
        for (name, text) in h.iter().zip(r) {
            match &j[name] {
                Value::Number(n) => {
                    assert_eq!(text.parse::<f64>().unwrap(), n.as_f64().unwrap(), "{name}")
                }
                Value::String(s) => assert_eq!(text, s),
                other => panic!("unexpected {other}"),
            }
        }
    }
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let p = path.to_str().unwrap();
        stdout(&[
            "sweep",
            "--delta-grid=-2:0:21",
            "--j-grid",
            "0.5:1.5:3",
            "--format",
            "json",
            "--out",
            p,
        ]);
        fs::read(&path).unwrap()
    };
    assert_eq!(run("a.json"), run("b.json"));
}

#[test]
fn config_file_sits_between_defaults_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(
        &cfg,
        r#"{"L": 9, "Delta": -0.4, "state": {"kind": "current", "ell": 1}, "format": "json"}"#,
    )
    .unwrap();
    let c = cfg.to_str().unwrap();
    let doc: Value = serde_json::from_str(&stdout(&["distribution", "--config", c])).unwrap();
    assert_eq!(doc["rows"].as_array().unwrap().len(), 9);
    assert_eq!(doc["config"]["Delta"].as_f64(), Some(-0.4));
    let doc: Value =
        serde_json::from_str(&stdout(&["distribution", "--config", c, "--Delta", "0.2"])).unwrap();
    assert_eq!(doc["config"]["Delta"].as_f64(), Some(0.2));
    assert_eq!(doc["config"]["state"]["kind"], "current");
}

#[test]
fn amplitude_file_is_normalized() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("amps.txt");
    fs::write(&path, "2 0\n0 0\n0 0\n0 0\n0 0\n").unwrap();
    let out = ringergo(&["distribution", "--amplitudes", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("normalized"));
    let (h, rows) = csv_rows(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[0][column(&h, "population")], "1");
}

fn code(args: &[&str]) -> i32 {
    ringergo(args).status.code().unwrap()
}

#[test]
fn exit_codes() {
    assert_eq!(code(&["--help"]), 0);
    assert_eq!(code(&["distribution", "--L", "2"]), 1);
    assert_eq!(code(&["distribution", "--ell", "1", "--bell", "1,2"]), 1);
    assert_eq!(code(&["distribution", "--l1", "1"]), 1);
    assert_eq!(code(&["sweep", "--delta-grid", "0:1:0"]), 1);
    assert_eq!(code(&["distribution", "--frobnicate"]), 1);
    assert_eq!(
        code(&["distribution", "--config", "/nonexistent/run.json"]),
        1
    );
    assert_eq!(code(&["compare", "--L", "15"]), 3);
    assert_eq!(code(&["verify", "--states", "2", "--max-sites", "15"]), 3);
}

#[test]
fn compare_agrees_with_oracle() {
    let (h, rows) = csv_rows(&stdout(&[
        "compare", "--L", "6", "--Delta", "-0.8", "--alpha", "3",
    ]));
    assert_eq!(rows.len(), 6);
    let d = column(&h, "diff");
    assert!(rows
        .iter()
        .all(|r| r[d].parse::<f64>().unwrap().abs() < 1e-6));
}

#[test]
fn small_verify_run_passes_and_is_deterministic() {
    let args = [
        "verify",
        "--states",
        "4",
        "--max-sites",
        "6",
        "--seed",
        "7",
        "--format",
        "json",
    ];
    let a = stdout(&args);
    assert_eq!(a, stdout(&args));
    let doc: Value = serde_json::from_str(&a).unwrap();
    assert!(doc["rows"]
        .as_array()
        .unwrap()
        .iter()
        .all(|r| r["passed"] == "true"));
}

#[test]
fn writes_to_out_path() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.csv");
    stdout(&["distribution", "--L", "5", "--out", path.to_str().unwrap()]);
    assert!(Path::new(&path).exists());
    assert_eq!(fs::read_to_string(&path).unwrap().lines().count(), 6);
}

#[test]
fn sweep_locates_convexity_sign_change() {
    let (h, rows) = csv_rows(&stdout(&["sweep", "--delta-grid=-1.5:-1:51", "--S", "11"]));
    let (d, c) = (column(&h, "Delta"), column(&h, "convexity_S"));
    let vals: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| (r[d].parse().unwrap(), r[c].parse().unwrap()))
        .collect();
    let flips: Vec<f64> = vals
        .windows(2)
        .filter(|w| w[0].1 * w[1].1 < 0.0)
        .map(|w| 0.5 * (w[0].0 + w[1].0))
        .collect();
    assert_eq!(flips.len(), 1, "{vals:?}");
    assert!((flips[0].abs() - 1.257).abs() <= 0.01, "{flips:?}");
}

#[test]
fn long_range_ring_oscillates_faster() {
    let period = |alpha: &str| {
        let doc: Value = serde_json::from_str(&stdout(&[
            "dynamics", "--alpha", alpha, "--J", "1", "--t-max", "30", "--dt", "0.02", "--S", "1",
            "--format", "json",
        ]))
        .unwrap();
        doc["report"]["period_S"].as_f64().unwrap()
    };
    assert!(period("3") < period("inf"));
}
