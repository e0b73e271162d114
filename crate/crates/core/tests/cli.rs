use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use polyent::io::{density_to_json, pure_to_json, to_json_string};
use polyent::oracle::wootters_concurrence;
use polyent::quantum::{DensityMatrix, PureState};
use polyent::sample::{random_rank2, rng_for};
use serde_json::Value;
use tempfile::TempDir;

fn polyent(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polyent"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &TempDir, name: &str, v: &Value) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, to_json_string(v)).unwrap();
    path
}

fn stdout_json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn roof_of_a_two_qubit_state_matches_wootters() {
    let dir = TempDir::new().unwrap();
    let rho = random_rank2(2, &mut rng_for(21, 0));
    let path = write(&dir, "rho.json", &density_to_json(&rho));
    let v = stdout_json(&polyent(&[
        "--json",
        "roof",
        "--measure",
        "concurrence",
        "--state",
        s(&path),
        "--witness",
    ]));
    let value = v["value"].as_f64().unwrap();
    assert!((value - wootters_concurrence(&rho).unwrap()).abs() < 1e-10);
    assert_eq!(v["method"], "two-root");
    assert!(v["witness"].as_array().is_some_and(|w| !w.is_empty()));
}

#[test]
fn entangle_reports_the_ghz_tangle() {
    let dir = TempDir::new().unwrap();
    let ghz = PureState::from_kets(&[("000", 1.0.into()), ("111", 1.0.into())]).unwrap();
    let path = write(&dir, "ghz.json", &pure_to_json(&ghz));
    let v = stdout_json(&polyent(&[
        "--json",
        "entangle",
        "--measure",
        "tangle",
        "--state",
        s(&path),
    ]));
    assert!((v["value"].as_f64().unwrap() - 1.0).abs() < 1e-14);
}

#[test]
fn classify_prints_the_table() {
    let out = polyent(&["classify", "--samples", "1", "--markdown"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().filter(|l| l.starts_with('|')).count() > 9);
    assert!(text.contains("G4"));
}

#[test]
fn ghzw_scan_writes_csv_rows() {
    let out = polyent(&["ghzw", "--scan", "0:1:101", "--csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with('p'))
        .map(|l| l.split(',').map(|f| f.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 101);
    let n = rows[100][3] / rows[100][2];
    for r in &rows {
        assert!(r[3] <= n * r[2] + 1e-12, "{r:?}");
    }
}

fn error_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).expect("stderr is JSON")
}

#[test]
fn malformed_state_exits_with_parse_error() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{not json").unwrap();
    let out = polyent(&["roots", "--measure", "tangle", "--state", s(&path)]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_of(&out)["error"]["exit_code"], 2);
}

#[test]
fn rank_three_state_exits_with_rank_error() {
    let dir = TempDir::new().unwrap();
    let states: Vec<PureState> = (0..3).map(|i| PureState::basis(2, i).unwrap()).collect();
    let rho =
        DensityMatrix::mixture(&[(0.5, &states[0]), (0.3, &states[1]), (0.2, &states[2])]).unwrap();
    let path = write(&dir, "rho.json", &density_to_json(&rho));
    let out = polyent(&["roof", "--measure", "concurrence", "--state", s(&path)]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(error_of(&out)["error"]["exit_code"], 3);
}

#[test]
fn forcing_the_wrong_closed_form_exits_with_structure_error() {
    let dir = TempDir::new().unwrap();
    let rho = random_rank2(2, &mut rng_for(21, 1));
    let path = write(&dir, "rho.json", &density_to_json(&rho));
    let out = polyent(&[
        "roof",
        "--measure",
        "concurrence",
        "--state",
        s(&path),
        "--method",
        "one-root",
    ]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn oracle_output_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let rho = random_rank2(2, &mut rng_for(21, 2));
    let path = write(&dir, "rho.json", &density_to_json(&rho));
    let run = |threads: &str| {
        polyent(&[
            "--json",
            "--seed",
            "5",
            "--threads",
            threads,
            "oracle",
            "--measure",
            "concurrence",
            "--state",
            s(&path),
            "--restarts",
            "8",
        ])
    };
    let a = run("1");
    let b = run("3");
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}
