use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn catsim(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_catsim")).current_dir(dir).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn ok(dir: &Path, args: &[&str]) -> Output {
    let out = catsim(dir, args);
    assert_eq!(code(&out), 0, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn json(path: PathBuf) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn csv_rows(path: PathBuf) -> Vec<Vec<f64>> {
    let text = std::fs::read_to_string(path).unwrap();
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap_or(f64::NAN)).collect())
        .collect()
}

#[test]
fn herald_writes_report_and_manifest() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["herald", "--xi", "0.43", "--transmission", "0.99", "--alpha", "1.2", "--out", "r.json"]);
    let report = json(dir.path().join("r.json"));
    assert!((report["fidelity"].as_f64().unwrap() - 0.99).abs() < 0.005);
    assert_eq!(report["state"]["format"], "catsim-state-v1");

    let manifest = json(dir.path().join("r.json.manifest.json"));
    assert_eq!(manifest["command"], "herald");
    assert_eq!(manifest["parameters"]["herald"]["xi"], 0.43);
    assert_eq!(manifest["parameters"]["cutoff"], 60);
    assert_eq!(manifest["outputs"][0], "r.json");
    assert!(manifest["tool_version"].as_str().unwrap().starts_with("catsim "));
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    let zero = catsim(d, &["herald", "--xi", "0", "--transmission", "0.99", "--alpha", "1.2"]);
    assert_eq!(code(&zero), 3);
    assert!(String::from_utf8_lossy(&zero.stderr).contains("zero state"));
    assert_eq!(code(&catsim(d, &["herald", "--xi", "0.4", "--transmission", "1.2", "--alpha", "1.2"])), 2);
    assert_eq!(code(&catsim(d, &["herald", "--xi", "0.4", "--transmission", "1", "--alpha", "1.2"])), 4);
    assert_eq!(code(&catsim(d, &["herald", "--xi", "0.4"])), 2);
    assert_eq!(code(&catsim(d, &["logical", "--herald-a", "3"])), 2);
    assert_eq!(code(&catsim(d, &["fig2", "--xi-min", "1.0", "--xi-max", "0.5"])), 2);
    // squeezing too strong for the cutoff
    assert_eq!(code(&catsim(d, &["herald", "--xi", "2.5", "--transmission", "0.99", "--alpha", "1.2", "--cutoff", "20"])), 3);
    assert_eq!(code(&catsim(d, &["wigner", "--state", "missing.json"])), 2);
    assert!(!d.join("herald.json").exists());
}

#[test]
fn fig2_default_contains_known_optimum() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["fig2"]);
    let rows = csv_rows(dir.path().join("fig2.csv"));
    assert_eq!(rows.len(), 600);
    let hit = rows.iter().any(|r| {
        (r[0] - 1.2).abs() < 1e-12 && (r[1] - 0.43).abs() <= 0.005 && (r[2] - 0.99).abs() <= 0.005
    });
    assert!(hit);
}

#[test]
fn fig3_edge_matches_unsqueezed_limit() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["fig3", "--xi-t-steps", "19", "--alpha-steps", "30"]);
    let rows = csv_rows(dir.path().join("fig3.csv"));
    assert_eq!(rows.len(), 19 * 30);
    let mut edge = 0;
    for r in rows.iter().filter(|r| r[0] == 0.0) {
        let a2 = r[1] * r[1];
        assert!((r[2] - a2 / a2.sinh()).abs() < 1e-14);
        edge += 1;
    }
    assert_eq!(edge, 30);
    let manifest = json(dir.path().join("fig3.csv.manifest.json"));
    assert!(manifest["summary"]["cross_check_max_deviation"].as_f64().unwrap() < 1e-6);
    assert!(manifest["summary"]["cross_check_points"].as_u64().unwrap() > 0);
}

#[test]
fn reruns_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    for args in [
        vec!["selftest"],
        vec!["fig2", "--xi-steps", "40"],
        vec!["fig3", "--xi-t-steps", "31", "--alpha-steps", "21"],
        vec!["noon", "--eta", "1,0.8"],
    ] {
        let mut first = args.clone();
        first.extend(["--out", "a.out"]);
        let mut second = args.clone();
        second.extend(["--out", "b.out"]);
        ok(d, &first);
        ok(d, &second);
        let (a, b) = (std::fs::read(d.join("a.out")).unwrap(), std::fs::read(d.join("b.out")).unwrap());
        assert!(!a.is_empty());
        assert_eq!(a, b, "{args:?}");
    }
}

#[test]
fn logical_codewords_have_gap_four_support() {
    let dir = TempDir::new().unwrap();
    for (n, support) in [("2", [0usize, 4]), ("4", [2, 6])] {
        let out = format!("logical{n}.json");
        ok(dir.path(), &["logical", "--herald-a", n, "--out", &out]);
        let doc = json(dir.path().join(&out));
        let amplitudes = doc["state"]["amplitudes"].as_array().unwrap();
        for (k, z) in amplitudes.iter().enumerate() {
            let mag = z[0].as_f64().unwrap().hypot(z[1].as_f64().unwrap());
            if support.contains(&k) {
                assert!(mag > 1e-3);
            } else {
                assert!(mag < 1e-6);
            }
        }
        assert!(doc["off_support"].as_f64().unwrap() < 1e-12);
        assert!(doc["probability"].as_f64().unwrap() > 0.0);
    }
}

#[test]
fn ecs_report_lists_antisymmetric_coefficients() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["ecs", "--xi", "0.45", "--transmission", "0.9", "--max-n", "8"]);
    let doc = json(dir.path().join("ecs.json"));
    let coefficients = doc["coefficients"].as_array().unwrap();
    assert_eq!(coefficients.len(), 7);
    let c2 = coefficients[0]["upper"][0].as_f64().unwrap();
    let t2 = coefficients[0]["tau_exact"].as_f64().unwrap();
    for c in coefficients {
        let upper = c["upper"][0].as_f64().unwrap();
        assert!((upper + c["lower"][0].as_f64().unwrap()).abs() < 1e-12);
        assert!((upper / c2 - c["tau_exact"].as_f64().unwrap() / t2).abs() < 1e-9);
    }
    assert_eq!(doc["state"]["modes"], 2);
}

#[test]
fn wigner_of_odd_cat_is_negative_at_origin() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    // subtracting one photon from squeezed vacuum leaves an odd state
    ok(d, &["herald", "--xi", "0.43", "--transmission", "0.999", "--alpha", "1.2", "--out", "cat.json"]);
    ok(d, &["wigner", "--state", "cat.json", "--range", "3", "--points", "61", "--out", "w.csv"]);
    let rows = csv_rows(d.join("w.csv"));
    assert_eq!(rows.len(), 61 * 61);
    let origin = rows.iter().find(|r| r[0] == 0.0 && r[1] == 0.0).unwrap();
    assert!((origin[2] + 1.0 / std::f64::consts::PI).abs() < 1e-9);
    let manifest = json(d.join("w.csv.manifest.json"));
    let min = &manifest["summary"]["minimum"];
    assert!(min["value"].as_f64().unwrap() < 0.0);
    assert_eq!(min["x"], 0.0);
    assert_eq!(min["p"], 0.0);
}

#[test]
fn quadrature_of_vacuum_is_normalized() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["quadrature", "--phi", "0"]);
    let rows = csv_rows(dir.path().join("quadrature.csv"));
    assert_eq!(rows.len(), 281);
    let mut integral = 0.0;
    for w in rows.windows(2) {
        integral += 0.5 * (w[1][0] - w[0][0]) * (w[0][1] + w[1][1]);
    }
    assert!((integral - 1.0).abs() < 1e-3);
    let peak = rows.iter().find(|r| r[0] == 0.0).unwrap()[1];
    assert!((peak - std::f64::consts::PI.powf(-0.5)).abs() < 1e-12);
}

#[test]
fn two_mode_state_files_need_a_mode() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    ok(d, &["ecs", "--out", "ecs.json"]);
    assert_eq!(code(&catsim(d, &["quadrature", "--state", "ecs.json"])), 2);
    ok(d, &["quadrature", "--state", "ecs.json", "--mode", "b", "--out", "q.csv"]);
    let manifest = json(d.join("q.csv.manifest.json"));
    assert!((manifest["summary"]["integral"].as_f64().unwrap() - 1.0).abs() < 1e-3);
}

#[test]
fn stdout_output_skips_manifest() {
    let dir = TempDir::new().unwrap();
    let out = ok(dir.path(), &["quadrature", "--points", "5", "--out", "-"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("x,pdf\n"));
    assert_eq!(text.lines().count(), 6);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn selftest_passes() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["selftest"]);
    let text = std::fs::read_to_string(dir.path().join("selftest.csv")).unwrap();
    assert!(text.starts_with("check,deviation,tolerance,passed\n"));
    assert_eq!(text.lines().count(), 11);
    assert!(text.lines().skip(1).all(|l| l.ends_with(",true")));
}
