use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn qons(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qons")).args(args).output().expect("binary runs")
}

fn config_path(name: &str) -> String {
    configs().join(name).to_string_lossy().into_owned()
}

fn write_config(dir: &Path, edit: impl FnOnce(&mut Value)) -> String {
    let text = std::fs::read_to_string(configs().join("default.json")).unwrap();
    let mut v: Value = serde_json::from_str(&text).unwrap();
    edit(&mut v);
    let path = dir.join("config.json");
    std::fs::write(&path, v.to_string()).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn default_config_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let run = qons(&["verify", "--config", &config_path("default.json"), "--out", out]);
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stdout));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["overall_pass"], Value::Bool(true));
    let first = &report["entries"][0];
    for key in ["name", "paper_anchor", "N", "j", "residual", "tolerance", "pass"] {
        assert!(first.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn eighth_root_of_unity_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let cfg = write_config(dir.path(), |v| v["q_half"] = serde_json::json!([h, h]));
    let run = qons(&["verify", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(run.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&run.stderr).contains("root of unity"));
}

#[test]
fn classical_config_runs_classical_checks() {
    let dir = tempfile::tempdir().unwrap();
    let run = qons(&["verify", "--config", &config_path("classical.json"), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(run.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&run.stdout);
    assert!(stdout.contains("dolan_grady") && !stdout.contains("yang_baxter"));
}

#[test]
fn failing_checks_and_caps() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let strict = qons(&["verify", "--config", &config_path("default.json"), "--out", out, "--tol", "1e-20"]);
    assert_eq!(strict.status.code(), Some(1));
    let cfg = write_config(dir.path(), |v| {
        v["N"] = 4.into();
        v["dim_cap"] = 8.into();
    });
    assert_eq!(qons(&["verify", "--config", &cfg, "--out", out]).status.code(), Some(3));
    let missing = qons(&["verify", "--config", "/nonexistent.json"]);
    assert_eq!(missing.status.code(), Some(2));
    let bad_checks = qons(&["verify", "--config", &config_path("default.json"), "--out", out, "--checks", "nope"]);
    assert_eq!(bad_checks.status.code(), Some(2));
}

#[test]
fn same_seed_same_report() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let run = qons(&["verify", "--config", &config_path("default.json"), "--out", d.path().to_str().unwrap(), "--seed", "11"]);
        assert_eq!(run.status.code(), Some(0));
    }
    let read = |d: &tempfile::TempDir| std::fs::read(d.path().join("report.json")).unwrap();
    assert_eq!(read(&a), read(&b));
}

#[test]
fn one_site_generators_export() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), |v| v["N"] = 1.into());
    let run = qons(&["export", "generators", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(run.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("generators.json")).unwrap()).unwrap();
    let map = v.as_object().unwrap();
    assert_eq!(map.len(), 4);
    for m in map.values() {
        assert_eq!(m["dim"], 2);
        assert_eq!(m["degrees"][0]["entries"].as_array().unwrap().len(), 4);
    }
    // W_0 at one site is anti-diagonal.
    let w0 = &map["W_-0"]["degrees"][0]["entries"];
    assert_eq!(w0[0], serde_json::json!([0.0, 0.0]));
    assert_eq!(w0[3], serde_json::json!([0.0, 0.0]));
}

#[test]
fn other_exports() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let cfg = config_path("default.json");
    for what in ["charges", "kmatrix", "polys", "spectrum"] {
        let run = qons(&["export", what, "--config", &cfg, "--out", out]);
        assert_eq!(run.status.code(), Some(0), "{what}");
    }
    let polys: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("polys.json")).unwrap()).unwrap();
    assert_eq!(polys["polys"].as_array().unwrap().len(), 2);
    // P_-1 at two sites is the constant t + 1/t; P_0 has t u^2 + u^-2 / t on top.
    let t = (0.9f64, 0.2f64);
    let norm = t.0 * t.0 + t.1 * t.1;
    let inv = (t.0 / norm, -t.1 / norm);
    let close = |v: &Value, re: f64, im: f64| {
        (v[0].as_f64().unwrap() - re).abs() < 1e-14 && (v[1].as_f64().unwrap() - im).abs() < 1e-14
    };
    let p1 = polys["polys"][1]["terms"].as_array().unwrap();
    assert_eq!(p1.len(), 1);
    assert_eq!(p1[0]["d"], 0);
    assert!(close(&p1[0]["c"], t.0 + inv.0, t.1 + inv.1));
    let p0 = polys["polys"][0]["terms"].as_array().unwrap();
    let term = |d: i64| p0.iter().find(|x| x["d"] == d).unwrap()["c"].clone();
    assert!(close(&term(2), t.0, t.1));
    assert!(close(&term(-2), inv.0, inv.1));
    let k: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("kmatrix.json")).unwrap()).unwrap();
    assert_eq!(k["matrix"]["dim"], 8);
    let run = qons(&["export", "spectrum", "--config", &cfg, "--out", out, "--format", "csv"]);
    assert_eq!(run.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5);
    assert_eq!(qons(&["export", "polys", "--config", &cfg, "--out", out, "--format", "csv"]).status.code(), Some(2));
}

#[test]
fn table_rows() {
    let run = qons(&["table", "--config", &config_path("default.json")]);
    assert_eq!(run.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&run.stdout);
    assert!(stdout.contains("-1.958824e0+3.529412e-2i"), "{stdout}");
    let classical = qons(&["table", "--config", &config_path("classical.json")]);
    assert!(String::from_utf8_lossy(&classical.stdout).contains("rho = +1.600000e1"));
}
