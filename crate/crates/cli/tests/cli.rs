//! End-to-end runs of the `ymlab` binary in temporary directories.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn ymlab(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ymlab"))
        .arg("--out-dir")
        .arg(out)
        .args(args)
        .env_remove("YMLAB_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn csv_column(path: &Path, column: &str) -> Vec<f64> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let idx = lines.next().unwrap().split(',').position(|h| h == column).unwrap();
    lines.map(|l| l.split(',').nth(idx).unwrap().parse().unwrap()).collect()
}

fn solution(dir: &Path, n: usize) -> PathBuf {
    let o = ymlab(dir, &["--quiet", "stationary", "--n", &n.to_string()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    dir.join(format!("solution_n{n}.json"))
}

#[test]
fn usage_errors_exit_64() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(ymlab(dir.path(), &["stationary", "--n", "0"]).status.code(), Some(64));
    assert_eq!(ymlab(dir.path(), &["stationary", "--n", "1", "--bogus"]).status.code(), Some(64));
    assert_eq!(ymlab(dir.path(), &["stationary"]).status.code(), Some(64));
    assert_eq!(ymlab(dir.path(), &["stationary", "--constant", "0.5"]).status.code(), Some(64));
    assert_eq!(ymlab(dir.path(), &["spectrum", "--solution", "missing.json"]).status.code(), Some(64));
    assert_eq!(ymlab(dir.path(), &["evolve"]).status.code(), Some(64));
    assert_eq!(ymlab(dir.path(), &["--help"]).status.code(), Some(0));
}

#[test]
fn stationary_w1_summary_and_file() {
    let dir = tempfile::tempdir().unwrap();
    let o = ymlab(dir.path(), &["stationary", "--n", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("a = 0.2679491924"), "{text}");
    assert!(text.contains("zeros = 1, limit -1"), "{text}");
    let f = json(&dir.path().join("solution_n1.json"));
    assert_eq!(f["format_version"], "1.0");
    assert_eq!(f["mass_units"], "2m");
    assert_eq!(f["n"], 1);
    assert!((f["a"].as_f64().unwrap() - (2.0 - 3f64.sqrt())).abs() < 1e-8);
    let r = f["r"].as_array().unwrap();
    assert_eq!(r.len(), f["W"].as_array().unwrap().len());
    assert_eq!(r.len(), f["Wp"].as_array().unwrap().len());
    assert!(f["residual_norm"].as_f64().unwrap() <= 1e-6);
}

#[test]
fn stationary_w2_below_w1() {
    let dir = tempfile::tempdir().unwrap();
    let o = ymlab(dir.path(), &["stationary", "--n", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("zeros = 2, limit +1"), "{}", stdout(&o));
    let a2 = json(&dir.path().join("solution_n2.json"))["a"].as_f64().unwrap();
    assert!(a2 > 0.0 && a2 < 2.0 - 3f64.sqrt());
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let names = ["solution_n1.json", "spectrum_solution_n1.json", "spectrum_solution_n1_eigenfunctions.csv", "series_solution_n1.csv"];
    let mut runs = Vec::new();
    for _ in 0..2 {
        let sol = solution(dir.path(), 1);
        let s = sol.to_str().unwrap();
        assert!(ymlab(dir.path(), &["--quiet", "spectrum", "--solution", s, "--eigenfunctions"]).status.success());
        assert!(ymlab(dir.path(), &["--quiet", "evolve", "--solution", s, "--pulse", "gauss:50,5,1e-3", "--t-max", "5"]).status.success());
        runs.push(names.map(|n| std::fs::read(dir.path().join(n)).unwrap()));
    }
    for (i, name) in names.iter().enumerate() {
        assert!(runs[0][i] == runs[1][i], "{name} differs");
    }
}

#[test]
fn spectrum_of_w1_with_cross_check() {
    let dir = tempfile::tempdir().unwrap();
    let sol = solution(dir.path(), 1);
    let o = ymlab(dir.path(), &["spectrum", "--solution", sol.to_str().unwrap(), "--method", "fd", "--cross-check"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("integral of V = -0.70"), "{text}");
    assert!(text.contains("method agreement delta"), "{text}");
    let f = json(&dir.path().join("spectrum_solution_n1.json"));
    assert!(f["integral_V"].as_f64().unwrap() < 0.0);
    assert!(f["counts"]["negative"].as_u64().unwrap() >= 1);
    assert!(f["method_deltas"]["max"].as_f64().unwrap() <= 1e-6);
    assert_eq!(f["counts"]["nodes"][0], 0);
    let mu0 = f["eigenvalues"][0].as_f64().unwrap();
    let l0 = f["growth_rates"][0].as_f64().unwrap();
    assert!((l0 * l0 + mu0).abs() < 1e-15);
}

#[test]
fn spectrum_of_vacuum_is_empty() {
    let dir = tempfile::tempdir().unwrap();
    assert!(ymlab(dir.path(), &["--quiet", "stationary", "--constant", "1"]).status.success());
    let vac = dir.path().join("constant_1.json");
    let o = ymlab(dir.path(), &["spectrum", "--solution", vac.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let f = json(&dir.path().join("spectrum_constant_1.json"));
    assert_eq!(f["counts"]["negative"], 0);
    assert!(f["eigenvalues"].as_array().unwrap().is_empty());
    assert_eq!(f["integral_V"].as_f64(), Some(2.0));
}

#[test]
fn unknown_major_version_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    assert!(ymlab(dir.path(), &["--quiet", "stationary", "--constant", "1"]).status.success());
    let path = dir.path().join("constant_1.json");
    let text = std::fs::read_to_string(&path).unwrap().replace("\"format_version\": \"1.0\"", "\"format_version\": \"2.0\"");
    std::fs::write(&path, text).unwrap();
    let o = ymlab(dir.path(), &["spectrum", "--solution", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(64));
    assert!(String::from_utf8_lossy(&o.stderr).contains("format_version"));
}

#[test]
fn eigenmode_growth_matches_spectrum() {
    let dir = tempfile::tempdir().unwrap();
    let sol = solution(dir.path(), 1);
    assert!(ymlab(dir.path(), &["--quiet", "spectrum", "--solution", sol.to_str().unwrap()]).status.success());
    let spec = dir.path().join("spectrum_solution_n1.json");
    let o = ymlab(
        dir.path(),
        &["evolve", "--solution", sol.to_str().unwrap(), "--spectrum", spec.to_str().unwrap(), "--perturb", "mode0", "--amplitude", "1e-5"],
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let g = json(&dir.path().join("growth_solution_n1.json"));
    assert!(g["relative_discrepancy"].as_f64().unwrap() <= 0.02);
    assert!(g["r_squared"].as_f64().unwrap() >= 0.999);
    assert!(g["fit_window"].as_array().unwrap().len() == 2);
    let dev = csv_column(&dir.path().join("series_solution_n1.csv"), "deviation_norm");
    assert!(dev.last().unwrap() / dev[0] >= 100.0);
}

#[test]
fn vacuum_pulse_stays_bounded() {
    let dir = tempfile::tempdir().unwrap();
    let o = ymlab(dir.path(), &["evolve", "--background", "vacuum", "--pulse", "gauss:0,5,1e-3", "--t-max", "200"]);
    assert_eq!(o.status.code(), Some(0));
    let e = csv_column(&dir.path().join("series_vacuum.csv"), "energy_total");
    assert!(e.iter().all(|v| *v <= 10.0 * e[0]));
    let g = json(&dir.path().join("growth_vacuum.json"));
    assert_eq!(g["fit"]["status"], "no_growth");
    assert!(g["lambda_measured"].is_null());
}

#[test]
fn zero_amplitude_is_a_fixed_point() {
    let dir = tempfile::tempdir().unwrap();
    let sol = solution(dir.path(), 1);
    let o = ymlab(dir.path(), &["evolve", "--solution", sol.to_str().unwrap(), "--amplitude", "0", "--snapshots", "50"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("fixed point"));
    let u = csv_column(&dir.path().join("series_solution_n1.csv"), "max_abs_u");
    assert!(u.iter().all(|v| *v <= 1e-9));
    let snap = csv_column(&dir.path().join("snapshot_solution_n1_t50.csv"), "u");
    assert_eq!(snap.len(), 4096);
}

#[test]
fn verify_filter_selects_envelope_checks() {
    let dir = tempfile::tempdir().unwrap();
    let o = ymlab(dir.path(), &["verify", "--filter", "envelope"]);
    assert_eq!(o.status.code(), Some(0));
    let report: Value = serde_json::from_slice(&o.stdout).unwrap();
    let checks = report["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 3);
    for c in checks {
        assert!(c["name"].as_str().unwrap().contains("envelope"));
        for key in ["anchor", "measured", "bound", "pass"] {
            assert!(c.get(key).is_some(), "missing {key}");
        }
    }
    assert_eq!(json(&dir.path().join("verify.json")), report);
}

#[test]
fn verify_localises_corrupted_file() {
    let dir = tempfile::tempdir().unwrap();
    let sol = solution(dir.path(), 1);
    let mut f = json(&sol);
    let w = f["W"].as_array_mut().unwrap();
    let len = w.len();
    for v in &mut w[len / 3..len / 2] {
        *v = Value::from(1.5);
    }
    let bad = dir.path().join("corrupt.json");
    std::fs::write(&bad, serde_json::to_string(&f).unwrap()).unwrap();
    let o = ymlab(dir.path(), &["verify", "--filter", "file", "--solution", bad.to_str().unwrap(), "--solution", sol.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let report: Value = serde_json::from_slice(&o.stdout).unwrap();
    let failed: Vec<&str> =
        report["checks"].as_array().unwrap().iter().filter(|c| c["pass"] == false).map(|c| c["name"].as_str().unwrap()).collect();
    assert!(!failed.is_empty());
    assert!(failed.iter().all(|n| n.starts_with("file.corrupt.")), "{failed:?}");
    assert!(failed.contains(&"file.corrupt.bounded"));
}

#[test]
fn config_file_is_validated() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"stationary": {"rel_tol": -1.0}}"#).unwrap();
    assert_eq!(ymlab(dir.path(), &["--config", cfg.to_str().unwrap(), "stationary", "--n", "1"]).status.code(), Some(64));
    std::fs::write(&cfg, r#"{"spectra": {}}"#).unwrap();
    assert_eq!(ymlab(dir.path(), &["--config", cfg.to_str().unwrap(), "stationary", "--n", "1"]).status.code(), Some(64));
    std::fs::write(&cfg, r#"{"evolve": {"t_max": 5.0}}"#).unwrap();
    let o = ymlab(dir.path(), &["--config", cfg.to_str().unwrap(), "evolve", "--background", "vacuum"]);
    assert_eq!(o.status.code(), Some(0));
    let t = csv_column(&dir.path().join("series_vacuum.csv"), "t");
    assert!((t.last().unwrap() - 5.0).abs() < 1e-9);
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_ymlab"))
        .args(["--quiet", "stationary", "--constant", "-1"])
        .env("YMLAB_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(dir.path().join("constant_-1.json").exists());
}

#[test]
fn missing_growth_is_an_invariant_violation() {
    let dir = tempfile::tempdir().unwrap();
    let sol = solution(dir.path(), 1);
    let o = ymlab(dir.path(), &["evolve", "--solution", sol.to_str().unwrap(), "--perturb", "mode0", "--t-max", "5"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(dir.path().join("growth_solution_n1.json").exists());
}
