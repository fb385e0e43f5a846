//! End-to-end runs of the `ncrindler` binary.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn ncrindler(dir: &Path, config: Option<&str>, args: &[&str]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_ncrindler"));
    if let Some(text) = config {
        let path = dir.join("run.toml");
        std::fs::write(&path, text).unwrap();
        cmd.arg("--config").arg(path);
    }
    cmd.arg("--out").arg(dir.join("out")).args(args).output().unwrap()
}

fn out_files(dir: &Path) -> Vec<String> {
    match std::fs::read_dir(dir.join("out")) {
        Ok(rd) => {
            let mut v: Vec<_> = rd.map(|e| e.unwrap().file_name().to_string_lossy().into_owned()).collect();
            v.sort();
            v
        }
        Err(_) => Vec::new(),
    }
}

fn read_json(dir: &Path, name: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("out").join(name)).unwrap()).unwrap()
}

#[test]
fn malformed_config_exits_2_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = ncrindler(dir.path(), Some("[twist\nkind = "), &["commutator"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out_files(dir.path()).is_empty());
}

#[test]
fn unknown_key_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = ncrindler(dir.path(), Some("[spectrum]\nacceleration = 1.0\n"), &["spectrum"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("acceleration"));
}

#[test]
fn bad_arguments_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(ncrindler(dir.path(), None, &["frobnicate"]).status.code(), Some(2));
    assert_eq!(ncrindler(dir.path(), None, &["verify", "--seed", "x"]).status.code(), Some(2));
}

#[test]
fn degenerate_lie_plane_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = ncrindler(
        dir.path(),
        Some("[twist]\nkind = \"lie\"\nalpha = 1\nbeta = 1\n"),
        &["commutator"],
    );
    assert_eq!(out.status.code(), Some(3));
    assert!(out_files(dir.path()).is_empty());
}

#[test]
fn lie_zeta_inside_plane_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = ncrindler(
        dir.path(),
        Some("[twist]\nkind = \"lie\"\nzeta = [1, 0, 0, 0]\nalpha = 0\nbeta = 1\n"),
        &["commutator"],
    );
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn empty_grid_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = ncrindler(dir.path(), Some("[spectrum]\nomega = []\n"), &["spectrum"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out_files(dir.path()).is_empty());
}

#[test]
fn negative_acceleration_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = ncrindler(dir.path(), Some("[spectrum]\na = -1.0\n"), &["spectrum"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unconverged_quadrature_exits_4_with_partial_results() {
    let dir = tempfile::tempdir().unwrap();
    let out = ncrindler(
        dir.path(),
        Some("[spectrum]\nomega = [1.0]\npanel_tol = 1e-30\nmax_refine = 2\n"),
        &["spectrum"],
    );
    assert_eq!(out.status.code(), Some(4));
    let json = read_json(dir.path(), "spectrum.json");
    assert_eq!(json["converged"], Value::Bool(false));
    let csv = std::fs::read_to_string(dir.path().join("out/spectrum.csv")).unwrap();
    assert!(csv.contains("quadrature_unconverged"), "{csv}");
}

#[test]
fn impossible_quadrature_tolerance_fails_verify_by_name() {
    let dir = tempfile::tempdir().unwrap();
    let out = ncrindler(dir.path(), Some("[tolerances]\nquadrature = 1e-20\n"), &["verify"]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("spectrum.oracle_agreement"), "{stderr}");
    let report = read_json(dir.path(), "verify.json");
    assert_eq!(report["passed"], Value::Bool(false));
    let failures = report["failures"].as_array().unwrap();
    assert!(failures.iter().any(|f| f == "spectrum.oracle_agreement"));
}

#[test]
fn canonical_minkowski_table_is_i_theta() {
    let dir = tempfile::tempdir().unwrap();
    let out = ncrindler(dir.path(), None, &["commutator"]);
    assert_eq!(out.status.code(), Some(0));
    let json = read_json(dir.path(), "commutator.json");
    let text = json.to_string();
    for (mu, nu) in [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)] {
        assert!(text.contains(&format!("i*theta{mu}{nu}")), "missing entry ({mu},{nu}) in {text}");
    }
    assert!(out_files(dir.path()).contains(&"commutator.txt".to_string()));
}

#[test]
fn numeric_theta_gives_numeric_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "[twist]\ntheta01 = 0.5\ntheta02 = 0\ntheta03 = 0\ntheta12 = -2\ntheta13 = \"1/3\"\ntheta23 = 1\n";
    let out = ncrindler(dir.path(), Some(cfg), &["commutator", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("out/commutator.csv")).unwrap();
    assert!(csv.contains("0,1,\"i/2\""), "{csv}");
    assert!(csv.contains("1,2,\"-2*i\""), "{csv}");
    assert!(csv.contains("1,3,\"i/3\""), "{csv}");
}

#[test]
fn lie_rindler_table_carries_rindler_factors() {
    let dir = tempfile::tempdir().unwrap();
    let out = ncrindler(
        dir.path(),
        Some("[twist]\nkind = \"lie\"\nchart = \"rindler\"\nalpha = 2\nbeta = 3\nzeta = [\"zeta0\", \"zeta1\", 0, 0]\n"),
        &["commutator"],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("sinh(a*z0)"), "{text}");
    assert!(text.contains("cosh(a*z0)"), "{text}");
    assert!(text.contains("/(a*z1)") || text.contains("/(z1*a)"), "{text}");
}

#[test]
fn unit_temperature_spectrum_is_planck() {
    let dir = tempfile::tempdir().unwrap();
    let out = ncrindler(
        dir.path(),
        Some("[spectrum]\ntheta01 = 0.0\nomega = [0.5, 1.0, 2.0]\nquadrature = false\n"),
        &["spectrum", "--format", "json"],
    );
    assert_eq!(out.status.code(), Some(0));
    let json = read_json(dir.path(), "spectrum.json");
    let rows = json["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    for row in rows {
        let omega = row["omega"].as_f64().unwrap();
        let power = row["power"].as_f64().unwrap();
        let planck = 1.0 / omega.exp_m1();
        assert!((power - planck).abs() <= 1e-10 * planck, "omega {omega}: {power} vs {planck}");
    }
    assert_eq!(out_files(dir.path()), vec!["spectrum.json".to_string()]);
}

#[test]
fn seeds_change_samples_not_outcomes() {
    let outcomes = |seed: &str| {
        let dir = tempfile::tempdir().unwrap();
        let out = ncrindler(dir.path(), None, &["verify", "--seed", seed]);
        assert_eq!(out.status.code(), Some(0));
        let report = read_json(dir.path(), "verify.json");
        report["suites"]
            .as_array()
            .unwrap()
            .iter()
            .flat_map(|s| {
                let suite = s["name"].as_str().unwrap().to_string();
                s["checks"].as_array().unwrap().iter().map(move |c| {
                    (format!("{suite}.{}", c["name"].as_str().unwrap()), c["passed"].as_bool().unwrap())
                })
            })
            .collect::<Vec<_>>()
    };
    assert_eq!(outcomes("1"), outcomes("2"));
}

#[test]
fn verify_text_format_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = ncrindler(dir.path(), None, &["verify", "--format", "text", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let txt = std::fs::read_to_string(dir.path().join("out/verify.txt")).unwrap();
    assert!(txt.starts_with("seed 7\n"));
    assert!(txt.ends_with("all invariants hold\n"));
    assert!(txt.lines().all(|l| !l.starts_with("FAIL")));
}
