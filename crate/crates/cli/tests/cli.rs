use serde_json::Value;
use std::fs;
use std::path::Path;
use std::process::Command;

const SMALL: &str = r#"
eps = [0.4, 0.2]
resolution = 160

[profile]
n_uniform = 12
n_q = 41

[graph]
n_uniform = 300
n_geometric = 20
oracle_step_rel = 1e-2

[check]
trajectories = 10
stencils = 500
"#;

fn hj(dir: &Path, stage: &str, config: &str) -> (bool, String) {
    let cfg = dir.join("exp.toml");
    fs::write(&cfg, config).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_hj-averager"))
        .arg(stage)
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .output()
        .unwrap();
    (out.status.success(), String::from_utf8_lossy(&out.stderr).into_owned())
}

fn failure(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("out/failure.json")).unwrap()).unwrap()
}

#[test]
fn schema_errors_are_all_reported() {
    let dir = tempfile::tempdir().unwrap();
    let (ok, _) = hj(
        dir.path(),
        "geometry",
        "lambda = -1\neps = [0.1, 0.2]\ncolour = 3\n[g]\ntheta_factor = 0.5\n",
    );
    assert!(!ok);
    let f = failure(dir.path());
    assert_eq!(f["kind"], "config");
    let paths: Vec<&str> = f["violations"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v["path"].as_str().unwrap())
        .collect();
    for p in ["lambda", "eps", "colour"] {
        assert!(paths.contains(&p), "{paths:?}");
    }
}

#[test]
fn theta_below_the_gradient_bound_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let (ok, stderr) = hj(dir.path(), "geometry", "[g]\ntheta_factor = 0.5\n");
    assert!(!ok);
    assert!(stderr.contains("max |DH|"), "{stderr}");
    assert_eq!(failure(dir.path())["violations"][0]["path"], "g.theta");
}

#[test]
fn solvegraph_names_the_missing_profile() {
    let dir = tempfile::tempdir().unwrap();
    let (ok, stderr) = hj(dir.path(), "solvegraph", SMALL);
    assert!(!ok);
    let f = failure(dir.path());
    assert_eq!(f["kind"], "missing_artifact");
    assert!(f["path"].as_str().unwrap().ends_with("profile_edge0.txt"), "{f}");
    assert!(stderr.contains("profile_edge0.txt"));
}

#[test]
fn pipeline_stages_are_idempotent() {
    let dir = tempfile::tempdir().unwrap();
    for stage in ["geometry", "profile", "solve2d", "solvegraph", "converge", "report"] {
        let (ok, stderr) = hj(dir.path(), stage, SMALL);
        assert!(ok, "{stage}: {stderr}");
    }
    assert!(!dir.path().join("out/failure.json").exists());
    let summary = fs::read(dir.path().join("out/summary.txt")).unwrap();
    let conv = fs::read(dir.path().join("out/convergence.json")).unwrap();
    let field = fs::read(dir.path().join("out/field_1.svg")).unwrap();
    for stage in ["converge", "report"] {
        assert!(hj(dir.path(), stage, SMALL).0);
    }
    assert_eq!(fs::read(dir.path().join("out/summary.txt")).unwrap(), summary);
    assert_eq!(fs::read(dir.path().join("out/convergence.json")).unwrap(), conv);
    assert_eq!(fs::read(dir.path().join("out/field_1.svg")).unwrap(), field);
    let text = String::from_utf8(summary).unwrap();
    assert!(text.contains("convergence"));
    assert!(!text.contains("INCOMPLETE"));
}

#[test]
fn converge_without_solutions_is_a_missing_artifact() {
    let dir = tempfile::tempdir().unwrap();
    assert!(hj(dir.path(), "geometry", SMALL).0);
    let (ok, _) = hj(dir.path(), "converge", SMALL);
    assert!(!ok);
    assert_eq!(failure(dir.path())["kind"], "missing_artifact");
}
