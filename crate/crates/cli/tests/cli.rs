use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

use cryptoherm::linalg::c;
use cryptoherm::{biorthogonal_decompose, propagate_pair, ExpPolyDyson, Matrix, TaylorHamiltonian, TimeGrid, Vector};
use cryptoherm_cli::output::read_table;

struct Run {
    dir: tempfile::TempDir,
}

impl Run {
    fn new() -> Self {
        Self {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn out(&self) -> PathBuf {
        self.dir.path().join("out")
    }

    fn exec(&self, config: &str, extra: &[&str]) -> Output {
        let path = self.dir.path().join("config.json");
        fs::write(&path, config).unwrap();
        Command::new(env!("CARGO_BIN_EXE_cryptoherm"))
            .arg("--config")
            .arg(&path)
            .arg("--out")
            .arg(self.out())
            .args(extra)
            .output()
            .unwrap()
    }

    fn json(&self, name: &str) -> Value {
        serde_json::from_str(&fs::read_to_string(self.out().join(name)).unwrap()).unwrap()
    }
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const NON_HERMITIAN: &str = "[[[1,0],[1,0]],[[4,0],[1,0]]]";

#[test]
fn decompose_round_trips_full_precision() {
    let run = Run::new();
    let o = run.exec(
        &format!(r#"{{"command": "decompose", "model": {{"matrix": {NON_HERMITIAN}}}}}"#),
        &["--quiet"],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
    let doc = run.json("decompose.json");
    let m = Matrix::from_fn(2, 2, |i, j| c([[1.0, 1.0], [4.0, 1.0]][i][j], 0.0));
    let sys = biorthogonal_decompose(&m, 1e-10).unwrap();
    for (j, z) in sys.eigenvalues().iter().enumerate() {
        let re = doc["eigenvalues"][j][0].as_f64().unwrap();
        let im = doc["eigenvalues"][j][1].as_f64().unwrap();
        assert!((re - z.re).abs() <= 1e-15 && (im - z.im).abs() <= 1e-15);
    }
    assert_eq!(doc["right_vectors"].as_array().unwrap().len(), 2);
}

#[test]
fn trajectory_table_round_trips_full_precision() {
    let run = Run::new();
    let config = r#"{
        "command": "evolve",
        "model": {"taylor": [[[[1,0],[0,0]],[[0,0],[-1,0]]], [[[0,0],[3,0]],[[0,0],[0,0]]]]},
        "dyson": {"kind": "exp_poly", "generator": [[[0,0],[1.5,0]],[[0,0],[0,0]]], "theta": [0, 1]},
        "grid": {"t_start": 0, "t_end": 1, "n_samples": 6},
        "step": 0.01,
        "phi0": [[0.6,0],[0,0.8]]
    }"#;
    let o = run.exec(config, &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let (header, rows) = read_table(&fs::read_to_string(run.out().join("trajectory.csv")).unwrap(), ',').unwrap();
    assert_eq!(header.first().map(String::as_str), Some("t"));
    assert_eq!(header.last().map(String::as_str), Some("drift"));
    assert_eq!(header.len(), 1 + 4 + 4 + 2 + 1);
    assert_eq!(rows.len(), 6);

    let h = TaylorHamiltonian::new(vec![
        Matrix::from_fn(2, 2, |i, j| c(if i == j { 1.0 - 2.0 * i as f64 } else { 0.0 }, 0.0)),
        Matrix::from_fn(2, 2, |i, j| c(if (i, j) == (0, 1) { 3.0 } else { 0.0 }, 0.0)),
    ])
    .unwrap();
    let g = Matrix::from_fn(2, 2, |i, j| c(if (i, j) == (0, 1) { 1.5 } else { 0.0 }, 0.0));
    let fam = ExpPolyDyson::new(g, vec![0.0, 1.0]).unwrap();
    let phi0 = Vector::from_vec(vec![c(0.6, 0.0), c(0.0, 0.8)]);
    let traj = propagate_pair(&h, &fam, &phi0, None, &TimeGrid::uniform(0.0, 1.0, 6).unwrap(), 0.01).unwrap();
    for (k, row) in rows.iter().enumerate() {
        assert!((row[0] - traj.times[k]).abs() <= 1e-15);
        for j in 0..2 {
            assert!((row[1 + 2 * j] - traj.phi[k][j].re).abs() <= 1e-15);
            assert!((row[2 + 2 * j] - traj.phi[k][j].im).abs() <= 1e-15);
            assert!((row[5 + 2 * j] - traj.psi[k][j].re).abs() <= 1e-15);
            assert!((row[6 + 2 * j] - traj.psi[k][j].im).abs() <= 1e-15);
        }
        assert!((row[9] - traj.overlap[k].re).abs() <= 1e-15);
    }
    let summary = run.json("evolve.json");
    assert_eq!(summary["picture"], "covariant");
    assert_eq!(summary["derivative_source"], "exact");
}

#[test]
fn qs_check_on_hermitian_pair_is_compatible() {
    let run = Run::new();
    let config = r#"{"command": "qs-check",
        "model": {"taylor": [[[[2,0],[0,1]],[[0,-1],[-1,0]]], [[[0,0],[1,0]],[[1,0],[0,0]]]]}}"#;
    let o = run.exec(config, &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let cert = run.json("certificate.json");
    assert_eq!(cert["status"], "compatible");
    assert_eq!(cert["kappa"], serde_json::json!([1.0, 1.0]));
}

#[test]
fn zero_step_is_a_config_error() {
    let run = Run::new();
    let config = r#"{"command": "evolve", "model": {"scenario": "falsification"}, "step": 0}"#;
    let o = run.exec(config, &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("step: must be > 0"), "{}", stderr(&o));
    assert!(!run.out().exists());
}

#[test]
fn unknown_key_and_missing_file_are_config_errors() {
    let run = Run::new();
    let o = run.exec(r#"{"command": "demo", "colour": "red"}"#, &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 1"));

    let o = Command::new(env!("CARGO_BIN_EXE_cryptoherm"))
        .args(["--config", "/nonexistent/config.json"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn numerical_failure_names_the_error() {
    let run = Run::new();
    let o = run.exec(
        r#"{"command": "decompose", "model": {"matrix": [[[1,0],[1,0]],[[0,0],[1,0]]]}}"#,
        &[],
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(
        stderr(&o).lines().any(|l| l.starts_with("DefectiveMatrix: ")),
        "{}",
        stderr(&o)
    );
}

#[test]
fn seed_flag_overrides_config() {
    let config = r#"{"command": "demo", "model": {"scenario": "random-covariant"}, "seed": 1}"#;
    let read = |extra: &[&str]| {
        let run = Run::new();
        assert!(run.exec(config, extra).status.success());
        fs::read(run.out().join("trajectory_covariant.csv")).unwrap()
    };
    let from_config = read(&[]);
    assert_eq!(from_config, read(&["--seed", "1"]));
    assert_ne!(from_config, read(&["--seed", "2"]));
}

#[test]
fn output_dir_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let from_config = dir.path().join("configured");
    let config = dir.path().join("c.json");
    fs::write(
        &config,
        format!(
            r#"{{"command": "demo", "output": {{"dir": {:?}, "format": "tsv"}}}}"#,
            from_config.to_str().unwrap()
        ),
    )
    .unwrap();
    let run = |extra: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_cryptoherm"))
            .arg("--config")
            .arg(&config)
            .arg("--quiet")
            .args(extra)
            .current_dir(dir.path())
            .status()
            .unwrap()
    };
    assert!(run(&[]).success());
    assert!(from_config.join("trajectory_naive.tsv").exists());

    let flag = dir.path().join("flag");
    assert!(run(&["--out", flag.to_str().unwrap()]).success());
    assert!(flag.join("summary.json").exists());
    assert!(!Path::new(&dir.path().join("out")).exists());
}

#[test]
fn demo_summary_shows_the_gap() {
    let run = Run::new();
    let o = run.exec(r#"{"command": "demo"}"#, &[]);
    assert!(o.status.success());
    let s = run.json("summary.json");
    let (cov, naive) = (
        s["covariant_drift"].as_f64().unwrap(),
        s["naive_drift"].as_f64().unwrap(),
    );
    assert!(cov <= 1e-8 && naive >= 1e-3);
    assert!(String::from_utf8_lossy(&o.stdout).contains("naive max norm drift"));
}

#[test]
fn qs_scan_writes_flat_statistics() {
    let run = Run::new();
    let o = run.exec(
        r#"{"command": "qs-scan", "scan": {"sampler": "shared", "trials": 5, "dim": 3}, "seed": 4}"#,
        &[],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let s = run.json("scan.json");
    assert_eq!(s["pair_compatible"], 5);
    assert!(s.as_object().unwrap().values().all(|v| !v.is_object() && !v.is_array()));
}

#[test]
fn metric_and_hermitize_commands() {
    let run = Run::new();
    let base = format!(r#""model": {{"matrix": {NON_HERMITIAN}}}, "kappa": [1.0, 2.0]"#);
    assert!(run
        .exec(&format!(r#"{{"command": "metric", {base}}}"#), &[])
        .status
        .success());
    let m = run.json("metric.json");
    assert!(m["quasi_hermiticity_residual"].as_f64().unwrap() <= 1e-12);

    let gauge = r#""gauge": [[[0,0],[1,0]],[[1,0],[0,0]]]"#;
    assert!(run
        .exec(&format!(r#"{{"command": "hermitize", {base}, {gauge}}}"#), &[])
        .status
        .success());
    let h = run.json("hermitize.json");
    let spec: Vec<f64> = h["spectrum"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    assert!((spec[0] + 1.0).abs() <= 1e-12 && (spec[1] - 3.0).abs() <= 1e-12);
}

#[test]
fn crosscheck_and_naive_commands() {
    let run = Run::new();
    for cmd in ["crosscheck", "naive-evolve"] {
        let o = run.exec(
            &format!(r#"{{"command": "{cmd}", "model": {{"scenario": "random-covariant"}}, "seed": 3}}"#),
            &[],
        );
        assert!(o.status.success(), "{cmd}: {}", stderr(&o));
    }
    assert!(run.json("crosscheck.json")["pair_vs_lower"].as_f64().unwrap() <= 1e-7);
    assert!(run.out().join("trajectory_naive.csv").exists());
}
