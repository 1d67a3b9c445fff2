use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn modeiso(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_modeiso")).args(args).output().unwrap()
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

const SMALL_SQUARE: &str = r#"
[mesh]
generator = "rectangle"
nx = 12
ny = 12

[eigs]
count = 8

[isolation]
target = 1

[simulation]
snapshot_stride = 4000
"#;

#[test]
fn negative_tau_is_a_config_error_without_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.toml", &format!("{SMALL_SQUARE}tau = -1e-3\n"));
    let out = dir.path().join("out");
    for cmd in ["mesh", "eigs", "simulate", "pipeline"] {
        let o = modeiso(&[cmd, "--config", &cfg, "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(2), "{cmd}");
        assert!(String::from_utf8_lossy(&o.stderr).contains("simulation.tau"));
        assert!(!out.exists());
    }
}

#[test]
fn unknown_keys_and_missing_files_have_distinct_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "typo.toml", &format!("{SMALL_SQUARE}stop_tolerance = 1e-4\n"));
    assert_eq!(modeiso(&["eigs", "--config", &cfg]).status.code(), Some(2));
    let missing = dir.path().join("nope.toml");
    assert_eq!(modeiso(&["eigs", "--config", missing.to_str().unwrap()]).status.code(), Some(2));
    let cfg = write_config(
        dir.path(),
        "off.toml",
        "[mesh]\ngenerator = \"off\"\npath = \"absent.off\"\n",
    );
    assert_eq!(modeiso(&["mesh", "--config", &cfg]).status.code(), Some(4));
}

#[test]
fn explicit_pair_on_analytic_ball_spectrum() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "ball.toml",
        "[mesh]\ngenerator = \"ball\"\nrefinement = 0\n[eigs]\nsource = \"analytic\"\ncount = 40\n[isolation]\nd = 10.0\ngamma = 15.0\n",
    );
    let out = dir.path().join("o");
    let o = modeiso(&["isolate", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&out.join("isolation.json"));
    assert_eq!(r["status"], "CLUSTERED");
    let excited: Vec<u64> = r["excited"].as_array().unwrap().iter().map(|v| v.as_u64().unwrap()).collect();
    assert_eq!(excited, [1, 2, 3]);
    for v in r["excited_eigenvalues"].as_array().unwrap() {
        assert!((v.as_f64().unwrap().sqrt() - 2.08158).abs() < 1e-5);
    }
}

#[test]
fn outputs_are_reproducible_and_stamped() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "sq.toml", &format!("{SMALL_SQUARE}max_time = 0.5\n"));
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        for cmd in ["eigs", "isolate", "simulate"] {
            let o = modeiso(&[cmd, "--config", &cfg, "--out", out.to_str().unwrap()]);
            assert!(o.status.success(), "{cmd}: {}", String::from_utf8_lossy(&o.stderr));
        }
    }
    for name in ["eigenvalues.csv", "isolation.json", "history.csv", "outcome.json", "final.vtk", "eigenvectors.vtk"] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name}");
    }
    let outcome = json(&a.join("outcome.json"));
    let hash = outcome["config_sha256"].as_str().unwrap().to_string();
    assert_eq!(hash.len(), 64);
    assert_eq!(outcome["status"], "MAX_TIME");
    assert_eq!(json(&a.join("isolation.json"))["config_sha256"], hash.as_str());
    let csv = fs::read_to_string(a.join("eigenvalues.csv")).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with(&format!("# config_sha256={hash} eigs_seed=1")));
    assert_eq!(lines.next().unwrap(), "index,lambda,residual");
    assert_eq!(lines.count(), 8);
    let vtk = fs::read_to_string(a.join("final.vtk")).unwrap();
    assert!(vtk.lines().nth(1).unwrap().contains(&hash));
    assert!(a.join("run_0000.vtk").exists());
}

#[test]
fn seed_flag_overrides_configuration() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "sq.toml",
        "[mesh]\ngenerator = \"rectangle\"\nnx = 6\nny = 6\n[isolation]\nd = 10.0\ngamma = 40.0\n[simulation]\nmax_time = 0.05\n",
    );
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert!(modeiso(&["simulate", "--config", &cfg, "--out", a.to_str().unwrap()]).status.success());
    assert!(modeiso(&["simulate", "--config", &cfg, "--out", b.to_str().unwrap(), "--seed", "7"]).status.success());
    let (ja, jb) = (json(&a.join("outcome.json")), json(&b.join("outcome.json")));
    assert_eq!(jb["simulation_seed"], 7);
    assert_ne!(ja["config_sha256"], jb["config_sha256"]);
    assert_ne!(fs::read(a.join("final.vtk")).unwrap(), fs::read(b.join("final.vtk")).unwrap());
}

#[test]
fn pipeline_reports_threshold_failures() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "sq.toml", &format!("{SMALL_SQUARE}[match]\nthreshold = 1.0\n"));
    let out = dir.path().join("o");
    let o = modeiso(&["pipeline", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(5), "{}", String::from_utf8_lossy(&o.stderr));
    let m = json(&out.join("match.json"));
    assert_eq!(m["passed"], false);
    assert!(m["correlation"].as_f64().unwrap() > 0.9);

    // The stored final pattern can be matched again on its own.
    let o = modeiso(&["match", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(json(&out.join("match.json"))["correlation"], m["correlation"]);
}

#[test]
fn off_mesh_with_expression_deformation() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("tet.off"),
        "OFF\n4 4 0\n0 0 0\n1 0 0\n0 1 0\n0 0 1\n3 0 2 1\n3 0 1 3\n3 0 3 2\n3 1 2 3\n",
    )
    .unwrap();
    let cfg = write_config(
        dir.path(),
        "off.toml",
        "[mesh]\ngenerator = \"off\"\npath = \"tet.off\"\n[mesh.deformation_expr]\nz = \"2 * z\"\n",
    );
    let out = dir.path().join("o");
    let o = modeiso(&["mesh", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(out.join("mesh.vtk")).unwrap();
    assert!(text.contains("\n0 0 2\n"));
}
