use std::process::Command;

fn osgm(args: &[&str]) -> (bool, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_osgm")).args(args).output().unwrap();
    (out.status.success(), String::from_utf8_lossy(&out.stdout).into_owned(), String::from_utf8_lossy(&out.stderr).into_owned())
}

#[test]
fn run_with_config_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.json");
    std::fs::write(
        &cfg,
        r#"{"problems": [{"type": "quadratic2d", "kappa": 10}, {"type": "rosenbrock", "n": 2}],
            "algorithms": [{"algorithm": "gd"}, {"algorithm": "osgm-best"}]}"#,
    )
    .unwrap();
    let out = dir.path().join("out");
    let (ok, stdout, stderr) = osgm(&["run", "--config", cfg.to_str().unwrap(), "--budget", "200", "--out", out.to_str().unwrap()]);
    assert!(ok, "{stderr}");
    assert!(stdout.starts_with("algorithm,solved,instances\n"));
    assert_eq!(stdout.lines().count(), 3);
    let stats = std::fs::read_to_string(out.join("stats.csv")).unwrap();
    assert_eq!(stats.lines().count(), 5);
    assert_eq!(std::fs::read_dir(out.join("traces")).unwrap().count(), 8);
}

#[test]
fn algorithm_and_grid_flags_override_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.json");
    std::fs::write(&cfg, r#"{"problems": [{"type": "quadratic2d", "kappa": 4}], "algorithms": [{"algorithm": "gd"}]}"#).unwrap();
    let out = dir.path().join("out");
    let (ok, stdout, stderr) = osgm(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--algorithms",
        "adam,adagrad",
        "--grid",
        r#"[{"lr":0.1},{"lr":1.0}]"#,
        "--seed",
        "3",
        "--tol",
        "1e-6",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(ok, "{stderr}");
    assert!(stdout.contains("adam,") && stdout.contains("adagrad,") && !stdout.contains("gd,"));
    let runs = std::fs::read_to_string(out.join("runs.csv")).unwrap();
    assert_eq!(runs.lines().count(), 5);
}

#[test]
fn unknown_algorithm_is_rejected() {
    let (ok, _, stderr) = osgm(&["run", "--algorithms", "newton"]);
    assert!(!ok);
    assert!(stderr.contains("newton"));
}

#[test]
fn gen_writes_libsvm_files() {
    let dir = tempfile::tempdir().unwrap();
    let (ok, stdout, _) = osgm(&["gen", "--kind", "svm", "--n", "5", "--m", "30", "--kappa", "10", "--out", dir.path().to_str().unwrap()]);
    assert!(ok);
    let path = stdout.trim();
    let text = std::fs::read_to_string(path).unwrap();
    assert_eq!(osgm::harness::parse_libsvm(&text).unwrap().n_samples(), 30);
}

#[test]
fn dynamics_sweep_and_paths() {
    let (ok, stdout, _) = osgm(&["dynamics", "--kappas", "2,10"]);
    assert!(ok);
    assert!(stdout.starts_with(osgm::dynamics::SWEEP_CSV_HEADER));
    assert_eq!(stdout.lines().count(), 5);
    let (ok, stdout, _) = osgm(&["dynamics", "--paths", "--kappas", "10", "--iters", "50"]);
    assert!(ok);
    assert_eq!(stdout.lines().count(), 51);
    // 17 significant digits
    let field = stdout.lines().nth(1).unwrap().split(',').nth(1).unwrap();
    assert_eq!(field.split('e').next().unwrap().replace(['.', '-'], "").len(), 17);
}

#[test]
fn check_runs_selected_criteria() {
    let (ok, stdout, _) = osgm(&["check", "--only", "2,3,14"]);
    assert!(ok, "{stdout}");
    assert_eq!(stdout.lines().filter(|l| l.starts_with("[PASS]")).count(), 3);
}

#[test]
fn spike_reports_a_scenario_and_writes_traces() {
    let dir = tempfile::tempdir().unwrap();
    let (ok, stdout, stderr) = osgm(&["spike", "--kappa", "1e4", "--target", "60", "--out", dir.path().to_str().unwrap()]);
    assert!(ok, "{stderr}");
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert!(v["onset"].as_u64().unwrap() > 0);
    assert!(v["max_ratio"].as_str().unwrap().parse::<f64>().unwrap() > 1.0);
    assert!(v["monotone_max_ratio"].as_str().unwrap().parse::<f64>().unwrap() <= 1.0);
    assert!(dir.path().join("spike_monotone.csv").exists());
}
