use std::fs;
use std::process::{Command, Output};

fn rmab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rmab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

#[test]
fn analyze_prints_the_constants() {
    let out = rmab(&["analyze", "--p01", "0.3", "--p11", "0.7"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!((json["U1"].as_f64().unwrap() - 0.6).abs() < 1e-10);
    assert!((json["U2"].as_f64().unwrap() - 0.4).abs() < 1e-10);
    assert_eq!(json["q"], 1);
    assert_eq!(json["Kq"], 102);
    for key in [
        "C1",
        "C2",
        "alpha",
        "beta",
        "gamma",
        "gamma_prime",
        "Z1",
        "Z2",
        "Z3",
        "Z4",
    ] {
        assert!(!json[key].is_null(), "{key}");
    }
}

#[test]
fn analyze_iid_leaves_bound_null() {
    let out = rmab(&["analyze", "--p01", "0.4", "--p11", "0.4", "-N", "3"]);
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(json["Z1"].is_null());
    assert!(json["bound_error"].as_str().unwrap().contains("i.i.d."));
    assert!((json["U1"].as_f64().unwrap() - 0.4).abs() < 1e-12);
}

#[test]
fn analyze_rejects_small_exploration() {
    let out = rmab(&["analyze", "--p01", "0.3", "--p11", "0.7", "-L", "2"]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("larger than 2"));
}

#[test]
fn simulate_from_config_with_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(
        &cfg,
        r#"{"p01": 0.7, "p11": 0.3, "horizon": 50000, "replicates": 50}"#,
    )
    .unwrap();
    let out_dir = dir.path().join("run");
    let out = rmab(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--horizon",
        "3000",
        "--replicates",
        "5",
        "--schedule",
        "k3",
        "-o",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let csv = fs::read_to_string(out_dir.join("regret.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "n,mean_regret,stderr,g_of_n,normalized_regret,bound"
    );
    assert!(lines.last().unwrap().starts_with("3000,"));
    let diag = fs::read_to_string(out_dir.join("diagnostics.csv")).unwrap();
    assert_eq!(diag.lines().count(), 6);
    assert!(diag.lines().nth(1).unwrap().contains(",pi2,"));
    assert!(out_dir.join("analysis.json").exists());
}

#[test]
fn simulate_reports_bad_config_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"p01": 0.3, "p11": 0.7, "horizon": 10}"#).unwrap();
    let out = rmab(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("horizon"), "{}", stderr(&out));
}

#[test]
fn simulate_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let mut csvs = Vec::new();
    for name in ["a", "b"] {
        let out_dir = dir.path().join(name);
        let out = rmab(&[
            "simulate",
            "--p01",
            "0.3",
            "--p11",
            "0.7",
            "--horizon",
            "5000",
            "--replicates",
            "10",
            "--seed",
            "42",
            "-o",
            out_dir.to_str().unwrap(),
        ]);
        assert!(out.status.success());
        csvs.push(fs::read(out_dir.join("regret.csv")).unwrap());
    }
    assert_eq!(csvs[0], csvs[1]);
}

#[test]
fn verify_bounds_passes_and_reports_json() {
    let out = rmab(&[
        "verify-bounds",
        "--trials",
        "2000",
        "--p01",
        "0.3",
        "--p11",
        "0.7",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["pass"], true);
    assert_eq!(json["concentration"].as_array().unwrap().len(), 45);
    assert_eq!(json["deviation"].as_array().unwrap().len(), 2);
}

#[test]
fn sweep_writes_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = rmab(&[
        "sweep",
        "--channel",
        "0.3:0.7",
        "--channel",
        "0.7:0.3",
        "--with-schedule",
        "k1",
        "--with-schedule",
        "k2",
        "--horizon",
        "2000",
        "--replicates",
        "4",
        "-o",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let summary = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(summary.lines().count(), 5);
    assert_eq!(stdout(&out).lines().count(), 4);
}

#[test]
fn sweep_rejects_malformed_channel() {
    let out = rmab(&["sweep", "--channel", "0.3-0.7"]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("P01:P11"));
}
