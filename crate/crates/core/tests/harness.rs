use std::fs;

use rmab_core::harness::{
    default_checkpoints, trace_replicate, ANALYSIS_JSON, REGRET_CSV, REGRET_HEADER,
};
use rmab_core::{
    estimate_regret_curve, load_config, run_experiment, BlockSchedule, Error, ExperimentConfig,
    PolicyKind, TransitionMatrix,
};

fn config(p01: f64, p11: f64, horizon: u64, replicates: u64) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(TransitionMatrix::new(p01, p11).unwrap()).unwrap();
    c.horizon = horizon;
    c.replicates = replicates;
    c.checkpoints = default_checkpoints(&c.schedule, horizon);
    c
}

#[test]
fn genie_examples() {
    let genie = |a, b| rmab_core::genie_kind(&TransitionMatrix::new(a, b).unwrap());
    assert_eq!(genie(0.3, 0.7), PolicyKind::Pi1);
    assert_eq!(genie(0.7, 0.3), PolicyKind::Pi2);
    assert_eq!(genie(0.5, 0.5), PolicyKind::Pi1);
}

#[test]
fn always_free_channels_have_no_regret() {
    let c = config(1.0, 1.0, 5_000, 8);
    let result = estimate_regret_curve(&c).unwrap();
    for cp in &result.curve.checkpoints {
        assert_eq!((cp.mean_regret, cp.stderr), (0.0, 0.0));
        assert_eq!(cp.bound, None);
    }
}

#[test]
fn iid_channels_show_no_regret_growth() {
    let c = config(0.4, 0.4, 50_000, 100);
    let result = estimate_regret_curve(&c).unwrap();
    assert!(matches!(result.bound, Err(Error::BoundUndefinedIid)));
    for cp in &result.curve.checkpoints {
        assert!(
            cp.mean_regret.abs() <= 3.0 * cp.stderr + 1e-9,
            "n = {}: {} +- {}",
            cp.n,
            cp.mean_regret,
            cp.stderr
        );
        assert_eq!(cp.bound, None);
    }
    assert!(result
        .curve
        .to_csv()
        .lines()
        .skip(1)
        .all(|l| l.ends_with(",undefined")));
}

#[test]
fn genie_and_learner_see_the_same_path() {
    for (p01, p11, n) in [(0.3, 0.7, 2), (0.7, 0.3, 3), (0.2, 0.9, 4)] {
        let mut c = config(p01, p11, 3_000, 1);
        c.channels = n;
        c.initial_belief = rmab_core::BeliefVector::stationary(&c.p, n).unwrap();
        for r in 0..4 {
            let trace = trace_replicate(&c, r).unwrap();
            assert_eq!(trace.genie.len(), 3_000);
            assert_eq!(trace.learner.len(), trace.run.rewards.len());
            let mut shared = 0;
            for slot in 0..3_000 {
                let (gc, gy) = trace.genie[slot];
                let (lc, ly) = trace.learner[slot];
                assert_eq!(gy, trace.path.state(slot, gc));
                assert_eq!(ly, trace.path.state(slot, lc));
                if gc == lc {
                    assert_eq!(gy, ly);
                    shared += 1;
                }
            }
            assert!(shared > 0);
        }
    }
}

/// Normalized regret under negative correlation matches the positive case
/// with the arms swapped.
#[test]
fn negative_correlation_mirrors_positive() {
    let pos = estimate_regret_curve(&config(0.3, 0.7, 30_000, 200)).unwrap();
    let neg = estimate_regret_curve(&config(0.7, 0.3, 30_000, 200)).unwrap();
    assert_eq!(pos.diagnostics.genie_arm, PolicyKind::Pi1);
    assert_eq!(neg.diagnostics.genie_arm, PolicyKind::Pi2);
    for (a, b) in pos.curve.checkpoints.iter().zip(&neg.curve.checkpoints) {
        assert_eq!(a.n, b.n);
        let se = (a.stderr.powi(2) + b.stderr.powi(2)).sqrt();
        assert!(
            (a.mean_regret - b.mean_regret).abs() <= 4.0 * se,
            "n = {}: {} vs {} (se {se})",
            a.n,
            a.mean_regret,
            b.mean_regret
        );
    }
    let share = |r: &rmab_core::harness::ExperimentResult, arm| r.diagnostics.slot_share(arm);
    assert!((share(&pos, PolicyKind::Pi2) - share(&neg, PolicyKind::Pi1)).abs() < 0.02);
}

/// Regression values from the pilot run at the default settings.
#[test]
fn positive_correlation_pilot_regression() {
    let result = estimate_regret_curve(&config(0.3, 0.7, 100_000, 200)).unwrap();
    let last = result.curve.last();
    let per_slot = last.mean_regret / last.n as f64;
    let share = result.diagnostics.slot_share(PolicyKind::Pi2);
    println!("R/n = {per_slot:.4}, pi2 slot share = {share:.4}");
    assert!(per_slot < 0.05, "R/n = {per_slot}");
    assert!(share < 0.25, "pi2 share = {share}");
    for d in &result.diagnostics.replicates {
        assert!(d.inferior_blocks <= d.total_blocks);
        assert_eq!(d.pi1_slots + d.pi2_slots, 100_000);
    }
}

#[test]
fn inferior_share_falls_with_horizon() {
    let mut shares = Vec::new();
    for horizon in [10_000u64, 100_000, 1_000_000] {
        let result = estimate_regret_curve(&config(0.3, 0.7, horizon, 40)).unwrap();
        shares.push(result.diagnostics.slot_share(PolicyKind::Pi2));
    }
    println!("pi2 slot share at 1e4, 1e5, 1e6: {shares:?}");
    assert!(shares.windows(2).all(|w| w[1] < w[0]), "{shares:?}");
}

#[test]
fn files_and_schema() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("run.json");
    let out = dir.path().join("out");
    fs::write(
        &cfg_path,
        format!(
            r#"{{"p01": 0.3, "p11": 0.7, "horizon": 3000, "replicates": 6,
                "schedule": "k2", "output": {:?}}}"#,
            out.to_str().unwrap()
        ),
    )
    .unwrap();
    let c = load_config(&cfg_path).unwrap();
    assert_eq!(c.schedule, BlockSchedule::k2());
    let (_, files) = run_experiment(&c).unwrap();
    let csv = fs::read_to_string(&files.regret_csv).unwrap();
    assert_eq!(csv.lines().next().unwrap(), REGRET_HEADER);
    assert_eq!(csv.lines().count(), c.checkpoints.len() + 1);
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join(ANALYSIS_JSON)).unwrap()).unwrap();
    for key in [
        "U1",
        "U2",
        "C1",
        "C2",
        "q",
        "Kq",
        "alpha",
        "beta",
        "gamma",
        "gamma_prime",
        "Z1",
        "Z2",
        "Z3",
        "Z4",
    ] {
        assert!(json.get(key).is_some_and(|v| !v.is_null()), "missing {key}");
    }
    assert!(out.join(REGRET_CSV).exists());
}

#[test]
fn load_config_reports_io_and_parse_errors() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.json");
    let err = load_config(&missing).unwrap_err();
    assert!(err.to_string().contains("nope.json"), "{err}");
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"p01": 0.3, "p11": 0.7, "horizonn": 5}"#).unwrap();
    let err = load_config(&bad).unwrap_err();
    assert!(err.to_string().contains("horizonn"), "{err}");
}

#[test]
fn seeds_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = config(0.3, 0.7, 4_000, 16);
    let mut outputs = Vec::new();
    for (name, seed) in [("a", 1), ("b", 1), ("c", 2)] {
        c.seed = seed;
        c.output = dir.path().join(name);
        let (_, files) = run_experiment(&c).unwrap();
        outputs.push((
            fs::read(&files.regret_csv).unwrap(),
            fs::read(&files.diagnostics_csv).unwrap(),
        ));
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_ne!(outputs[0].0, outputs[2].0);
}
