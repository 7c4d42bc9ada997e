//! Shared fixtures for the criterion benches.

use rmab_core::{BlockSchedule, ExperimentConfig, TransitionMatrix};

/// The positively and negatively correlated channels used throughout.
pub fn fixtures() -> [(&'static str, TransitionMatrix); 2] {
    [
        ("positive", TransitionMatrix::new(0.3, 0.7).unwrap()),
        ("negative", TransitionMatrix::new(0.7, 0.3).unwrap()),
    ]
}

/// One replicate's worth of work at a given horizon.
pub fn single_replicate(p: TransitionMatrix, horizon: u64) -> ExperimentConfig {
    let mut config = ExperimentConfig::new(p).unwrap();
    config.schedule = BlockSchedule::k1();
    config.horizon = horizon;
    config.replicates = 1;
    config.checkpoints = vec![horizon];
    config
}
