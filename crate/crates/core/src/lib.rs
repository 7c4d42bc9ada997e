//! Channel access over Gilbert-Elliott channels as a restless bandit.
//!
//! Two myopic sensing policies are treated as the arms of a UCB1 learner that
//! plays them in blocks of growing length. The crate also analyzes the Markov
//! chain each policy induces (steady throughput `U`, deviation constant `C`),
//! computes the constants of the regret bound, and estimates regret curves by
//! paired simulation.

pub mod bound;
pub mod chain;
pub mod channel;
pub mod concentration;
pub mod error;
pub mod harness;
pub mod policy;
pub mod schedule;
pub mod ucb;

pub use bound::{bound_constants, regret_bound_at, AnalysisReport, BoundConstants, Thresholds};
pub use chain::{
    deviation_constant, steady_throughput, DeviationMethod, OrderedChainModel, SteadyConstants,
};
pub use channel::{
    replicate_stream, BeliefVector, ChannelBankState, ChannelPath, Correlation, RandomStream,
    TransitionMatrix,
};
pub use concentration::{
    empirical_tail_check, generalized_tail_bounds, hoeffding_tail_bound, DriftBoundParams,
    DriftProcess,
};
pub use error::{Error, Result};
pub use harness::{
    estimate_regret_curve, load_config, run_experiment, ExperimentConfig, RegretCurve,
};
pub use policy::{genie_kind, CircularOrder, MyopicPolicy, PolicyKind};
pub use schedule::{BlockSchedule, GTable};
pub use ucb::{run_algorithm1, Algorithm1Config, MetaPolicyState, RewardSource};
