use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{name} = {value} is not a probability in [0, 1]")]
    InvalidProbability { name: &'static str, value: f64 },

    #[error("absorbing chain, stationary law not unique (p01 = 0 and p11 = 1)")]
    AbsorbingChain,

    #[error("belief vector invalid: {0}")]
    InvalidBelief(String),

    #[error("channel count {count} outside supported range {min}..={max}")]
    ChannelCount {
        count: usize,
        min: usize,
        max: usize,
    },

    #[error("horizon shorter than initialization: horizon {horizon} < K_1 + K_2 = {init}")]
    HorizonTooShort { horizon: u64, init: u64 },

    #[error("exploration constant L = {0} must be larger than 2")]
    ExplorationConstant(f64),

    #[error("steady throughput undefined: {0}")]
    SteadyStateUndefined(String),

    #[error("closed-form constants exist only for N = 2 (got N = {0})")]
    ClosedFormChannels(usize),

    #[error("bound undefined for i.i.d. channels (U1 = U2)")]
    BoundUndefinedIid,

    #[error("q unreachable: schedule bounded above by {max_k} < required {required}")]
    QUnreachable { max_k: u64, required: f64 },

    #[error("bound undefined: {0}")]
    DegenerateBound(String),

    #[error("drift constraint violated: {0}")]
    DriftConstraint(String),

    #[error("invalid schedule: {0}")]
    Schedule(String),

    #[error("config field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}
