//! Regret experiments.
//!
//! Each replicate draws one channel path and runs both the genie (the myopic
//! policy matching the correlation sign, from slot 1) and the block-UCB
//! learner on it. Channel dynamics ignore the sensing actions, so the paired
//! difference is an unbiased regret sample with much less variance than two
//! independent runs. Replicates run in parallel; aggregation is an ordered
//! fold so results depend only on the master seed.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bound::{AnalysisReport, BoundConstants};
use crate::chain::{MAX_CHANNELS, MIN_CHANNELS};
use crate::channel::{
    replicate_stream, sample_initial, BeliefVector, ChannelPath, TransitionMatrix,
};
use crate::error::{Error, Result};
use crate::policy::{genie_kind, MyopicPolicy, PolicyKind};
use crate::schedule::{BlockSchedule, GTable};
use crate::ucb::{run_algorithm1, Algorithm1Config, Algorithm1Run, RewardSource};

pub const DEFAULT_SEED: u64 = 20_100_817;
pub const DEFAULT_HORIZON: u64 = 100_000;
pub const DEFAULT_REPLICATES: u64 = 200;
pub const DEFAULT_EXPLORATION: f64 = 3.0;
pub const DEFAULT_CHANNELS: usize = 2;
pub const CHECKPOINT_GROWTH: f64 = 1.5;

pub const REGRET_CSV: &str = "regret.csv";
pub const DIAGNOSTICS_CSV: &str = "diagnostics.csv";
pub const ANALYSIS_JSON: &str = "analysis.json";
pub const REGRET_HEADER: &str = "n,mean_regret,stderr,g_of_n,normalized_regret,bound";
pub const DIAGNOSTICS_HEADER: &str =
    "replicate,genie_arm,inferior_blocks,total_blocks,pi1_slots,pi2_slots";

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum ScheduleField {
    Named(String),
    Explicit(BlockSchedule),
}

/// On-disk config. Everything except `p01` and `p11` is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub p01: Option<f64>,
    pub p11: Option<f64>,
    #[serde(alias = "N")]
    pub channels: Option<usize>,
    #[serde(alias = "L")]
    pub exploration: Option<f64>,
    schedule: Option<ScheduleField>,
    pub horizon: Option<u64>,
    pub replicates: Option<u64>,
    pub seed: Option<u64>,
    pub initial_belief: Option<Vec<f64>>,
    pub checkpoints: Option<Vec<u64>>,
    pub output: Option<PathBuf>,
}

impl RawConfig {
    pub fn set_schedule(&mut self, schedule: BlockSchedule) {
        self.schedule = Some(ScheduleField::Explicit(schedule));
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub p: TransitionMatrix,
    pub channels: usize,
    pub exploration: f64,
    pub schedule: BlockSchedule,
    pub horizon: u64,
    pub replicates: u64,
    pub seed: u64,
    pub initial_belief: BeliefVector,
    pub checkpoints: Vec<u64>,
    pub output: PathBuf,
}

/// Geometric grid from `K_1 + K_2` by factors of 1.5, plus the half horizon
/// and the horizon itself.
pub fn default_checkpoints(schedule: &BlockSchedule, horizon: u64) -> Vec<u64> {
    let start = schedule.k(1) + schedule.k(2);
    let mut points = Vec::new();
    let mut n = start as f64;
    while (n.ceil() as u64) < horizon {
        points.push(n.ceil() as u64);
        n *= CHECKPOINT_GROWTH;
    }
    points.push(horizon.div_ceil(2).max(start));
    points.push(horizon);
    points.sort_unstable();
    points.dedup();
    points
}

impl ExperimentConfig {
    /// Minimal config with every documented default.
    pub fn new(p: TransitionMatrix) -> Result<Self> {
        Self::from_raw(RawConfig {
            p01: Some(p.p01()),
            p11: Some(p.p11()),
            ..RawConfig::default()
        })
    }

    pub fn from_raw(raw: RawConfig) -> Result<Self> {
        let p01 = raw.p01.ok_or_else(|| Error::config("p01", "missing"))?;
        let p11 = raw.p11.ok_or_else(|| Error::config("p11", "missing"))?;
        let p = TransitionMatrix::new(p01, p11).map_err(|e| match e {
            Error::InvalidProbability { name, value } => {
                Error::config(name, format!("{value} is not a probability in [0, 1]"))
            }
            other => other,
        })?;

        let channels = raw.channels.unwrap_or(DEFAULT_CHANNELS);
        if !(MIN_CHANNELS..=MAX_CHANNELS).contains(&channels) {
            return Err(Error::config(
                "channels",
                format!("{channels} outside {MIN_CHANNELS}..={MAX_CHANNELS}"),
            ));
        }

        let exploration = raw.exploration.unwrap_or(DEFAULT_EXPLORATION);
        if exploration.is_nan() || exploration <= 2.0 {
            return Err(Error::config(
                "exploration",
                format!("L = {exploration}: the UCB exploration constant must be larger than 2"),
            ));
        }

        let schedule = match raw.schedule {
            None => BlockSchedule::default(),
            Some(ScheduleField::Named(name)) => name
                .parse()
                .map_err(|e: Error| Error::config("schedule", e.to_string()))?,
            Some(ScheduleField::Explicit(s)) => {
                s.validate()
                    .map_err(|e| Error::config("schedule", e.to_string()))?;
                s
            }
        };

        let horizon = raw.horizon.unwrap_or(DEFAULT_HORIZON);
        let init = schedule.k(1) + schedule.k(2);
        if horizon < init {
            return Err(Error::config(
                "horizon",
                format!("horizon shorter than initialization: {horizon} < K_1 + K_2 = {init}"),
            ));
        }

        let replicates = raw.replicates.unwrap_or(DEFAULT_REPLICATES);
        if replicates == 0 {
            return Err(Error::config("replicates", "need at least one replicate"));
        }

        let initial_belief = match raw.initial_belief {
            Some(w) => {
                if w.len() != channels {
                    return Err(Error::config(
                        "initial_belief",
                        format!("{} entries for {channels} channels", w.len()),
                    ));
                }
                BeliefVector::new(w).map_err(|e| Error::config("initial_belief", e.to_string()))?
            }
            None => BeliefVector::stationary(&p, channels)
                .map_err(|e| Error::config("initial_belief", format!("required here: {e}")))?,
        };

        let checkpoints = match raw.checkpoints {
            Some(mut c) => {
                c.sort_unstable();
                c.dedup();
                if c.is_empty() || c[0] == 0 || *c.last().unwrap() > horizon {
                    return Err(Error::config(
                        "checkpoints",
                        "need non-empty values in 1..=horizon",
                    ));
                }
                c
            }
            None => default_checkpoints(&schedule, horizon),
        };

        Ok(Self {
            p,
            channels,
            exploration,
            schedule,
            horizon,
            replicates,
            seed: raw.seed.unwrap_or(DEFAULT_SEED),
            initial_belief,
            checkpoints,
            output: raw.output.unwrap_or_else(|| PathBuf::from("out")),
        })
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let raw: RawConfig = serde_json::from_str(text).map_err(|e| Error::Parse {
            path: PathBuf::from("<inline>"),
            source: e,
        })?;
        Self::from_raw(raw)
    }

    pub fn algorithm1(&self) -> Algorithm1Config {
        Algorithm1Config {
            schedule: self.schedule.clone(),
            exploration: self.exploration,
            horizon: self.horizon,
        }
    }
}

pub fn read_raw_config(path: &Path) -> Result<RawConfig> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| Error::Parse {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    ExperimentConfig::from_raw(read_raw_config(path)?)
}

// ---------------------------------------------------------------------------
// Paired simulation
// ---------------------------------------------------------------------------

/// Feeds both policy arms from one channel path. Each automaton keeps its
/// own position and time between blocks.
pub struct PathRewardSource<'a> {
    path: &'a ChannelPath,
    policies: [MyopicPolicy; 2],
    slot: usize,
    log: Option<Vec<(usize, u8)>>,
}

impl<'a> PathRewardSource<'a> {
    pub fn new(path: &'a ChannelPath, belief: &BeliefVector) -> Self {
        let n = path.channels();
        Self {
            path,
            policies: [
                MyopicPolicy::from_belief(PolicyKind::Pi1, Some(belief), n),
                MyopicPolicy::from_belief(PolicyKind::Pi2, Some(belief), n),
            ],
            slot: 0,
            log: None,
        }
    }

    pub fn with_log(mut self) -> Self {
        self.log = Some(Vec::new());
        self
    }

    pub fn take_log(&mut self) -> Vec<(usize, u8)> {
        self.log.take().unwrap_or_default()
    }
}

impl RewardSource for PathRewardSource<'_> {
    fn play(&mut self, arm: PolicyKind) -> u8 {
        let policy = &mut self.policies[arm.index()];
        let channel = policy.current();
        let y = self.path.state(self.slot, channel);
        policy.observe(y);
        if let Some(log) = self.log.as_mut() {
            log.push((channel, y));
        }
        self.slot += 1;
        y
    }
}

/// The genie's sensed `(channel, reward)` for the first `slots` slots.
pub fn run_genie(
    path: &ChannelPath,
    belief: &BeliefVector,
    kind: PolicyKind,
    slots: usize,
) -> Vec<(usize, u8)> {
    let mut policy = MyopicPolicy::from_belief(kind, Some(belief), path.channels());
    (0..slots)
        .map(|slot| {
            let channel = policy.current();
            let y = path.state(slot, channel);
            policy.observe(y);
            (channel, y)
        })
        .collect()
}

/// Everything one replicate produced, for inspection in tests.
pub struct ReplicateTrace {
    pub path: ChannelPath,
    pub genie: Vec<(usize, u8)>,
    pub learner: Vec<(usize, u8)>,
    pub run: Algorithm1Run,
}

pub fn trace_replicate(config: &ExperimentConfig, index: u64) -> Result<ReplicateTrace> {
    let algo = config.algorithm1();
    algo.validate()?;
    let mut rng = replicate_stream(config.seed, index);
    let initial = sample_initial(&config.initial_belief, &mut rng);
    let path = ChannelPath::sample(&config.p, &initial, algo.max_slots() as usize, &mut rng);
    let genie = run_genie(
        &path,
        &config.initial_belief,
        genie_kind(&config.p),
        config.horizon as usize,
    );
    let mut source = PathRewardSource::new(&path, &config.initial_belief).with_log();
    let run = run_algorithm1(&algo, &mut source)?;
    let learner = source.take_log();
    Ok(ReplicateTrace {
        path,
        genie,
        learner,
        run,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateOutcome {
    pub regret: Vec<i64>,
    pub inferior_share: Vec<f64>,
    pub diagnostics: ReplicateDiagnostics,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplicateDiagnostics {
    pub replicate: u64,
    pub genie_arm: PolicyKind,
    /// `T(n)`: blocks the learner gave to the non-genie arm.
    pub inferior_blocks: u64,
    pub total_blocks: u64,
    pub pi1_slots: u64,
    pub pi2_slots: u64,
}

pub fn simulate_replicate(config: &ExperimentConfig, index: u64) -> Result<ReplicateOutcome> {
    let algo = config.algorithm1();
    let mut rng = replicate_stream(config.seed, index);
    let initial = sample_initial(&config.initial_belief, &mut rng);
    let path = ChannelPath::sample(&config.p, &initial, algo.max_slots() as usize, &mut rng);
    let genie = genie_kind(&config.p);
    let horizon = config.horizon as usize;

    let genie_rewards = run_genie(&path, &config.initial_belief, genie, horizon);
    let mut source = PathRewardSource::new(&path, &config.initial_belief);
    let run = run_algorithm1(&algo, &mut source)?;

    let mut regret = Vec::with_capacity(config.checkpoints.len());
    let mut checkpoints = config.checkpoints.iter().peekable();
    let mut diff = 0i64;
    for (slot, (&(_, genie_y), &learner_y)) in genie_rewards
        .iter()
        .zip(&run.rewards)
        .take(horizon)
        .enumerate()
    {
        diff += i64::from(genie_y) - i64::from(learner_y);
        while checkpoints.peek() == Some(&&((slot + 1) as u64)) {
            regret.push(diff);
            checkpoints.next();
        }
    }

    let inferior = genie.other();
    let inferior_share = config
        .checkpoints
        .iter()
        .map(|&n| run.slots_on(inferior, n) as f64 / n as f64)
        .collect();

    let diagnostics = ReplicateDiagnostics {
        replicate: index,
        genie_arm: genie,
        inferior_blocks: run.blocks.iter().filter(|b| b.arm == inferior).count() as u64,
        total_blocks: run.blocks.len() as u64,
        pi1_slots: run.slots_on(PolicyKind::Pi1, config.horizon),
        pi2_slots: run.slots_on(PolicyKind::Pi2, config.horizon),
    };
    Ok(ReplicateOutcome {
        regret,
        inferior_share,
        diagnostics,
    })
}

// ---------------------------------------------------------------------------
// Aggregation
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Checkpoint {
    pub n: u64,
    pub mean_regret: f64,
    pub stderr: f64,
    pub g_of_n: u64,
    pub normalized_regret: f64,
    /// `None` where the bound is undefined.
    pub bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegretCurve {
    pub checkpoints: Vec<Checkpoint>,
}

impl RegretCurve {
    pub fn at(&self, n: u64) -> Option<&Checkpoint> {
        self.checkpoints.iter().find(|c| c.n == n)
    }

    pub fn last(&self) -> &Checkpoint {
        self.checkpoints.last().expect("curve has checkpoints")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(REGRET_HEADER);
        out.push('\n');
        for c in &self.checkpoints {
            let bound = c
                .bound
                .map_or_else(|| "undefined".to_string(), |b| b.to_string());
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                c.n, c.mean_regret, c.stderr, c.g_of_n, c.normalized_regret, bound
            );
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunDiagnostics {
    pub genie_arm: PolicyKind,
    pub replicates: Vec<ReplicateDiagnostics>,
    /// Mean fraction of slots on the non-genie arm, per checkpoint.
    pub inferior_share: Vec<f64>,
}

impl RunDiagnostics {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(DIAGNOSTICS_HEADER);
        out.push('\n');
        for r in &self.replicates {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                r.replicate,
                r.genie_arm,
                r.inferior_blocks,
                r.total_blocks,
                r.pi1_slots,
                r.pi2_slots
            );
        }
        out
    }

    /// Mean share of slots each arm received within the horizon.
    pub fn slot_share(&self, arm: PolicyKind) -> f64 {
        let (on, total) = self.replicates.iter().fold((0u64, 0u64), |acc, r| {
            let on = match arm {
                PolicyKind::Pi1 => r.pi1_slots,
                PolicyKind::Pi2 => r.pi2_slots,
            };
            (acc.0 + on, acc.1 + r.pi1_slots + r.pi2_slots)
        });
        on as f64 / total as f64
    }
}

#[derive(Debug)]
pub struct ExperimentResult {
    pub curve: RegretCurve,
    pub diagnostics: RunDiagnostics,
    pub bound: Result<BoundConstants>,
}

fn mean_and_stderr(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let count = values.clone().count() as f64;
    let mean = values.clone().sum::<f64>() / count;
    if count < 2.0 {
        return (mean, 0.0);
    }
    let var = values.map(|x| (x - mean) * (x - mean)).sum::<f64>() / (count - 1.0);
    (mean, (var / count).sqrt())
}

pub fn estimate_regret_curve(config: &ExperimentConfig) -> Result<ExperimentResult> {
    config.algorithm1().validate()?;
    let outcomes: Vec<ReplicateOutcome> = (0..config.replicates)
        .into_par_iter()
        .map(|r| simulate_replicate(config, r))
        .collect::<Result<_>>()?;

    let bound = if config.p.is_iid() {
        Err(Error::BoundUndefinedIid)
    } else {
        crate::bound::bound_constants(
            &config.p,
            &config.schedule,
            config.exploration,
            config.channels,
        )
    };
    let g_table = GTable::new(&config.schedule, config.horizon);

    let checkpoints = config
        .checkpoints
        .iter()
        .enumerate()
        .map(|(k, &n)| {
            let (mean_regret, stderr) =
                mean_and_stderr(outcomes.iter().map(|o| o.regret[k] as f64));
            let g_of_n = g_table.g(n);
            let normalizer = g_of_n as f64 * (n as f64).ln();
            Checkpoint {
                n,
                mean_regret,
                stderr,
                g_of_n,
                normalized_regret: if normalizer > 0.0 {
                    mean_regret / normalizer
                } else {
                    f64::NAN
                },
                bound: match &bound {
                    Ok(b) if n >= 2 => Some(b.bound_with_g(g_of_n, n)),
                    _ => None,
                },
            }
        })
        .collect();

    let inferior_share = (0..config.checkpoints.len())
        .map(|k| outcomes.iter().map(|o| o.inferior_share[k]).sum::<f64>() / outcomes.len() as f64)
        .collect();

    Ok(ExperimentResult {
        curve: RegretCurve { checkpoints },
        diagnostics: RunDiagnostics {
            genie_arm: genie_kind(&config.p),
            replicates: outcomes.into_iter().map(|o| o.diagnostics).collect(),
            inferior_share,
        },
        bound,
    })
}

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExperimentFiles {
    pub regret_csv: PathBuf,
    pub diagnostics_csv: PathBuf,
    pub analysis_json: PathBuf,
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn analysis_for(config: &ExperimentConfig) -> AnalysisReport {
    AnalysisReport::compute(
        &config.p,
        config.channels,
        &config.schedule,
        config.exploration,
    )
}

/// Run the experiment and write `regret.csv`, `diagnostics.csv` and
/// `analysis.json` into `config.output`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<(ExperimentResult, ExperimentFiles)> {
    let result = estimate_regret_curve(config)?;
    let dir = &config.output;
    fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.clone(),
        source,
    })?;
    let files = ExperimentFiles {
        regret_csv: dir.join(REGRET_CSV),
        diagnostics_csv: dir.join(DIAGNOSTICS_CSV),
        analysis_json: dir.join(ANALYSIS_JSON),
    };
    write_file(&files.regret_csv, &result.curve.to_csv())?;
    write_file(&files.diagnostics_csv, &result.diagnostics.to_csv())?;
    let analysis =
        serde_json::to_string_pretty(&analysis_for(config)).expect("analysis report serializes");
    write_file(&files.analysis_json, &(analysis + "\n"))?;
    Ok((result, files))
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

/// One point of a sweep: overrides applied to a base config.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepItem {
    pub label: String,
    pub p: TransitionMatrix,
    pub schedule: BlockSchedule,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub label: String,
    pub p01: f64,
    pub p11: f64,
    pub schedule: String,
    pub n: u64,
    pub mean_regret: f64,
    pub normalized_regret: f64,
    pub bound: Option<f64>,
}

pub const SWEEP_HEADER: &str = "label,p01,p11,schedule,n,mean_regret,normalized_regret,bound";

/// Run each item into `<base.output>/<label>/` and return the final
/// checkpoint of each.
pub fn run_sweep(base: &ExperimentConfig, items: &[SweepItem]) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::with_capacity(items.len());
    for item in items {
        let mut config = base.clone();
        config.p = item.p;
        config.schedule = item.schedule.clone();
        config.initial_belief = BeliefVector::stationary(&item.p, base.channels)?;
        config.checkpoints = default_checkpoints(&config.schedule, config.horizon);
        config.output = base.output.join(&item.label);
        config.algorithm1().validate()?;
        let (result, _) = run_experiment(&config)?;
        let last = result.curve.last();
        rows.push(SweepRow {
            label: item.label.clone(),
            p01: item.p.p01(),
            p11: item.p.p11(),
            schedule: item.schedule.to_string(),
            n: last.n,
            mean_regret: last.mean_regret,
            normalized_regret: last.normalized_regret,
            bound: last.bound,
        });
    }
    let mut csv = String::from(SWEEP_HEADER);
    csv.push('\n');
    for r in &rows {
        let bound = r
            .bound
            .map_or_else(|| "undefined".to_string(), |b| b.to_string());
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{}",
            r.label, r.p01, r.p11, r.schedule, r.n, r.mean_regret, r.normalized_regret, bound
        );
    }
    fs::create_dir_all(&base.output).map_err(|source| Error::Io {
        path: base.output.clone(),
        source,
    })?;
    write_file(&base.output.join("sweep.csv"), &csv)?;
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_defaults() {
        let c = ExperimentConfig::from_json_str(r#"{"p01": 0.3, "p11": 0.7}"#).unwrap();
        assert_eq!(c.channels, 2);
        assert_eq!(c.exploration, 3.0);
        assert_eq!(c.schedule, BlockSchedule::k1());
        assert_eq!(c.seed, DEFAULT_SEED);
        assert!(c
            .initial_belief
            .as_slice()
            .iter()
            .all(|w| (w - 0.5).abs() < 1e-12));
        assert_eq!(c.checkpoints[0], 204);
        assert_eq!(*c.checkpoints.last().unwrap(), c.horizon);
        assert!(c.checkpoints.contains(&(c.horizon / 2)));
        assert!(c.checkpoints.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn exploration_two_rejected() {
        let err =
            ExperimentConfig::from_json_str(r#"{"p01": 0.3, "p11": 0.7, "L": 2}"#).unwrap_err();
        assert!(err.to_string().contains("exploration"), "{err}");
        assert!(err.to_string().contains("larger than 2"), "{err}");
    }

    #[test]
    fn short_horizon_rejected() {
        let err = ExperimentConfig::from_json_str(r#"{"p01": 0.3, "p11": 0.7, "horizon": 10}"#)
            .unwrap_err();
        assert!(err.to_string().contains("horizon"), "{err}");
    }

    #[test]
    fn schema_violations_name_the_field() {
        let err =
            ExperimentConfig::from_json_str(r#"{"p01": 0.3, "p11": 0.7, "bogus": 1}"#).unwrap_err();
        assert!(err.to_string().contains("bogus"), "{err}");
        let err = ExperimentConfig::from_json_str(r#"{"p11": 0.7}"#).unwrap_err();
        assert!(err.to_string().contains("p01"), "{err}");
        let err = ExperimentConfig::from_json_str(r#"{"p01": 1.3, "p11": 0.7}"#).unwrap_err();
        assert!(err.to_string().contains("p01"), "{err}");
        let err = ExperimentConfig::from_json_str(
            r#"{"p01": 0.3, "p11": 0.7, "initial_belief": [0.1, 0.2, 0.3]}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("initial_belief"), "{err}");
    }

    #[test]
    fn schedule_forms() {
        let c = ExperimentConfig::from_json_str(r#"{"p01": 0.3, "p11": 0.7, "schedule": "k3"}"#)
            .unwrap();
        assert_eq!(c.schedule, BlockSchedule::k3());
        let c = ExperimentConfig::from_json_str(
            r#"{"p01": 0.3, "p11": 0.7,
                "schedule": {"kind": "affine_log", "offset": 20, "scale": 2, "depth": 1}}"#,
        )
        .unwrap();
        assert_eq!(c.schedule, BlockSchedule::affine_log(20.0, 2.0, 1));
        assert!(
            ExperimentConfig::from_json_str(r#"{"p01": 0.3, "p11": 0.7, "schedule": "k9"}"#)
                .is_err()
        );
    }

    #[test]
    fn absorbing_chain_needs_explicit_belief() {
        let err = ExperimentConfig::from_json_str(r#"{"p01": 0.0, "p11": 1.0}"#).unwrap_err();
        assert!(err.to_string().contains("initial_belief"), "{err}");
    }

    #[test]
    fn checkpoint_grid() {
        let grid = default_checkpoints(&BlockSchedule::k1(), 1000);
        assert_eq!(grid, vec![204, 306, 459, 500, 689, 1000]);
    }
}
