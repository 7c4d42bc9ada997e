//! `rmab`: simulate, analyze and check the block-UCB channel-access learner.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use rmab_core::chain::{check_deviation_bound, DeviationCheck};
use rmab_core::concentration::{standard_grid, TailCheckReport};
use rmab_core::harness::{read_raw_config, run_sweep, RawConfig, SweepItem};
use rmab_core::{
    empirical_tail_check, run_experiment, AnalysisReport, BeliefVector, BlockSchedule,
    DeviationMethod, DriftProcess, ExperimentConfig, PolicyKind, TransitionMatrix,
};

#[derive(Parser)]
#[command(
    name = "rmab",
    version,
    about = "Restless-bandit channel access simulator and analyzer"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate a regret curve and write regret.csv, diagnostics.csv and analysis.json.
    Simulate(SimulateArgs),
    /// Print U, C and the bound constants as JSON.
    Analyze(AnalyzeArgs),
    /// Check the concentration and deviation bounds numerically.
    VerifyBounds(VerifyArgs),
    /// Run simulations over several channels and schedules.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct Overrides {
    /// JSON config file; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    p01: Option<f64>,
    #[arg(long)]
    p11: Option<f64>,
    #[arg(long, short = 'N')]
    channels: Option<usize>,
    /// UCB exploration constant L (> 2).
    #[arg(long, short = 'L')]
    exploration: Option<f64>,
    /// k1, k2, k3, affine:OFFSET:SCALE:DEPTH, linear:FIRST:STEP or table:A,B,...
    #[arg(long)]
    schedule: Option<BlockSchedule>,
    #[arg(long)]
    horizon: Option<u64>,
    #[arg(long)]
    replicates: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

impl Overrides {
    fn resolve(self) -> Result<ExperimentConfig> {
        let mut raw = match &self.config {
            Some(path) => read_raw_config(path)?,
            None => RawConfig::default(),
        };
        raw.p01 = self.p01.or(raw.p01);
        raw.p11 = self.p11.or(raw.p11);
        raw.channels = self.channels.or(raw.channels);
        raw.exploration = self.exploration.or(raw.exploration);
        raw.horizon = self.horizon.or(raw.horizon);
        raw.replicates = self.replicates.or(raw.replicates);
        raw.seed = self.seed.or(raw.seed);
        raw.output = self.output.or(raw.output);
        if let Some(schedule) = self.schedule {
            raw.set_schedule(schedule);
        }
        if let Some(channels) = self.channels {
            if raw
                .initial_belief
                .as_ref()
                .is_some_and(|w| w.len() != channels)
            {
                raw.initial_belief = None;
            }
        }
        Ok(ExperimentConfig::from_raw(raw)?)
    }
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long)]
    p01: f64,
    #[arg(long)]
    p11: f64,
    #[arg(long, short = 'N', default_value_t = 2)]
    channels: usize,
    #[arg(long, short = 'L', default_value_t = 3.0)]
    exploration: f64,
    #[arg(long, default_value = "k1")]
    schedule: BlockSchedule,
    /// Write the JSON here instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Monte Carlo trials per concentration check.
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Also check the deviation constants of this channel (needs --p11).
    #[arg(long, requires = "p11")]
    p01: Option<f64>,
    #[arg(long, requires = "p01")]
    p11: Option<f64>,
    #[arg(long, short = 'N', default_value_t = 2)]
    channels: usize,
    /// Partial sums are checked for every K up to this.
    #[arg(long, default_value_t = 2000)]
    deviation_horizon: usize,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    overrides: Overrides,
    /// Channel as P01:P11; repeatable.
    #[arg(long = "channel", value_parser = parse_channel, required = true)]
    channel_list: Vec<TransitionMatrix>,
    /// Schedule; repeatable. Defaults to the base config's schedule.
    #[arg(long = "with-schedule")]
    schedules: Vec<BlockSchedule>,
}

fn parse_channel(s: &str) -> Result<TransitionMatrix, String> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| format!("expected P01:P11, got {s:?}"))?;
    let p01 = a.trim().parse::<f64>().map_err(|e| e.to_string())?;
    let p11 = b.trim().parse::<f64>().map_err(|e| e.to_string())?;
    TransitionMatrix::new(p01, p11).map_err(|e| e.to_string())
}

fn emit(json: &str, output: Option<&PathBuf>) -> Result<()> {
    match output {
        Some(path) => fs::write(path, format!("{json}\n"))
            .with_context(|| format!("writing {}", path.display())),
        None => {
            println!("{json}");
            Ok(())
        }
    }
}

fn simulate(args: SimulateArgs) -> Result<ExitCode> {
    let config = args.overrides.resolve()?;
    let (result, files) = run_experiment(&config)?;
    let last = result.curve.last();
    eprintln!(
        "n = {}: mean regret {:.2} (se {:.2}), R/(G ln n) = {:.4}, bound {}",
        last.n,
        last.mean_regret,
        last.stderr,
        last.normalized_regret,
        last.bound
            .map_or_else(|| "undefined".into(), |b| format!("{b:.4e}")),
    );
    eprintln!(
        "genie {}; inferior slot share {:.4}",
        result.diagnostics.genie_arm,
        result
            .diagnostics
            .inferior_share
            .last()
            .copied()
            .unwrap_or(f64::NAN)
    );
    println!("{}", files.regret_csv.display());
    println!("{}", files.diagnostics_csv.display());
    println!("{}", files.analysis_json.display());
    Ok(ExitCode::SUCCESS)
}

fn analyze(args: AnalyzeArgs) -> Result<ExitCode> {
    if args.exploration.is_nan() || args.exploration <= 2.0 {
        bail!(
            "exploration constant L must be larger than 2, got {}",
            args.exploration
        );
    }
    let p = TransitionMatrix::new(args.p01, args.p11)?;
    let report = AnalysisReport::compute(&p, args.channels, &args.schedule, args.exploration);
    emit(
        &serde_json::to_string_pretty(&report)?,
        args.output.as_ref(),
    )?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct VerifyReport {
    concentration: Vec<TailCheckReport>,
    deviation: Vec<DeviationCheck>,
    pass: bool,
}

fn verify(args: VerifyArgs) -> Result<ExitCode> {
    let mut concentration = Vec::new();
    for (k, params) in standard_grid().iter().enumerate() {
        for (j, process) in DriftProcess::builtins().iter().enumerate() {
            let seed = args.seed.wrapping_add((k * 16 + j) as u64);
            concentration.push(empirical_tail_check(process, params, args.trials, seed)?);
        }
    }
    let mut deviation = Vec::new();
    if let (Some(p01), Some(p11)) = (args.p01, args.p11) {
        let p = TransitionMatrix::new(p01, p11)?;
        let belief = BeliefVector::stationary(&p, args.channels).ok();
        for kind in PolicyKind::ALL {
            deviation.push(check_deviation_bound(
                &p,
                args.channels,
                kind,
                DeviationMethod::TruncatedSeries,
                args.deviation_horizon,
                belief.as_ref(),
            )?);
        }
    }
    let pass = concentration.iter().all(|r| r.pass) && deviation.iter().all(|d| d.pass);
    let report = VerifyReport {
        concentration,
        deviation,
        pass,
    };
    emit(
        &serde_json::to_string_pretty(&report)?,
        args.output.as_ref(),
    )?;
    Ok(if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn sweep(args: SweepArgs) -> Result<ExitCode> {
    let mut raw_overrides = args.overrides;
    // the base config only needs a valid channel; each item replaces it
    let first = args.channel_list[0];
    raw_overrides.p01 = raw_overrides.p01.or(Some(first.p01()));
    raw_overrides.p11 = raw_overrides.p11.or(Some(first.p11()));
    let base = raw_overrides.resolve()?;
    let schedules = if args.schedules.is_empty() {
        vec![base.schedule.clone()]
    } else {
        args.schedules
    };
    let mut items = Vec::new();
    for p in &args.channel_list {
        for schedule in &schedules {
            items.push(SweepItem {
                label: format!("p{}_{}_{}", p.p01(), p.p11(), schedule).replace([':', ','], "-"),
                p: *p,
                schedule: schedule.clone(),
            });
        }
    }
    for row in run_sweep(&base, &items)? {
        println!(
            "{}: n = {}, mean regret {:.2}, normalized {:.4}",
            row.label, row.n, row.mean_regret, row.normalized_regret
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> Result<ExitCode> {
    match Cli::parse().command {
        Command::Simulate(args) => simulate(args),
        Command::Analyze(args) => analyze(args),
        Command::VerifyBounds(args) => verify(args),
        Command::Sweep(args) => sweep(args),
    }
}
