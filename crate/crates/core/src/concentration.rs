//! Tail bounds for sums of bounded variables and a Monte Carlo checker for
//! them.
//!
//! [`hoeffding_tail_bound`] is the classic per-tail bound for a constant
//! conditional mean. [`generalized_tail_bounds`] covers sequences whose
//! conditional means only stay within `C` of `mu`; it is what lets block
//! sample means of a Markov policy be treated like bandit rewards.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::replicate_stream;
use crate::error::{Error, Result};

/// `exp(-2 a^2 / n)`.
pub fn hoeffding_tail_bound(n: u64, a: f64) -> f64 {
    assert!(n >= 1 && a >= 0.0);
    (-2.0 * a * a / n as f64).exp()
}

/// Parameters of the drifting-mean tail bound: `n` variables in `[0, b]`
/// whose conditional means stay within `c` of `mu`, deviation `a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriftBoundParams {
    pub n: u64,
    pub a: f64,
    pub mu: f64,
    pub c: f64,
    pub b: f64,
}

impl DriftBoundParams {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::DriftConstraint("n must be at least 1".into()));
        }
        if !(self.c > 0.0 && self.c < self.mu) {
            return Err(Error::DriftConstraint(format!(
                "need 0 < C < mu, got C = {}, mu = {}",
                self.c, self.mu
            )));
        }
        if self.b.is_nan() || self.b <= 0.0 || self.a.is_nan() || self.a < 0.0 {
            return Err(Error::DriftConstraint(format!(
                "need b > 0 and a >= 0, got b = {}, a = {}",
                self.b, self.a
            )));
        }
        Ok(())
    }

    /// Threshold of the upper event `S_n >= n (mu + C) + a`.
    pub fn upper_threshold(&self) -> f64 {
        self.n as f64 * (self.mu + self.c) + self.a
    }

    /// Threshold of the lower event `S_n <= n (mu - C) - a`.
    pub fn lower_threshold(&self) -> f64 {
        self.n as f64 * (self.mu - self.c) - self.a
    }
}

/// `(upper, lower)`:
/// `exp(-2 (a (mu - C) / (b (mu + C)))^2 / n)` and `exp(-2 (a / b)^2 / n)`.
pub fn generalized_tail_bounds(p: &DriftBoundParams) -> Result<(f64, f64)> {
    p.validate()?;
    let n = p.n as f64;
    let scaled = p.a * (p.mu - p.c) / (p.b * (p.mu + p.c));
    let upper = (-2.0 * scaled * scaled / n).exp();
    let lower = (-2.0 * (p.a / p.b).powi(2) / n).exp();
    Ok((upper, lower))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tail {
    Upper,
    Lower,
}

/// How the conditional mean of `X_t` is chosen given the past.
/// Every variant emits `X_t = b * Bernoulli(m_t / b)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DriftProcess {
    /// `m_t = mu + offset`.
    Constant { offset: f64 },
    /// `m_t = mu + C` on odd `t`, `mu - C` on even `t`.
    Alternating,
    /// Always at the edge of the band on the side of `toward`.
    Adversarial { toward: Tail },
    /// Follows the running deviation: `mu + C` while `S_{t-1} >= (t-1) mu`,
    /// else `mu - C`.
    Momentum,
    /// Cycles through fixed means.
    Scripted { means: Vec<f64> },
}

impl DriftProcess {
    pub fn builtins() -> Vec<DriftProcess> {
        vec![
            DriftProcess::Constant { offset: 0.0 },
            DriftProcess::Alternating,
            DriftProcess::Adversarial {
                toward: Tail::Upper,
            },
            DriftProcess::Adversarial {
                toward: Tail::Lower,
            },
            DriftProcess::Momentum,
        ]
    }

    pub fn name(&self) -> String {
        match self {
            DriftProcess::Constant { offset } => format!("constant({offset:+})"),
            DriftProcess::Alternating => "alternating".into(),
            DriftProcess::Adversarial {
                toward: Tail::Upper,
            } => "adversarial_upper".into(),
            DriftProcess::Adversarial {
                toward: Tail::Lower,
            } => "adversarial_lower".into(),
            DriftProcess::Momentum => "momentum".into(),
            DriftProcess::Scripted { means } => format!("scripted({} means)", means.len()),
        }
    }

    fn means_in_band(&self, p: &DriftBoundParams) -> Vec<f64> {
        match self {
            DriftProcess::Constant { offset } => vec![p.mu + offset],
            DriftProcess::Scripted { means } => means.clone(),
            _ => vec![p.mu - p.c, p.mu + p.c],
        }
    }

    /// Reject processes whose conditional means can leave `[mu - C, mu + C]`
    /// or `[0, b]`.
    pub fn validate(&self, p: &DriftBoundParams) -> Result<()> {
        p.validate()?;
        let means = self.means_in_band(p);
        if means.is_empty() {
            return Err(Error::DriftConstraint(
                "scripted process has no means".into(),
            ));
        }
        let slack = 1e-12;
        for m in means {
            if (m - p.mu).abs() > p.c + slack {
                return Err(Error::DriftConstraint(format!(
                    "{}: conditional mean {m} outside mu +/- C = {} +/- {}",
                    self.name(),
                    p.mu,
                    p.c
                )));
            }
            if m < 0.0 || m > p.b {
                return Err(Error::DriftConstraint(format!(
                    "{}: conditional mean {m} outside [0, b = {}]",
                    self.name(),
                    p.b
                )));
            }
        }
        Ok(())
    }

    #[inline]
    fn mean_at(&self, t: u64, sum: f64, p: &DriftBoundParams) -> f64 {
        match self {
            DriftProcess::Constant { offset } => p.mu + offset,
            DriftProcess::Alternating => {
                if t % 2 == 1 {
                    p.mu + p.c
                } else {
                    p.mu - p.c
                }
            }
            DriftProcess::Adversarial {
                toward: Tail::Upper,
            } => p.mu + p.c,
            DriftProcess::Adversarial {
                toward: Tail::Lower,
            } => p.mu - p.c,
            DriftProcess::Momentum => {
                if sum >= (t - 1) as f64 * p.mu {
                    p.mu + p.c
                } else {
                    p.mu - p.c
                }
            }
            DriftProcess::Scripted { means } => means[((t - 1) as usize) % means.len()],
        }
    }

    /// Draw one realization of `S_n`.
    pub fn sample_sum<R: Rng + ?Sized>(&self, p: &DriftBoundParams, rng: &mut R) -> f64 {
        let mut sum = 0.0;
        for t in 1..=p.n {
            let m = self.mean_at(t, sum, p);
            if rng.random::<f64>() * p.b < m {
                sum += p.b;
            }
        }
        sum
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailEstimate {
    pub hits: u64,
    pub frequency: f64,
    pub bound: f64,
    /// Standard deviation of the frequency estimator if the true probability
    /// sat exactly at the bound.
    pub sigma: f64,
    pub pass: bool,
}

impl TailEstimate {
    fn new(hits: u64, trials: u64, bound: f64) -> Self {
        let frequency = hits as f64 / trials as f64;
        let at = bound.min(1.0);
        let sigma = (at * (1.0 - at) / trials as f64).sqrt();
        Self {
            hits,
            frequency,
            bound,
            sigma,
            pass: frequency <= bound + 3.0 * sigma,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailCheckReport {
    pub process: String,
    pub params: DriftBoundParams,
    pub trials: u64,
    pub upper: TailEstimate,
    pub lower: TailEstimate,
    pub pass: bool,
}

const TRIALS_PER_STREAM: u64 = 1024;

/// Monte Carlo frequency of both tail events against the analytic bounds.
/// Trials are split into fixed chunks with their own derived streams, so the
/// result does not depend on thread scheduling.
pub fn empirical_tail_check(
    process: &DriftProcess,
    params: &DriftBoundParams,
    trials: u64,
    seed: u64,
) -> Result<TailCheckReport> {
    process.validate(params)?;
    if trials == 0 {
        return Err(Error::DriftConstraint("need at least one trial".into()));
    }
    let (upper_bound, lower_bound) = generalized_tail_bounds(params)?;
    let upper_at = params.upper_threshold();
    let lower_at = params.lower_threshold();
    // count boundary ties as hits
    let eps = 1e-9 * params.b.max(1.0);
    let chunks = trials.div_ceil(TRIALS_PER_STREAM);
    let (upper_hits, lower_hits) = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = replicate_stream(seed, chunk);
            let count = TRIALS_PER_STREAM.min(trials - chunk * TRIALS_PER_STREAM);
            let mut hits = (0u64, 0u64);
            for _ in 0..count {
                let s = process.sample_sum(params, &mut rng);
                hits.0 += u64::from(s >= upper_at - eps);
                hits.1 += u64::from(s <= lower_at + eps);
            }
            hits
        })
        .reduce(|| (0, 0), |x, y| (x.0 + y.0, x.1 + y.1));
    let upper = TailEstimate::new(upper_hits, trials, upper_bound);
    let lower = TailEstimate::new(lower_hits, trials, lower_bound);
    Ok(TailCheckReport {
        process: process.name(),
        params: *params,
        trials,
        pass: upper.pass && lower.pass,
        upper,
        lower,
    })
}

/// The standard verification grid: `n in {10, 100, 1000}`,
/// `a in {0.5, 1, 2} * sqrt(n)`, with `mu = 0.5`, `C = 0.1`, `b = 1`.
pub fn standard_grid() -> Vec<DriftBoundParams> {
    let mut grid = Vec::new();
    for n in [10u64, 100, 1000] {
        for scale in [0.5, 1.0, 2.0] {
            grid.push(DriftBoundParams {
                n,
                a: scale * (n as f64).sqrt(),
                mu: 0.5,
                c: 0.1,
                b: 1.0,
            });
        }
    }
    grid
}
