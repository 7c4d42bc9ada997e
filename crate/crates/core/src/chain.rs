//! Exact analysis of the ordered-channel Markov chain induced by a myopic
//! policy.
//!
//! Listing the channels in the policy's circular order starting from the
//! channel about to be sensed gives an ordered state vector in `{0,1}^N`.
//! Under either myopic policy that vector is itself a Markov chain on `2^N`
//! states, and the expected reward at slot `t` is the probability that its
//! first component is 1. From the chain we get the steady throughput `U` and
//! a uniform bound `C` on the cumulative transient `|sum_t E[Y(t)] - M U|`.
//!
//! State vectors are encoded with the first component as the most significant
//! bit, so the reward states are exactly the upper half of the index range.

use serde::{Deserialize, Serialize};

use crate::channel::{BeliefVector, TransitionMatrix};
use crate::error::{Error, Result};
use crate::policy::{first_action, initial_order, PolicyKind};

pub const MIN_CHANNELS: usize = 2;
pub const MAX_CHANNELS: usize = 12;
/// The truncated series tracks all `2^N` deterministic starts at once, which
/// costs `8^N` per step.
pub const MAX_SERIES_CHANNELS: usize = 8;

const POWER_RESIDUAL: f64 = 1e-12;
const POWER_MAX_ITERATIONS: usize = 1_000_000;
const SERIES_TAIL: f64 = 1e-10;
const SERIES_MAX_STEPS: usize = 1_000_000;

/// Transition matrix `Q` of the ordered state vector under one policy.
#[derive(Debug, Clone)]
pub struct OrderedChainModel {
    kind: PolicyKind,
    channels: usize,
    dim: usize,
    q: Vec<f64>,
    reward_states: Vec<usize>,
}

/// `sigma[k]` is the position, after one step, of the channel at position `k`.
fn successor_positions(kind: PolicyKind, first_free: bool, n: usize) -> Vec<usize> {
    match (kind, first_free) {
        // stay: order unchanged
        (PolicyKind::Pi1, true) => (0..n).collect(),
        // sensed channel moves to the back
        (PolicyKind::Pi1, false) => (0..n).map(|k| if k == 0 { n - 1 } else { k - 1 }).collect(),
        // switch to the last channel and reverse the order
        (PolicyKind::Pi2, true) => (0..n).map(|k| n - 1 - k).collect(),
        // stay, remaining channels reversed
        (PolicyKind::Pi2, false) => (0..n).map(|k| if k == 0 { 0 } else { n - k }).collect(),
    }
}

#[inline]
fn bit(state: usize, position: usize, n: usize) -> u8 {
    ((state >> (n - 1 - position)) & 1) as u8
}

impl OrderedChainModel {
    pub fn build(p: &TransitionMatrix, channels: usize, kind: PolicyKind) -> Result<Self> {
        if !(MIN_CHANNELS..=MAX_CHANNELS).contains(&channels) {
            return Err(Error::ChannelCount {
                count: channels,
                min: MIN_CHANNELS,
                max: MAX_CHANNELS,
            });
        }
        let n = channels;
        let dim = 1usize << n;
        let sigma_free = successor_positions(kind, true, n);
        let sigma_busy = successor_positions(kind, false, n);
        let mut q = vec![0.0; dim * dim];
        for i in 0..dim {
            let sigma = if bit(i, 0, n) == 1 {
                &sigma_free
            } else {
                &sigma_busy
            };
            let row = &mut q[i * dim..(i + 1) * dim];
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = (0..n)
                    .map(|k| p.prob(bit(i, k, n), bit(j, sigma[k], n)))
                    .product();
            }
        }
        let reward_states = (dim / 2..dim).collect();
        Ok(Self {
            kind,
            channels,
            dim,
            q,
            reward_states,
        })
    }

    pub fn kind(&self) -> PolicyKind {
        self.kind
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn reward_states(&self) -> &[usize] {
        &self.reward_states
    }

    /// Entry `Q[from][to]`.
    pub fn entry(&self, from: usize, to: usize) -> f64 {
        self.q[from * self.dim + to]
    }

    pub fn row(&self, from: usize) -> &[f64] {
        &self.q[from * self.dim..(from + 1) * self.dim]
    }

    /// Encode an ordered state vector (first component first).
    pub fn encode(&self, states: &[u8]) -> usize {
        assert_eq!(states.len(), self.channels);
        states
            .iter()
            .fold(0usize, |acc, &s| (acc << 1) | usize::from(s & 1))
    }

    pub fn max_row_sum_error(&self) -> f64 {
        (0..self.dim)
            .map(|i| (self.row(i).iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// `out = v Q`.
    pub fn step_into(&self, v: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|x| *x = 0.0);
        for (i, &vi) in v.iter().enumerate() {
            if vi == 0.0 {
                continue;
            }
            for (o, &qij) in out.iter_mut().zip(self.row(i)) {
                *o += vi * qij;
            }
        }
    }

    /// Probability mass on the reward states.
    pub fn reward_mass(&self, v: &[f64]) -> f64 {
        v[self.dim / 2..].iter().sum()
    }

    fn check_distribution(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.dim {
            return Err(Error::SteadyStateUndefined(format!(
                "initial distribution has {} entries, chain has {}",
                v.len(),
                self.dim
            )));
        }
        let total: f64 = v.iter().sum();
        if v.iter().any(|&x| x < 0.0) || (total - 1.0).abs() > 1e-9 {
            return Err(Error::SteadyStateUndefined(
                "initial vector is not a probability distribution".into(),
            ));
        }
        Ok(())
    }

    /// `E[Y(t)]` for `t = 1..=slots`, starting from `v1`.
    pub fn expected_reward_trajectory(&self, v1: &[f64], slots: usize) -> Result<Vec<f64>> {
        self.check_distribution(v1)?;
        let mut v = v1.to_vec();
        let mut next = vec![0.0; self.dim];
        let mut out = Vec::with_capacity(slots);
        for t in 0..slots {
            out.push(self.reward_mass(&v));
            if t + 1 < slots {
                self.step_into(&v, &mut next);
                std::mem::swap(&mut v, &mut next);
            }
        }
        Ok(out)
    }

    /// Point mass on one encoded state.
    pub fn point_mass(&self, state: usize) -> Vec<f64> {
        let mut v = vec![0.0; self.dim];
        v[state] = 1.0;
        v
    }

    /// Independent start with `omega[k]` the probability that the channel in
    /// position `k` is free. Positions follow the policy's initial order from
    /// its first action.
    pub fn product_distribution(&self, belief: &BeliefVector) -> Result<Vec<f64>> {
        if belief.len() != self.channels {
            return Err(Error::InvalidBelief(format!(
                "{} entries for {} channels",
                belief.len(),
                self.channels
            )));
        }
        let order = initial_order(belief);
        let mut positions = Vec::with_capacity(self.channels);
        let mut channel = first_action(belief);
        for _ in 0..self.channels {
            positions.push(belief.as_slice()[channel]);
            channel = order.next(channel);
        }
        let n = self.channels;
        Ok((0..self.dim)
            .map(|state| {
                (0..n)
                    .map(|k| {
                        let free = (state >> (n - 1 - k)) & 1 == 1;
                        if free {
                            positions[k]
                        } else {
                            1.0 - positions[k]
                        }
                    })
                    .product()
            })
            .collect())
    }

    /// `max_{K <= horizon} |sum_{t=1}^K E[Y(t)] - K U|` from `v1`.
    pub fn max_partial_deviation(&self, v1: &[f64], u: f64, horizon: usize) -> Result<f64> {
        let mut partial = 0.0f64;
        let mut worst = 0.0f64;
        for y in self.expected_reward_trajectory(v1, horizon)? {
            partial += y - u;
            worst = worst.max(partial.abs());
        }
        Ok(worst)
    }

    /// Checks that `Q` has a single closed class and that it is aperiodic,
    /// which is exactly the condition for every eigenvalue other than the
    /// leading one to lie strictly inside the unit circle.
    pub fn check_ergodic(&self) -> Result<()> {
        if self.q.iter().all(|&x| x > 0.0) {
            return Ok(());
        }
        let dim = self.dim;
        let succ: Vec<Vec<usize>> = (0..dim)
            .map(|i| (0..dim).filter(|&j| self.entry(i, j) > 0.0).collect())
            .collect();
        let comp = strongly_connected_components(&succ);
        let ncomp = comp.iter().copied().max().map_or(0, |m| m + 1);
        let mut leaves = vec![false; ncomp];
        for (i, targets) in succ.iter().enumerate() {
            for &j in targets {
                if comp[i] != comp[j] {
                    leaves[comp[i]] = true;
                }
            }
        }
        let closed: Vec<usize> = (0..ncomp).filter(|&c| !leaves[c]).collect();
        if closed.len() != 1 {
            return Err(Error::SteadyStateUndefined(format!(
                "{} closed classes, stationary law not unique",
                closed.len()
            )));
        }
        let class = closed[0];
        let root = (0..dim)
            .find(|&i| comp[i] == class)
            .expect("class non-empty");
        let period = class_period(&succ, &comp, class, root);
        if period != 1 {
            return Err(Error::SteadyStateUndefined(format!(
                "recurrent class has period {period}"
            )));
        }
        Ok(())
    }

    /// Stationary distribution and steady throughput by power iteration.
    pub fn steady_state(&self) -> Result<SteadyState> {
        self.check_ergodic()?;
        let mut v = vec![1.0 / self.dim as f64; self.dim];
        let mut next = vec![0.0; self.dim];
        for iteration in 1..=POWER_MAX_ITERATIONS {
            self.step_into(&v, &mut next);
            let residual: f64 = v.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
            std::mem::swap(&mut v, &mut next);
            if residual < POWER_RESIDUAL {
                // The residual criterion leaves an error of order
                // residual / (1 - slem); the same number of extra steps again
                // pushes it to rounding level, which keeps long partial sums
                // against U honest.
                for _ in 0..iteration {
                    self.step_into(&v, &mut next);
                    let moved: f64 = v.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
                    std::mem::swap(&mut v, &mut next);
                    if moved == 0.0 {
                        break;
                    }
                }
                let throughput = self.reward_mass(&v);
                return Ok(SteadyState {
                    distribution: v,
                    throughput,
                    iterations: iteration,
                });
            }
        }
        Err(Error::SteadyStateUndefined(
            "power iteration did not converge".into(),
        ))
    }

    pub fn steady_throughput(&self) -> Result<f64> {
        Ok(self.steady_state()?.throughput)
    }

    /// Worst case, over all `2^N` deterministic initial states, of
    /// `sum_t |E[Y(t)] - U|`. The series is truncated once a rigorous bound on
    /// the remaining tail drops below `1e-10`, and that bound is added.
    pub fn truncated_series_deviation(&self, steady: &SteadyState) -> Result<SeriesDeviation> {
        if self.channels > MAX_SERIES_CHANNELS {
            return Err(Error::ChannelCount {
                count: self.channels,
                min: MIN_CHANNELS,
                max: MAX_SERIES_CHANNELS,
            });
        }
        let dim = self.dim;
        let pi = &steady.distribution;
        let u = steady.throughput;
        // rows[s] = distribution at time t from deterministic start s
        let mut rows = vec![0.0; dim * dim];
        for s in 0..dim {
            rows[s * dim + s] = 1.0;
        }
        let mut scratch = vec![0.0; dim];
        let mut abs_sum = vec![0.0; dim];
        let mut tv_sum = vec![0.0; dim];
        for step in 1..=SERIES_MAX_STEPS {
            for s in 0..dim {
                let row = &rows[s * dim..(s + 1) * dim];
                abs_sum[s] += (self.reward_mass(row) - u).abs();
                tv_sum[s] += 0.5 * row.iter().zip(pi).map(|(a, b)| (a - b).abs()).sum::<f64>();
            }
            // advance every start to time step + 1
            for s in 0..dim {
                self.step_into(&rows[s * dim..(s + 1) * dim], &mut scratch);
                rows[s * dim..(s + 1) * dim].copy_from_slice(&scratch);
            }
            // rows now hold Q^step; its Dobrushin coefficient contracts the tail
            let contraction = dobrushin(&rows, dim);
            if contraction < 1.0 {
                let ratio = contraction / (1.0 - contraction);
                let tail = tv_sum.iter().fold(0.0f64, |m, &x| m.max(x)) * ratio;
                if tail < SERIES_TAIL {
                    let (worst_start, worst) =
                        abs_sum
                            .iter()
                            .enumerate()
                            .fold(
                                (0, f64::MIN),
                                |acc, (s, &x)| if x > acc.1 { (s, x) } else { acc },
                            );
                    return Ok(SeriesDeviation {
                        constant: worst + tail,
                        per_start: abs_sum.iter().map(|x| x + tail).collect(),
                        worst_start,
                        steps: step,
                        tail_bound: tail,
                    });
                }
            }
        }
        Err(Error::SteadyStateUndefined(
            "transient series did not converge".into(),
        ))
    }
}

/// Dobrushin coefficient of a row-stochastic matrix: the largest total
/// variation distance between two rows. Large matrices use the cheaper bound
/// `2 max_a TV(row_a, mean row)`.
fn dobrushin(rows: &[f64], dim: usize) -> f64 {
    let row = |a: usize| &rows[a * dim..(a + 1) * dim];
    if dim <= 64 {
        let mut worst = 0.0f64;
        for a in 0..dim {
            for b in a + 1..dim {
                let tv = 0.5
                    * row(a)
                        .iter()
                        .zip(row(b))
                        .map(|(x, y)| (x - y).abs())
                        .sum::<f64>();
                worst = worst.max(tv);
            }
        }
        worst
    } else {
        let mut mean = vec![0.0; dim];
        for a in 0..dim {
            for (m, x) in mean.iter_mut().zip(row(a)) {
                *m += x / dim as f64;
            }
        }
        let max_tv = (0..dim)
            .map(|a| {
                0.5 * row(a)
                    .iter()
                    .zip(&mean)
                    .map(|(x, m)| (x - m).abs())
                    .sum::<f64>()
            })
            .fold(0.0f64, f64::max);
        (2.0 * max_tv).min(1.0)
    }
}

/// Iterative Kosaraju. Returns the component id of every vertex.
fn strongly_connected_components(succ: &[Vec<usize>]) -> Vec<usize> {
    let n = succ.len();
    let mut pred = vec![Vec::new(); n];
    for (i, targets) in succ.iter().enumerate() {
        for &j in targets {
            pred[j].push(i);
        }
    }
    let mut visited = vec![false; n];
    let mut finish = Vec::with_capacity(n);
    for root in 0..n {
        if visited[root] {
            continue;
        }
        visited[root] = true;
        let mut stack = vec![(root, 0usize)];
        while let Some((v, next)) = stack.pop() {
            if next < succ[v].len() {
                stack.push((v, next + 1));
                let w = succ[v][next];
                if !visited[w] {
                    visited[w] = true;
                    stack.push((w, 0));
                }
            } else {
                finish.push(v);
            }
        }
    }
    let mut comp = vec![usize::MAX; n];
    let mut count = 0;
    for &root in finish.iter().rev() {
        if comp[root] != usize::MAX {
            continue;
        }
        comp[root] = count;
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            for &w in &pred[v] {
                if comp[w] == usize::MAX {
                    comp[w] = count;
                    stack.push(w);
                }
            }
        }
        count += 1;
    }
    comp
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn class_period(succ: &[Vec<usize>], comp: &[usize], class: usize, root: usize) -> usize {
    let mut level = vec![usize::MAX; succ.len()];
    level[root] = 0;
    let mut queue = std::collections::VecDeque::from([root]);
    let mut period = 0;
    while let Some(v) = queue.pop_front() {
        for &w in &succ[v] {
            if comp[w] != class {
                continue;
            }
            if level[w] == usize::MAX {
                level[w] = level[v] + 1;
                queue.push_back(w);
            } else {
                period = gcd(period, (level[v] + 1).abs_diff(level[w]));
            }
        }
    }
    period
}

#[derive(Debug, Clone)]
pub struct SteadyState {
    pub distribution: Vec<f64>,
    pub throughput: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone)]
pub struct SeriesDeviation {
    /// Worst-case cumulative absolute deviation, tail bound included.
    pub constant: f64,
    pub per_start: Vec<f64>,
    pub worst_start: usize,
    pub steps: usize,
    pub tail_bound: f64,
}

/// How the deviation constants `C_i` are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeviationMethod {
    #[default]
    TruncatedSeries,
    ClosedFormN2,
}

/// Steady throughput and transient deviation constant of both policies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteadyConstants {
    pub u1: f64,
    pub u2: f64,
    pub c1: f64,
    pub c2: f64,
}

impl SteadyConstants {
    pub fn throughput(&self, kind: PolicyKind) -> f64 {
        match kind {
            PolicyKind::Pi1 => self.u1,
            PolicyKind::Pi2 => self.u2,
        }
    }

    pub fn deviation(&self, kind: PolicyKind) -> f64 {
        match kind {
            PolicyKind::Pi1 => self.c1,
            PolicyKind::Pi2 => self.c2,
        }
    }

    /// Closed forms of `U_1, U_2, C_1, C_2` for two channels.
    pub fn closed_form_n2(p: &TransitionMatrix) -> Self {
        let (p01, p11) = (p.p01(), p.p11());
        let d = 1.0 - p11 + p01;
        let diff = (p11 - p01).abs();
        let base = p01 * p01 / (d * d);
        let u1 = base + (1.0 - p01 + p11) * p01 * (1.0 - p11) / (d * d);
        let u2 = base + p01 * (1.0 - p11) / d;
        let shared = (p01 * p01).max((1.0 - p11) * (1.0 - p11)) * diff
            / ((1.0 - (p11 - p01).powi(2)) * d * d);
        let lead = 2.0 * p01.max(1.0 - p11) * diff / d.powi(3);
        Self {
            u1,
            u2,
            c1: lead * (1.0 - p11) + shared,
            c2: lead * p01 + shared,
        }
    }

    /// Numerical constants for `channels` channels.
    pub fn compute(p: &TransitionMatrix, channels: usize, method: DeviationMethod) -> Result<Self> {
        let mut u = [0.0; 2];
        let mut c = [0.0; 2];
        for kind in PolicyKind::ALL {
            let model = OrderedChainModel::build(p, channels, kind)?;
            let steady = model.steady_state()?;
            u[kind.index()] = steady.throughput;
            if method == DeviationMethod::TruncatedSeries {
                c[kind.index()] = model.truncated_series_deviation(&steady)?.constant;
            }
        }
        if method == DeviationMethod::ClosedFormN2 {
            if channels != 2 {
                return Err(Error::ClosedFormChannels(channels));
            }
            let closed = Self::closed_form_n2(p);
            c = [closed.c1, closed.c2];
        }
        Ok(Self {
            u1: u[0],
            u2: u[1],
            c1: c[0],
            c2: c[1],
        })
    }
}

/// Result of checking `|sum_{t<=K} E[Y(t)] - K U| <= C` over a set of starts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviationCheck {
    pub kind: PolicyKind,
    pub method: DeviationMethod,
    pub constant: f64,
    pub horizon: usize,
    /// Largest partial-sum deviation over all starts and `K <= horizon`.
    pub worst_deviation: f64,
    /// `"state <bits>"` or `"belief product"`.
    pub worst_start: String,
    pub pass: bool,
}

/// Compare `C` (by `method`) with the exact partial sums from every
/// deterministic start and, if given, from the product distribution of
/// `belief`.
pub fn check_deviation_bound(
    p: &TransitionMatrix,
    channels: usize,
    kind: PolicyKind,
    method: DeviationMethod,
    horizon: usize,
    belief: Option<&BeliefVector>,
) -> Result<DeviationCheck> {
    let model = OrderedChainModel::build(p, channels, kind)?;
    let steady = model.steady_state()?;
    let constant = deviation_constant(p, channels, kind, method)?;
    let mut worst = (0.0f64, String::new());
    for state in 0..model.dim() {
        let d =
            model.max_partial_deviation(&model.point_mass(state), steady.throughput, horizon)?;
        if d > worst.0 || worst.1.is_empty() {
            worst = (d, format!("state {state:0width$b}", width = channels));
        }
    }
    if let Some(belief) = belief {
        let v = model.product_distribution(belief)?;
        let d = model.max_partial_deviation(&v, steady.throughput, horizon)?;
        if d > worst.0 {
            worst = (d, "belief product".to_string());
        }
    }
    Ok(DeviationCheck {
        kind,
        method,
        constant,
        horizon,
        worst_deviation: worst.0,
        worst_start: worst.1,
        pass: worst.0 <= constant + 1e-9,
    })
}

/// `U` for one policy via the chain.
pub fn steady_throughput(p: &TransitionMatrix, channels: usize, kind: PolicyKind) -> Result<f64> {
    OrderedChainModel::build(p, channels, kind)?.steady_throughput()
}

/// `C` for one policy.
pub fn deviation_constant(
    p: &TransitionMatrix,
    channels: usize,
    kind: PolicyKind,
    method: DeviationMethod,
) -> Result<f64> {
    match method {
        DeviationMethod::TruncatedSeries => {
            let model = OrderedChainModel::build(p, channels, kind)?;
            let steady = model.steady_state()?;
            Ok(model.truncated_series_deviation(&steady)?.constant)
        }
        DeviationMethod::ClosedFormN2 => {
            if channels != 2 {
                return Err(Error::ClosedFormChannels(channels));
            }
            Ok(SteadyConstants::closed_form_n2(p).deviation(kind))
        }
    }
}
