//! Gilbert-Elliott channel bank.
//!
//! `N` independent two-state Markov channels share one transition law. State
//! `1` means the channel is free, `0` busy. Channel evolution never depends on
//! which channel a user senses, so a whole `N x T` path can be drawn up front
//! and replayed against any number of policies.
//!
//! Channels are zero-indexed throughout the crate.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Random stream used by every sampler in the crate.
pub type RandomStream = ChaCha8Rng;

/// Derive the private stream of one replicate from the master seed.
pub fn replicate_stream(master_seed: u64, index: u64) -> RandomStream {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

/// Sign of `p11 - p01`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Correlation {
    Positive,
    Negative,
    Zero,
}

/// Two-state transition law `P`, parameterized by `p01` (busy -> free) and
/// `p11` (free -> free).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitionMatrix {
    p01: f64,
    p11: f64,
}

fn check_probability(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::InvalidProbability { name, value })
    }
}

impl TransitionMatrix {
    pub fn new(p01: f64, p11: f64) -> Result<Self> {
        check_probability("p01", p01)?;
        check_probability("p11", p11)?;
        Ok(Self { p01, p11 })
    }

    pub fn p01(&self) -> f64 {
        self.p01
    }

    pub fn p11(&self) -> f64 {
        self.p11
    }

    /// Probability of moving from state `from` to state `to`.
    #[inline]
    pub fn prob(&self, from: u8, to: u8) -> f64 {
        let p_free = if from == 1 { self.p11 } else { self.p01 };
        if to == 1 {
            p_free
        } else {
            1.0 - p_free
        }
    }

    pub fn correlation_sign(&self) -> Correlation {
        if self.p11 > self.p01 {
            Correlation::Positive
        } else if self.p11 < self.p01 {
            Correlation::Negative
        } else {
            Correlation::Zero
        }
    }

    /// `p01 == p11`: every channel is an i.i.d. Bernoulli sequence. Accepted
    /// by the simulator, but the regret bound constants are undefined.
    pub fn is_iid(&self) -> bool {
        self.correlation_sign() == Correlation::Zero
    }

    /// Stationary probability of the free state, `p01 / (1 + p01 - p11)`.
    pub fn stationary_prob(&self) -> Result<f64> {
        let denom = self.p01 + (1.0 - self.p11);
        if denom <= 0.0 {
            return Err(Error::AbsorbingChain);
        }
        Ok(self.p01 / denom)
    }

    /// One-step belief update `w -> w p11 + (1 - w) p01`.
    pub fn propagate_belief(&self, omega: f64) -> f64 {
        omega * self.p11 + (1.0 - omega) * self.p01
    }
}

impl fmt::Display for TransitionMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P(p01={}, p11={})", self.p01, self.p11)
    }
}

/// Conditional probabilities that each channel is free.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct BeliefVector(Vec<f64>);

impl BeliefVector {
    pub fn new(omega: Vec<f64>) -> Result<Self> {
        if omega.len() < 2 {
            return Err(Error::InvalidBelief(format!(
                "need at least 2 channels, got {}",
                omega.len()
            )));
        }
        if let Some((i, w)) = omega
            .iter()
            .enumerate()
            .find(|(_, w)| !(0.0..=1.0).contains(*w))
        {
            return Err(Error::InvalidBelief(format!(
                "entry {i} = {w} outside [0, 1]"
            )));
        }
        Ok(Self(omega))
    }

    /// The stationary probability replicated over `channels` entries.
    pub fn stationary(p: &TransitionMatrix, channels: usize) -> Result<Self> {
        Self::new(vec![p.stationary_prob()?; channels])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for BeliefVector {
    type Error = Error;

    fn try_from(value: Vec<f64>) -> Result<Self> {
        Self::new(value)
    }
}

impl From<BeliefVector> for Vec<f64> {
    fn from(value: BeliefVector) -> Self {
        value.0
    }
}

/// Joint state of the bank at slot `t` (1-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChannelBankState {
    pub states: Vec<u8>,
    pub t: u64,
}

impl ChannelBankState {
    pub fn new(states: Vec<u8>) -> Result<Self> {
        if states.iter().any(|&s| s > 1) {
            return Err(Error::InvalidBelief(
                "channel states must be 0 or 1".to_string(),
            ));
        }
        Ok(Self { states, t: 1 })
    }

    pub fn channels(&self) -> usize {
        self.states.len()
    }
}

/// Draw each channel free with probability `omega_i`, independently.
pub fn sample_initial<R: Rng + ?Sized>(belief: &BeliefVector, rng: &mut R) -> ChannelBankState {
    let states = belief
        .as_slice()
        .iter()
        .map(|&w| u8::from(rng.random::<f64>() < w))
        .collect();
    ChannelBankState { states, t: 1 }
}

#[inline]
fn step_channel<R: Rng + ?Sized>(p: &TransitionMatrix, state: u8, rng: &mut R) -> u8 {
    let p_free = if state == 1 { p.p11 } else { p.p01 };
    u8::from(rng.random::<f64>() < p_free)
}

/// Advance every channel one slot.
pub fn evolve_bank<R: Rng + ?Sized>(
    state: &ChannelBankState,
    p: &TransitionMatrix,
    rng: &mut R,
) -> ChannelBankState {
    ChannelBankState {
        states: state
            .states
            .iter()
            .map(|&s| step_channel(p, s, rng))
            .collect(),
        t: state.t + 1,
    }
}

/// A pre-sampled `N x T` channel trajectory, stored slot-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChannelPath {
    channels: usize,
    data: Vec<u8>,
}

impl ChannelPath {
    /// Sample `slots` consecutive bank states starting from `initial`.
    pub fn sample<R: Rng + ?Sized>(
        p: &TransitionMatrix,
        initial: &ChannelBankState,
        slots: usize,
        rng: &mut R,
    ) -> Self {
        let channels = initial.channels();
        let mut data = Vec::with_capacity(channels * slots);
        if slots > 0 {
            data.extend_from_slice(&initial.states);
        }
        for s in 1..slots {
            let base = (s - 1) * channels;
            for c in 0..channels {
                let next = step_channel(p, data[base + c], rng);
                data.push(next);
            }
        }
        Self { channels, data }
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn slots(&self) -> usize {
        self.data.len() / self.channels.max(1)
    }

    /// State of `channel` at zero-based `slot`.
    #[inline]
    pub fn state(&self, slot: usize, channel: usize) -> u8 {
        self.data[slot * self.channels + channel]
    }

    pub fn slot(&self, slot: usize) -> &[u8] {
        &self.data[slot * self.channels..(slot + 1) * self.channels]
    }
}
