//! UCB1 over the two myopic policies, played in blocks of growing length.
//!
//! Each arm is one whole policy. Selecting an arm runs that policy for `K_i`
//! consecutive slots, and the block's sample mean is one UCB1 observation.
//! The log term of the index uses `n`, the number of elapsed time slots.

use serde::{Deserialize, Serialize};

use crate::bound::MIN_EXPLORATION;
use crate::error::{Error, Result};
use crate::policy::PolicyKind;
use crate::schedule::BlockSchedule;

/// `xhat / count + sqrt(L ln n / count)`.
#[inline]
pub fn ucb_index(xhat: f64, count: u64, n: u64, exploration: f64) -> f64 {
    debug_assert!(count >= 1 && n >= 2);
    let count = count as f64;
    xhat / count + (exploration * (n as f64).ln() / count).sqrt()
}

/// Anything that can play one slot of a policy arm and report the reward.
pub trait RewardSource {
    fn play(&mut self, arm: PolicyKind) -> u8;
}

impl<F: FnMut(PolicyKind) -> u8> RewardSource for F {
    fn play(&mut self, arm: PolicyKind) -> u8 {
        self(arm)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockRecord {
    pub arm: PolicyKind,
    pub length: u64,
    /// Sum of per-slot rewards divided by `length`.
    pub mean: f64,
    /// Zero-based slot at which the block started.
    pub start: u64,
}

impl BlockRecord {
    pub fn total_reward(&self) -> u64 {
        (self.mean * self.length as f64).round() as u64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetaPolicyState {
    xhat: [f64; 2],
    counts: [u64; 2],
    n: u64,
    block_index: u64,
    exploration: f64,
}

impl MetaPolicyState {
    pub fn new(exploration: f64) -> Result<Self> {
        if exploration.is_nan() || exploration <= MIN_EXPLORATION {
            return Err(Error::ExplorationConstant(exploration));
        }
        Ok(Self {
            xhat: [0.0; 2],
            counts: [0; 2],
            n: 0,
            block_index: 1,
            exploration,
        })
    }

    pub fn exploration(&self) -> f64 {
        self.exploration
    }

    /// Elapsed time slots.
    pub fn elapsed(&self) -> u64 {
        self.n
    }

    /// 1-based index of the next block.
    pub fn block_index(&self) -> u64 {
        self.block_index
    }

    pub fn completed_blocks(&self) -> u64 {
        self.block_index - 1
    }

    pub fn count(&self, arm: PolicyKind) -> u64 {
        self.counts[arm.index()]
    }

    pub fn xhat(&self, arm: PolicyKind) -> f64 {
        self.xhat[arm.index()]
    }

    pub fn empirical_mean(&self, arm: PolicyKind) -> Option<f64> {
        let c = self.count(arm);
        (c > 0).then(|| self.xhat(arm) / c as f64)
    }

    pub fn index(&self, arm: PolicyKind) -> f64 {
        ucb_index(self.xhat(arm), self.count(arm), self.n, self.exploration)
    }

    /// Arm to play next: untried arms first (`pi1` before `pi2`), then the
    /// larger index with ties going to `pi1`.
    pub fn select_arm(&self) -> PolicyKind {
        if let Some(arm) = PolicyKind::ALL.into_iter().find(|&a| self.count(a) == 0) {
            return arm;
        }
        if self.index(PolicyKind::Pi2) > self.index(PolicyKind::Pi1) {
            PolicyKind::Pi2
        } else {
            PolicyKind::Pi1
        }
    }

    /// Fold one finished block into the statistics.
    pub fn record(&mut self, arm: PolicyKind, length: u64, mean: f64) {
        self.xhat[arm.index()] += mean;
        self.counts[arm.index()] += 1;
        self.n += length;
        self.block_index += 1;
    }
}

/// Play `arm` for `length` slots and update the state.
pub fn run_block<S: RewardSource + ?Sized>(
    state: &mut MetaPolicyState,
    arm: PolicyKind,
    length: u64,
    source: &mut S,
    mut on_slot: impl FnMut(u8),
) -> BlockRecord {
    let start = state.elapsed();
    let mut total = 0u64;
    for _ in 0..length {
        let y = source.play(arm);
        total += u64::from(y);
        on_slot(y);
    }
    let mean = total as f64 / length as f64;
    state.record(arm, length, mean);
    BlockRecord {
        arm,
        length,
        mean,
        start,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Algorithm1Config {
    pub schedule: BlockSchedule,
    pub exploration: f64,
    pub horizon: u64,
}

impl Algorithm1Config {
    pub fn initialization_length(&self) -> u64 {
        self.schedule.k(1) + self.schedule.k(2)
    }

    pub fn validate(&self) -> Result<()> {
        self.schedule.validate()?;
        if self.exploration.is_nan() || self.exploration <= MIN_EXPLORATION {
            return Err(Error::ExplorationConstant(self.exploration));
        }
        let init = self.initialization_length();
        if self.horizon < init {
            return Err(Error::HorizonTooShort {
                horizon: self.horizon,
                init,
            });
        }
        Ok(())
    }

    /// Slots the run can consume: the last block starts before the horizon
    /// and, the schedule being non-decreasing, is no longer than `K_horizon`.
    pub fn max_slots(&self) -> u64 {
        self.horizon + self.schedule.k(self.horizon.max(1))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Algorithm1Run {
    pub blocks: Vec<BlockRecord>,
    /// Reward of every played slot, including the overshoot of the last block.
    pub rewards: Vec<u8>,
    pub state: MetaPolicyState,
}

impl Algorithm1Run {
    pub fn total_reward(&self) -> u64 {
        self.rewards.iter().map(|&y| u64::from(y)).sum()
    }

    /// Slots spent on `arm` among the first `horizon` slots.
    pub fn slots_on(&self, arm: PolicyKind, horizon: u64) -> u64 {
        self.blocks
            .iter()
            .filter(|b| b.arm == arm && b.start < horizon)
            .map(|b| b.length.min(horizon - b.start))
            .sum()
    }
}

/// Initialization (one block per arm with `K_1`, `K_2`), then UCB-selected
/// blocks until at least `horizon` slots have elapsed.
pub fn run_algorithm1<S: RewardSource + ?Sized>(
    config: &Algorithm1Config,
    source: &mut S,
) -> Result<Algorithm1Run> {
    config.validate()?;
    let mut state = MetaPolicyState::new(config.exploration)?;
    let mut blocks = Vec::new();
    let mut rewards = Vec::with_capacity(config.horizon as usize);
    while state.elapsed() < config.horizon {
        let arm = state.select_arm();
        let length = config.schedule.k(state.block_index());
        blocks.push(run_block(&mut state, arm, length, source, |y| {
            rewards.push(y)
        }));
    }
    Ok(Algorithm1Run {
        blocks,
        rewards,
        state,
    })
}
