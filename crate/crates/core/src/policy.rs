//! The two myopic sensing policies as automata over a circular channel order.
//!
//! `Pi1` stays on a channel while it reads free and moves to the next channel
//! of a fixed circular order on busy. `Pi2` stays while busy and moves on free,
//! using the initial order on odd slots and its reverse on even slots.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::channel::{BeliefVector, Correlation, TransitionMatrix};

/// A cyclic permutation of channel indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CircularOrder {
    order: Vec<usize>,
    position: Vec<usize>,
}

impl CircularOrder {
    /// Build from a permutation of `0..n`. Returns `None` otherwise.
    pub fn new(order: Vec<usize>) -> Option<Self> {
        let n = order.len();
        let mut position = vec![usize::MAX; n];
        for (k, &c) in order.iter().enumerate() {
            if c >= n || position[c] != usize::MAX {
                return None;
            }
            position[c] = k;
        }
        Some(Self { order, position })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            order: (0..n).collect(),
            position: (0..n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.order
    }

    /// Successor of `channel` in the cycle.
    #[inline]
    pub fn next(&self, channel: usize) -> usize {
        let n = self.order.len();
        self.order[(self.position[channel] + 1) % n]
    }

    /// Predecessor of `channel`, i.e. its successor in the reversed cycle.
    #[inline]
    pub fn prev(&self, channel: usize) -> usize {
        let n = self.order.len();
        self.order[(self.position[channel] + n - 1) % n]
    }

    pub fn reverse(&self) -> Self {
        let order: Vec<usize> = self.order.iter().rev().copied().collect();
        Self::new(order).expect("reversal of a permutation")
    }

    /// True when both describe the same cycle, regardless of starting point.
    pub fn same_cycle(&self, other: &Self) -> bool {
        if self.len() != other.len() {
            return false;
        }
        self.order.iter().all(|&c| self.next(c) == other.next(c))
    }
}

/// Which of the two myopic structures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PolicyKind {
    #[serde(rename = "pi1")]
    Pi1,
    #[serde(rename = "pi2")]
    Pi2,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 2] = [PolicyKind::Pi1, PolicyKind::Pi2];

    pub fn index(self) -> usize {
        match self {
            PolicyKind::Pi1 => 0,
            PolicyKind::Pi2 => 1,
        }
    }

    pub fn from_index(i: usize) -> Self {
        match i {
            0 => PolicyKind::Pi1,
            _ => PolicyKind::Pi2,
        }
    }

    pub fn other(self) -> Self {
        match self {
            PolicyKind::Pi1 => PolicyKind::Pi2,
            PolicyKind::Pi2 => PolicyKind::Pi1,
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolicyKind::Pi1 => f.write_str("pi1"),
            PolicyKind::Pi2 => f.write_str("pi2"),
        }
    }
}

/// The policy a parameter-aware player would run: `Pi1` for positively
/// correlated channels, `Pi2` for negatively correlated ones. Ties go to
/// `Pi1`; both earn the same there.
pub fn genie_kind(p: &TransitionMatrix) -> PolicyKind {
    match p.correlation_sign() {
        Correlation::Negative => PolicyKind::Pi2,
        Correlation::Positive | Correlation::Zero => PolicyKind::Pi1,
    }
}

/// Channels sorted by ascending belief; ties by ascending index.
pub fn initial_order(belief: &BeliefVector) -> CircularOrder {
    let omega = belief.as_slice();
    let mut order: Vec<usize> = (0..omega.len()).collect();
    order.sort_by(|&a, &b| omega[a].total_cmp(&omega[b]).then(a.cmp(&b)));
    CircularOrder::new(order).expect("sorted indices form a permutation")
}

/// Channel with the largest belief; ties by ascending index.
pub fn first_action(belief: &BeliefVector) -> usize {
    let omega = belief.as_slice();
    let mut best = 0;
    for (i, &w) in omega.iter().enumerate().skip(1) {
        if w > omega[best] {
            best = i;
        }
    }
    best
}

/// Myopic sensing automaton. `current` is the channel to sense at the next
/// step and `t` the (1-based) internal time of that step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MyopicPolicy {
    kind: PolicyKind,
    kappa1: CircularOrder,
    reversed: CircularOrder,
    current: usize,
    t: u64,
}

impl MyopicPolicy {
    pub fn new(kind: PolicyKind, kappa1: CircularOrder, current: usize) -> Self {
        assert!(current < kappa1.len(), "channel {current} out of range");
        let reversed = kappa1.reverse();
        Self {
            kind,
            kappa1,
            reversed,
            current,
            t: 1,
        }
    }

    /// Initialize from the belief, or from the identity order and channel 0
    /// when no belief is known.
    pub fn from_belief(kind: PolicyKind, belief: Option<&BeliefVector>, channels: usize) -> Self {
        match belief {
            Some(b) => Self::new(kind, initial_order(b), first_action(b)),
            None => Self::new(kind, CircularOrder::identity(channels), 0),
        }
    }

    pub fn kind(&self) -> PolicyKind {
        self.kind
    }

    pub fn current(&self) -> usize {
        self.current
    }

    pub fn time(&self) -> u64 {
        self.t
    }

    pub fn kappa1(&self) -> &CircularOrder {
        &self.kappa1
    }

    /// Order in force at internal time `t`.
    pub fn effective_order(&self, t: u64) -> &CircularOrder {
        match self.kind {
            PolicyKind::Pi2 if t.is_multiple_of(2) => &self.reversed,
            _ => &self.kappa1,
        }
    }

    /// Feed the sensed state of `current` and return the channel for the next
    /// step.
    pub fn observe(&mut self, observation: u8) -> usize {
        self.t += 1;
        let switch = match self.kind {
            PolicyKind::Pi1 => observation == 0,
            PolicyKind::Pi2 => observation == 1,
        };
        if switch {
            self.current = self.effective_order(self.t).next(self.current);
        }
        self.current
    }
}
