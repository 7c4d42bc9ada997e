//! Brute-force reference implementations used by the oracle and acceptance
//! suites.

use rand::Rng;
use rmab_core::{BlockSchedule, MyopicPolicy, PolicyKind};

/// `G(n)` straight from the definition: scan cumulative sums from the start.
pub fn brute_force_g(lengths: &[u64], n: u64) -> u64 {
    let mut total = 0;
    for &k in lengths {
        total += k;
        if total >= n {
            return k;
        }
    }
    panic!("schedule prefix too short for n = {n}");
}

/// Enough of the schedule to cover `max_n` slots.
pub fn schedule_prefix(schedule: &BlockSchedule, max_n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut total = 0;
    for i in 1.. {
        let k = schedule.k(i);
        out.push(k);
        total += k;
        if total >= max_n {
            break;
        }
    }
    out
}

/// Random 0/1 observation sequence.
pub fn random_bits<R: Rng>(rng: &mut R, len: usize, p_one: f64) -> Vec<u8> {
    (0..len)
        .map(|_| u8::from(rng.random::<f64>() < p_one))
        .collect()
}

/// Runs `policy` on `observations` and returns the channel sensed at each step.
pub fn action_sequence(mut policy: MyopicPolicy, observations: &[u8]) -> Vec<usize> {
    let mut actions = Vec::with_capacity(observations.len() + 1);
    actions.push(policy.current());
    for &y in observations {
        actions.push(policy.observe(y));
    }
    actions
}

/// Stay on 1; on 0 move to the channel whose last visit is oldest. Channels
/// never visited count as oldest, in order of `fallback`.
pub struct LongestAgo {
    last_visit: Vec<Option<u64>>,
    current: usize,
    t: u64,
}

impl LongestAgo {
    pub fn new(channels: usize, first: usize) -> Self {
        let mut last_visit = vec![None; channels];
        last_visit[first] = Some(1);
        Self {
            last_visit,
            current: first,
            t: 1,
        }
    }

    pub fn all_visited(&self) -> bool {
        self.last_visit.iter().all(Option::is_some)
    }

    pub fn observe(&mut self, y: u8, fallback: impl Fn() -> usize) -> usize {
        self.t += 1;
        if y == 0 {
            self.current = if self.all_visited() {
                (0..self.last_visit.len())
                    .min_by_key(|&c| self.last_visit[c].unwrap())
                    .unwrap()
            } else {
                fallback()
            };
        }
        self.last_visit[self.current] = Some(self.t);
        self.current
    }
}

/// Two channels: stay on 0, switch on 1.
pub fn stay_on_zero_n2(first: usize, observations: &[u8]) -> Vec<usize> {
    let mut current = first;
    let mut actions = vec![current];
    for &y in observations {
        if y == 1 {
            current = 1 - current;
        }
        actions.push(current);
    }
    actions
}

/// Reading of the verbal description of the second policy: on a 1, move to
/// the most recently visited channel among those whose last visit was an even
/// number of steps before the next step. Returns `None` when no channel
/// qualifies.
pub fn verbal_pi2_target(last_visit: &[Option<u64>], current: usize, next_t: u64) -> Option<usize> {
    (0..last_visit.len())
        .filter(|&c| c != current)
        .filter_map(|c| last_visit[c].map(|s| (c, s)))
        .filter(|&(_, s)| (next_t - s).is_multiple_of(2))
        .max_by_key(|&(c, s)| (s, std::cmp::Reverse(c)))
        .map(|(c, _)| c)
}

pub fn kind_name(kind: PolicyKind) -> &'static str {
    match kind {
        PolicyKind::Pi1 => "pi1",
        PolicyKind::Pi2 => "pi2",
    }
}
