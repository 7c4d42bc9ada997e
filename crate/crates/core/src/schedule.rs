//! Block-length schedules `K_1, K_2, ...` and the block length in force at a
//! given time step, `G(n)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A non-decreasing sequence of positive block lengths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BlockSchedule {
    /// `K_i = ceil(offset + scale * ln^(depth)(i + 2))`, where `ln^(d)` is the
    /// `d`-fold iterated natural log. Clamped below at 1.
    AffineLog { offset: f64, scale: f64, depth: u32 },
    /// `K_i = first + step * (i - 1)`.
    Linear { first: u64, step: u64 },
    /// Explicit prefix; the last entry repeats forever, so this is bounded.
    Table { values: Vec<u64> },
}

impl BlockSchedule {
    /// `ceil(100 + ln(n + 2))`.
    pub fn k1() -> Self {
        Self::affine_log(100.0, 1.0, 1)
    }

    /// `ceil(100 + ln(ln(n + 2)))`.
    pub fn k2() -> Self {
        Self::affine_log(100.0, 1.0, 2)
    }

    /// `ceil(100 + ln(ln(ln(n + 2))))`.
    pub fn k3() -> Self {
        Self::affine_log(100.0, 1.0, 3)
    }

    pub fn affine_log(offset: f64, scale: f64, depth: u32) -> Self {
        BlockSchedule::AffineLog {
            offset,
            scale,
            depth,
        }
    }

    pub fn builtins() -> [(&'static str, BlockSchedule); 3] {
        [("k1", Self::k1()), ("k2", Self::k2()), ("k3", Self::k3())]
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            BlockSchedule::AffineLog {
                offset,
                scale,
                depth,
            } => {
                if !offset.is_finite() || !scale.is_finite() || *scale < 0.0 {
                    return Err(Error::Schedule(format!(
                        "affine-log needs finite offset and scale >= 0 (got {offset}, {scale})"
                    )));
                }
                if *depth > 3 {
                    return Err(Error::Schedule(format!(
                        "iterated log depth {depth} > 3 is undefined at small n"
                    )));
                }
            }
            BlockSchedule::Linear { first, .. } => {
                if *first == 0 {
                    return Err(Error::Schedule("linear schedule needs first >= 1".into()));
                }
            }
            BlockSchedule::Table { values } => {
                if values.is_empty() || values[0] == 0 {
                    return Err(Error::Schedule("table needs positive entries".into()));
                }
                if values.windows(2).any(|w| w[1] < w[0]) {
                    return Err(Error::Schedule("table must be non-decreasing".into()));
                }
            }
        }
        Ok(())
    }

    /// Whether the sequence grows without bound.
    pub fn is_divergent(&self) -> bool {
        match self {
            BlockSchedule::AffineLog { scale, .. } => *scale > 0.0,
            BlockSchedule::Linear { step, .. } => *step > 0,
            BlockSchedule::Table { .. } => false,
        }
    }

    /// Upper bound of a non-divergent schedule.
    pub fn supremum(&self) -> Option<u64> {
        if self.is_divergent() {
            return None;
        }
        Some(match self {
            BlockSchedule::AffineLog { .. } | BlockSchedule::Linear { .. } => self.k(1),
            BlockSchedule::Table { values } => *values.last().unwrap_or(&1),
        })
    }

    /// Block length `K_i` for 1-based block index `i`.
    pub fn k(&self, i: u64) -> u64 {
        assert!(i >= 1, "block indices start at 1");
        match self {
            BlockSchedule::AffineLog {
                offset,
                scale,
                depth,
            } => {
                let mut x = (i + 2) as f64;
                for _ in 0..*depth {
                    x = x.ln();
                }
                let v = (offset + scale * x).ceil();
                if v >= 1.0 {
                    v as u64
                } else {
                    1
                }
            }
            BlockSchedule::Linear { first, step } => first + step * (i - 1),
            BlockSchedule::Table { values } => {
                let idx = (i as usize - 1).min(values.len() - 1);
                values[idx]
            }
        }
    }

    /// Iterator over `(i, K_i, K_1 + ... + K_i)`.
    pub fn blocks(&self) -> Blocks<'_> {
        Blocks {
            schedule: self,
            index: 0,
            end: 0,
        }
    }

    /// `G(n)`: `K_I` for the smallest `I` with `K_1 + ... + K_I >= n`.
    pub fn g_of_n(&self, n: u64) -> u64 {
        assert!(n >= 1, "G(n) defined for n >= 1");
        self.blocks()
            .find(|&(_, _, end)| end >= n)
            .map(|(_, k, _)| k)
            .expect("block ends grow without bound")
    }
}

impl Default for BlockSchedule {
    fn default() -> Self {
        Self::k1()
    }
}

pub struct Blocks<'a> {
    schedule: &'a BlockSchedule,
    index: u64,
    end: u64,
}

impl Iterator for Blocks<'_> {
    type Item = (u64, u64, u64);

    fn next(&mut self) -> Option<Self::Item> {
        self.index += 1;
        let k = self.schedule.k(self.index);
        self.end += k;
        Some((self.index, k, self.end))
    }
}

/// Precomputed block boundaries for repeated `G(n)` queries up to `max_n`.
#[derive(Debug, Clone)]
pub struct GTable {
    ends: Vec<u64>,
    lengths: Vec<u64>,
}

impl GTable {
    pub fn new(schedule: &BlockSchedule, max_n: u64) -> Self {
        let mut ends = Vec::new();
        let mut lengths = Vec::new();
        for (_, k, end) in schedule.blocks() {
            ends.push(end);
            lengths.push(k);
            if end >= max_n {
                break;
            }
        }
        Self { ends, lengths }
    }

    pub fn max_n(&self) -> u64 {
        *self.ends.last().unwrap_or(&0)
    }

    pub fn g(&self, n: u64) -> u64 {
        assert!(n >= 1 && n <= self.max_n(), "n = {n} outside table");
        self.lengths[self.ends.partition_point(|&e| e < n)]
    }
}

impl fmt::Display for BlockSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BlockSchedule::AffineLog {
                offset,
                scale,
                depth,
            } if *offset == 100.0 && *scale == 1.0 && (1..=3).contains(depth) => {
                write!(f, "k{depth}")
            }
            BlockSchedule::AffineLog {
                offset,
                scale,
                depth,
            } => write!(f, "affine:{offset}:{scale}:{depth}"),
            BlockSchedule::Linear { first, step } => write!(f, "linear:{first}:{step}"),
            BlockSchedule::Table { values } => {
                let parts: Vec<String> = values.iter().map(u64::to_string).collect();
                write!(f, "table:{}", parts.join(","))
            }
        }
    }
}

impl FromStr for BlockSchedule {
    type Err = Error;

    /// Accepts `k1`, `k2`, `k3`, `affine:OFFSET:SCALE:DEPTH`,
    /// `linear:FIRST:STEP` and `table:K1,K2,...`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Schedule(format!("cannot parse schedule `{s}`"));
        let schedule = match s.trim() {
            "k1" | "K1" => Self::k1(),
            "k2" | "K2" => Self::k2(),
            "k3" | "K3" => Self::k3(),
            other => {
                let (head, rest) = other.split_once(':').ok_or_else(bad)?;
                match head {
                    "affine" => {
                        let parts: Vec<&str> = rest.split(':').collect();
                        if parts.len() != 3 {
                            return Err(bad());
                        }
                        Self::affine_log(
                            parts[0].parse().map_err(|_| bad())?,
                            parts[1].parse().map_err(|_| bad())?,
                            parts[2].parse().map_err(|_| bad())?,
                        )
                    }
                    "linear" => {
                        let (a, b) = rest.split_once(':').ok_or_else(bad)?;
                        BlockSchedule::Linear {
                            first: a.parse().map_err(|_| bad())?,
                            step: b.parse().map_err(|_| bad())?,
                        }
                    }
                    "table" => BlockSchedule::Table {
                        values: rest
                            .split(',')
                            .map(|v| v.trim().parse().map_err(|_| bad()))
                            .collect::<Result<_>>()?,
                    },
                    _ => return Err(bad()),
                }
            }
        };
        schedule.validate()?;
        Ok(schedule)
    }
}
