//! Constants of the near-logarithmic regret bound
//! `R(n) <= Z1 G(n) ln n + Z2 ln n + Z3 G(n) + Z4`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::chain::{DeviationMethod, SteadyConstants};
use crate::channel::TransitionMatrix;
use crate::error::{Error, Result};
use crate::schedule::BlockSchedule;

/// Exploration constant must exceed this.
pub const MIN_EXPLORATION: f64 = 2.0;

/// Sample-count thresholds for one orientation of the proof (which policy is
/// treated as optimal).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub w1: f64,
    pub w2: f64,
    pub alpha: u64,
    pub beta: u64,
    /// Integer valued, but can exceed the `u64` range: it grows like
    /// `e^{4 alpha / L}`.
    pub gamma: f64,
}

/// Every constant of the bound, computed from `U_i`, `C_i`, the schedule and
/// the exploration constant `L`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundConstants {
    pub steady: SteadyConstants,
    pub exploration: f64,
    /// `ceil((C1 + C2) / |U1 - U2|)`.
    pub ratio_ceiling: u64,
    /// Block length `K_q` must reach this.
    pub required_block: f64,
    pub q: u64,
    pub kq: u64,
    /// `pi1` optimal (`gamma`).
    pub primary: Thresholds,
    /// `pi2` optimal (`gamma'`).
    pub mirrored: Thresholds,
    /// `max_i (U_i + C_i/K_q) / (U_i - C_i/K_q)`.
    pub max_inflation: f64,
    /// `|U1 - U2| - (C1 + C2) / K_q`.
    pub effective_gap: f64,
    pub z1: f64,
    pub z2: f64,
    pub z3: f64,
    pub z4: f64,
}

fn ceil_u64(x: f64, what: &str) -> Result<u64> {
    if !x.is_finite() || x < 0.0 || x >= 2f64.powi(53) {
        return Err(Error::DegenerateBound(format!("{what} = {x} out of range")));
    }
    Ok(x.ceil() as u64)
}

fn finite_ceiling(x: f64, what: &str) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::DegenerateBound(format!("{what} overflows")));
    }
    Ok(x.ceil())
}

/// `ceil(w / (sqrt L - sqrt 2))^2`, the ceiling taken before squaring.
fn squared_ceiling(w: f64, exploration: f64) -> Result<u64> {
    let c = (w / (exploration.sqrt() - 2f64.sqrt())).ceil();
    ceil_u64(c * c, "squared threshold")
}

fn inflation(u: f64, c: f64, kq: f64) -> Result<f64> {
    let lower = u - c / kq;
    if lower <= 0.0 {
        return Err(Error::DegenerateBound(format!(
            "U - C/K_q = {lower} is not positive"
        )));
    }
    Ok((u + c / kq) / lower)
}

fn thresholds(
    u_best: f64,
    c_best: f64,
    u_other: f64,
    c_other: f64,
    q: u64,
    kq: f64,
    exploration: f64,
) -> Result<Thresholds> {
    let qf = q as f64;
    let w1 = qf * (u_best - c_best / kq);
    let up = u_other + c_other / kq;
    let w2 = qf * (u_other - c_other / kq) / up * (up - 1.0);
    let alpha = q.max(squared_ceiling(w1, exploration)?);
    let beta = q.max(squared_ceiling(w2, exploration)?);
    let (a, b) = (alpha as f64, beta as f64);
    let gamma = [
        5.0 * a + 1.0,
        (4.0 * a / exploration).exp() + a,
        5.0 * b + 1.0,
        (4.0 * b / exploration).exp() + b,
    ]
    .into_iter()
    .fold(f64::MIN, f64::max);
    Ok(Thresholds {
        w1,
        w2,
        alpha,
        beta,
        gamma: finite_ceiling(gamma, "gamma")?,
    })
}

impl BoundConstants {
    pub fn from_steady(
        steady: SteadyConstants,
        schedule: &BlockSchedule,
        exploration: f64,
    ) -> Result<Self> {
        if exploration.is_nan() || exploration <= MIN_EXPLORATION {
            return Err(Error::ExplorationConstant(exploration));
        }
        let SteadyConstants { u1, u2, c1, c2 } = steady;
        let gap = (u1 - u2).abs();
        if gap < 1e-12 {
            return Err(Error::BoundUndefinedIid);
        }
        if u1 <= 0.0 || u2 <= 0.0 {
            return Err(Error::DegenerateBound("zero steady throughput".into()));
        }
        let ratio_ceiling = ceil_u64((c1 + c2) / gap, "(C1 + C2) / |U1 - U2|")?;
        let required_block = (ratio_ceiling as f64).max(c2 / u2).max(c1 / u1);

        let (q, kq) = match schedule.supremum() {
            Some(max_k) if (max_k as f64) < required_block => {
                return Err(Error::QUnreachable {
                    max_k,
                    required: required_block,
                })
            }
            _ => schedule
                .blocks()
                .find(|&(_, k, _)| k as f64 >= required_block)
                .map(|(i, k, _)| (i, k))
                .expect("divergent schedule reaches every level"),
        };
        let kqf = kq as f64;

        let max_inflation = inflation(u1, c1, kqf)?.max(inflation(u2, c2, kqf)?);
        let effective_gap = gap - (c1 + c2) / kqf;
        if effective_gap <= 0.0 {
            return Err(Error::DegenerateBound(format!(
                "|U1 - U2| - (C1 + C2)/K_q = {effective_gap} is not positive"
            )));
        }

        let primary = thresholds(u1, c1, u2, c2, q, kqf, exploration)?;
        let mirrored = thresholds(u2, c2, u1, c1, q, kqf, exploration)?;

        let c_max = c1.max(c2);
        let c_total = c1 + c2 + c_max;
        let log_factor =
            exploration * (1.0 + max_inflation).powi(2) / (effective_gap * effective_gap);
        let constant_factor = 1.0 + primary.gamma.max(mirrored.gamma) + PI * PI / 3.0;

        Ok(Self {
            steady,
            exploration,
            ratio_ceiling,
            required_block,
            q,
            kq,
            primary,
            mirrored,
            max_inflation,
            effective_gap,
            z1: gap * log_factor,
            z2: c_total * log_factor,
            z3: gap * constant_factor + 1.0,
            z4: c_total * constant_factor + c_max,
        })
    }

    pub fn gamma(&self) -> f64 {
        self.primary.gamma
    }

    pub fn gamma_prime(&self) -> f64 {
        self.mirrored.gamma
    }

    /// `c_{t,s} = sqrt(L ln t / s)`.
    pub fn confidence_radius(&self, t: f64, s: f64) -> f64 {
        (self.exploration * t.ln() / s).sqrt()
    }

    /// Number of inferior-arm selections after which a UCB comparison can no
    /// longer favor it: `ceil(L (1 + r)^2 ln n / (|U1 - U2| - (C1 + C2)/K_q)^2)`,
    /// `r` being the inflation ratio of the inferior policy.
    pub fn lambda(&self, n: u64) -> u64 {
        let SteadyConstants { u1, u2, c1, c2 } = self.steady;
        let kq = self.kq as f64;
        let (u_inf, c_inf) = if u1 >= u2 { (u2, c2) } else { (u1, c1) };
        let r = (u_inf + c_inf / kq) / (u_inf - c_inf / kq);
        (self.exploration * (1.0 + r).powi(2) * (n as f64).ln()
            / (self.effective_gap * self.effective_gap))
            .ceil() as u64
    }

    /// `Z1 G ln n + Z2 ln n + Z3 G + Z4` for a given `G = G(n)`.
    pub fn bound_with_g(&self, g: u64, n: u64) -> f64 {
        let ln_n = (n as f64).ln();
        let g = g as f64;
        self.z1 * g * ln_n + self.z2 * ln_n + self.z3 * g + self.z4
    }
}

/// Bound constants for `P`, using numerically computed `U_i` and truncated
/// series `C_i`.
pub fn bound_constants(
    p: &TransitionMatrix,
    schedule: &BlockSchedule,
    exploration: f64,
    channels: usize,
) -> Result<BoundConstants> {
    if p.is_iid() {
        return Err(Error::BoundUndefinedIid);
    }
    let steady = SteadyConstants::compute(p, channels, DeviationMethod::TruncatedSeries)?;
    BoundConstants::from_steady(steady, schedule, exploration)
}

/// The regret bound at time `n >= 2`.
pub fn regret_bound_at(consts: &BoundConstants, schedule: &BlockSchedule, n: u64) -> f64 {
    assert!(n >= 2, "bound evaluated for n >= 2");
    consts.bound_with_g(schedule.g_of_n(n), n)
}

/// Flat summary of the chain analysis and bound constants. Fields the
/// analysis cannot produce for this input are `null`, with the reason in
/// `bound_error`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub p01: f64,
    pub p11: f64,
    #[serde(rename = "N")]
    pub channels: usize,
    #[serde(rename = "L")]
    pub exploration: f64,
    pub schedule: String,
    pub genie: String,
    #[serde(rename = "U1")]
    pub u1: Option<f64>,
    #[serde(rename = "U2")]
    pub u2: Option<f64>,
    #[serde(rename = "C1")]
    pub c1: Option<f64>,
    #[serde(rename = "C2")]
    pub c2: Option<f64>,
    /// N = 2 closed forms, for comparison.
    pub closed_form: Option<SteadyConstants>,
    pub ratio_ceiling: Option<u64>,
    pub q: Option<u64>,
    #[serde(rename = "Kq")]
    pub kq: Option<u64>,
    pub alpha: Option<u64>,
    pub beta: Option<u64>,
    pub gamma: Option<f64>,
    pub alpha_prime: Option<u64>,
    pub beta_prime: Option<u64>,
    pub gamma_prime: Option<f64>,
    #[serde(rename = "Z1")]
    pub z1: Option<f64>,
    #[serde(rename = "Z2")]
    pub z2: Option<f64>,
    #[serde(rename = "Z3")]
    pub z3: Option<f64>,
    #[serde(rename = "Z4")]
    pub z4: Option<f64>,
    pub steady_error: Option<String>,
    pub bound_error: Option<String>,
}

impl AnalysisReport {
    pub fn compute(
        p: &TransitionMatrix,
        channels: usize,
        schedule: &BlockSchedule,
        exploration: f64,
    ) -> Self {
        let mut report = Self {
            p01: p.p01(),
            p11: p.p11(),
            channels,
            exploration,
            schedule: schedule.to_string(),
            genie: crate::policy::genie_kind(p).to_string(),
            u1: None,
            u2: None,
            c1: None,
            c2: None,
            closed_form: (channels == 2 && !p.is_iid()).then(|| SteadyConstants::closed_form_n2(p)),
            ratio_ceiling: None,
            q: None,
            kq: None,
            alpha: None,
            beta: None,
            gamma: None,
            alpha_prime: None,
            beta_prime: None,
            gamma_prime: None,
            z1: None,
            z2: None,
            z3: None,
            z4: None,
            steady_error: None,
            bound_error: None,
        };
        for kind in crate::policy::PolicyKind::ALL {
            match crate::chain::steady_throughput(p, channels, kind) {
                Ok(u) => match kind {
                    crate::policy::PolicyKind::Pi1 => report.u1 = Some(u),
                    crate::policy::PolicyKind::Pi2 => report.u2 = Some(u),
                },
                Err(e) => report.steady_error = Some(e.to_string()),
            }
        }
        let steady = match SteadyConstants::compute(p, channels, DeviationMethod::TruncatedSeries) {
            Ok(s) => s,
            Err(e) => {
                report.steady_error = Some(e.to_string());
                report.bound_error = Some(e.to_string());
                return report;
            }
        };
        report.c1 = Some(steady.c1);
        report.c2 = Some(steady.c2);
        match BoundConstants::from_steady(steady, schedule, exploration) {
            Ok(b) => {
                report.ratio_ceiling = Some(b.ratio_ceiling);
                report.q = Some(b.q);
                report.kq = Some(b.kq);
                report.alpha = Some(b.primary.alpha);
                report.beta = Some(b.primary.beta);
                report.gamma = Some(b.primary.gamma);
                report.alpha_prime = Some(b.mirrored.alpha);
                report.beta_prime = Some(b.mirrored.beta);
                report.gamma_prime = Some(b.mirrored.gamma);
                report.z1 = Some(b.z1);
                report.z2 = Some(b.z2);
                report.z3 = Some(b.z3);
                report.z4 = Some(b.z4);
            }
            Err(e) => report.bound_error = Some(e.to_string()),
        }
        report
    }
}
