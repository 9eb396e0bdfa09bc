//! The three reward functions: simple, relative and comparative difference.
//!
//! The comparative reward places two zero-reward points symmetrically around the actual
//! price at distance `l`, where `l` is how far the previous prediction, moved by the day's
//! actual rate of change, lands from today's actual price. Inside that band the reward is
//! positive and peaks at 100 when the prediction is exact.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// `l` below `DEGENERATE_L_RATIO * ap_t` is treated as zero.
pub const DEGENERATE_L_RATIO: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RewardError {
    #[error("actual price must be positive, got {0}")]
    NonPositiveActual(f64),
    #[error("previous actual price must be positive, got {0}")]
    NonPositivePrevious(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RewardKind {
    Sdr,
    Rdr,
    Cdr,
}

impl RewardKind {
    pub const ALL: [RewardKind; 3] = [RewardKind::Sdr, RewardKind::Rdr, RewardKind::Cdr];

    pub fn name(self) -> &'static str {
        match self {
            RewardKind::Sdr => "sdr",
            RewardKind::Rdr => "rdr",
            RewardKind::Cdr => "cdr",
        }
    }
}

impl fmt::Display for RewardKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RewardKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RewardKind::ALL
            .into_iter()
            .find(|k| k.name() == s.to_ascii_lowercase())
            .ok_or_else(|| format!("unknown reward `{s}` (expected sdr|rdr|cdr)"))
    }
}

/// `-|ap - pp|`
pub fn reward_sdr(ap: f64, pp: f64) -> f64 {
    -(ap - pp).abs()
}

/// `-|ap - pp| / ap * 100`
pub fn reward_rdr(ap: f64, pp: f64) -> Result<f64, RewardError> {
    if !(ap > 0.0) {
        return Err(RewardError::NonPositiveActual(ap));
    }
    Ok(-(ap - pp).abs() / ap * 100.0)
}

/// The two zero-reward points around the actual price.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroRewardGeometry {
    /// Actual rate of change from the previous day.
    pub alpha: f64,
    pub l: f64,
    pub zr1: f64,
    pub zr2: f64,
}

/// Comparative-reward band for one step. `Degenerate` means the previous prediction,
/// moved by the actual rate of change, hit today's price (so `l` is zero).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CdrBand {
    Triangle(ZeroRewardGeometry),
    Degenerate { alpha: f64, tolerance: f64 },
}

impl CdrBand {
    pub fn geometry(&self) -> Option<&ZeroRewardGeometry> {
        match self {
            CdrBand::Triangle(g) => Some(g),
            CdrBand::Degenerate { .. } => None,
        }
    }
}

pub fn zero_reward_points(ap_t: f64, ap_prev: f64, pp_prev: f64) -> Result<CdrBand, RewardError> {
    if !(ap_prev > 0.0) {
        return Err(RewardError::NonPositivePrevious(ap_prev));
    }
    let alpha = (ap_t - ap_prev) / ap_prev;
    let projected = pp_prev * (1.0 + alpha);
    let l = (ap_t - projected).abs();
    let tolerance = DEGENERATE_L_RATIO * ap_t.abs();
    if l < tolerance || l == 0.0 {
        return Ok(CdrBand::Degenerate { alpha, tolerance });
    }
    Ok(CdrBand::Triangle(ZeroRewardGeometry {
        alpha,
        l,
        zr1: ap_t - l,
        zr2: ap_t + l,
    }))
}

/// Comparative difference reward. For a degenerate band the reward is 100 on an exact hit
/// and the relative difference reward otherwise. `ap` must be positive.
pub fn reward_cdr(band: &CdrBand, ap: f64, pp: f64) -> f64 {
    match band {
        CdrBand::Triangle(g) => {
            if pp <= ap {
                (pp - g.zr1) / (ap - g.zr1) * 100.0
            } else {
                (pp - g.zr2) / (ap - g.zr2) * 100.0
            }
        }
        CdrBand::Degenerate { tolerance, .. } => {
            if (pp - ap).abs() <= *tolerance {
                100.0
            } else {
                -(ap - pp).abs() / ap.abs() * 100.0
            }
        }
    }
}
