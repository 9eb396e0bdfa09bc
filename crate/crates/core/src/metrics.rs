//! Prediction accuracy metrics over aligned actual (`ap`) and predicted (`pp`) series.
//!
//! Values are reported as computed: VAF, R² and NSE go negative for fits worse than the
//! mean and are never clamped.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricError {
    #[error("{metric}: series lengths differ ({actual} actual vs {predicted} predicted)")]
    LengthMismatch {
        metric: &'static str,
        actual: usize,
        predicted: usize,
    },
    #[error("{metric}: needs at least {needed} values, got {got}")]
    TooShort {
        metric: &'static str,
        needed: usize,
        got: usize,
    },
    #[error("{metric}: {reason}")]
    Undefined {
        metric: &'static str,
        reason: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub vaf: f64,
    pub r2: f64,
    pub mape: f64,
    pub nse: f64,
    pub rmse: f64,
    pub wmape: f64,
    pub n: usize,
}

impl EvalReport {
    /// Two-line aligned table: header, then values.
    pub fn to_table(&self) -> String {
        let cols = [
            ("VAF(%)", self.vaf),
            ("R2", self.r2),
            ("MAPE(%)", self.mape),
            ("NSE", self.nse),
            ("RMSE", self.rmse),
            ("WMAPE(%)", self.wmape),
        ];
        let mut head = String::new();
        let mut vals = String::new();
        for (name, v) in cols {
            head.push_str(&format!("{name:>12}"));
            vals.push_str(&format!("{v:>12.4}"));
        }
        head.push_str(&format!("{:>8}", "n"));
        vals.push_str(&format!("{:>8}", self.n));
        format!("{head}\n{vals}\n")
    }
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_table())
    }
}

fn check(metric: &'static str, ap: &[f64], pp: &[f64], min_len: usize) -> Result<(), MetricError> {
    if ap.len() != pp.len() {
        return Err(MetricError::LengthMismatch {
            metric,
            actual: ap.len(),
            predicted: pp.len(),
        });
    }
    if ap.len() < min_len {
        return Err(MetricError::TooShort {
            metric,
            needed: min_len,
            got: ap.len(),
        });
    }
    Ok(())
}

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Sample variance with divisor `n - 1`.
pub fn sample_variance(x: &[f64]) -> Result<f64, MetricError> {
    if x.len() < 2 {
        return Err(MetricError::TooShort {
            metric: "variance",
            needed: 2,
            got: x.len(),
        });
    }
    let m = mean(x);
    Ok(x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (x.len() - 1) as f64)
}

pub fn vaf(ap: &[f64], pp: &[f64]) -> Result<f64, MetricError> {
    check("vaf", ap, pp, 2)?;
    let var_ap = sample_variance(ap)?;
    if var_ap == 0.0 {
        return Err(MetricError::Undefined {
            metric: "vaf",
            reason: "actual series has zero variance".into(),
        });
    }
    let diff: Vec<f64> = ap.iter().zip(pp).map(|(a, p)| a - p).collect();
    Ok((1.0 - sample_variance(&diff)? / var_ap) * 100.0)
}

fn rss_tss(metric: &'static str, ap: &[f64], pp: &[f64]) -> Result<(f64, f64), MetricError> {
    check(metric, ap, pp, 2)?;
    let m = mean(ap);
    let rss = ap
        .iter()
        .zip(pp)
        .map(|(a, p)| (a - p) * (a - p))
        .sum::<f64>();
    let tss = ap.iter().map(|a| (a - m) * (a - m)).sum::<f64>();
    if tss == 0.0 {
        return Err(MetricError::Undefined {
            metric,
            reason: "actual series has zero total sum of squares".into(),
        });
    }
    Ok((rss, tss))
}

/// Coefficient of determination, `1 - RSS / TSS`.
pub fn r2(ap: &[f64], pp: &[f64]) -> Result<f64, MetricError> {
    let (rss, tss) = rss_tss("r2", ap, pp)?;
    Ok(1.0 - rss / tss)
}

/// Nash-Sutcliffe efficiency; the same formula as [`r2`].
pub fn nse(ap: &[f64], pp: &[f64]) -> Result<f64, MetricError> {
    let (rss, tss) = rss_tss("nse", ap, pp)?;
    Ok(1.0 - rss / tss)
}

pub fn mape(ap: &[f64], pp: &[f64]) -> Result<f64, MetricError> {
    check("mape", ap, pp, 1)?;
    if let Some(i) = ap.iter().position(|&a| a == 0.0) {
        return Err(MetricError::Undefined {
            metric: "mape",
            reason: format!("actual value {i} is zero"),
        });
    }
    let sum: f64 = ap
        .iter()
        .zip(pp)
        .map(|(a, p)| (a - p).abs() / a.abs())
        .sum();
    Ok(sum / ap.len() as f64 * 100.0)
}

pub fn rmse(ap: &[f64], pp: &[f64]) -> Result<f64, MetricError> {
    check("rmse", ap, pp, 1)?;
    let rss: f64 = ap.iter().zip(pp).map(|(a, p)| (a - p) * (a - p)).sum();
    Ok((rss / ap.len() as f64).sqrt())
}

pub fn wmape(ap: &[f64], pp: &[f64]) -> Result<f64, MetricError> {
    check("wmape", ap, pp, 1)?;
    let total: f64 = ap.iter().sum();
    if total == 0.0 {
        return Err(MetricError::Undefined {
            metric: "wmape",
            reason: "actual values sum to zero".into(),
        });
    }
    let abs_err: f64 = ap.iter().zip(pp).map(|(a, p)| (a - p).abs()).sum();
    Ok(abs_err / total * 100.0)
}

pub fn evaluate(ap: &[f64], pp: &[f64]) -> Result<EvalReport, MetricError> {
    Ok(EvalReport {
        vaf: vaf(ap, pp)?,
        r2: r2(ap, pp)?,
        mape: mape(ap, pp)?,
        nse: nse(ap, pp)?,
        rmse: rmse(ap, pp)?,
        wmape: wmape(ap, pp)?,
        n: ap.len(),
    })
}
