use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("cannot summarize an empty sample")]
pub struct EmptySample;

/// Mean, sample standard deviation, standard error and the 95% normal
/// interval `mean ± 1.96 · stderr`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub mean: f64,
    pub sd: f64,
    pub stderr: f64,
    pub count: usize,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Set when `count == 1`, where `sd` is reported as zero.
    pub single_value: bool,
}

pub fn summarize(values: &[f64]) -> Result<SummaryStats, EmptySample> {
    let n = values.len();
    if n == 0 {
        return Err(EmptySample);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let sd = if n > 1 {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    let stderr = sd / (n as f64).sqrt();
    Ok(SummaryStats {
        mean,
        sd,
        stderr,
        count: n,
        ci_low: mean - 1.96 * stderr,
        ci_high: mean + 1.96 * stderr,
        single_value: n == 1,
    })
}

impl SummaryStats {
    /// `sd / |mean|`.
    pub fn coefficient_of_variation(&self) -> f64 {
        self.sd / self.mean.abs()
    }
}

/// Least-squares slope of `y` on `x`.
pub fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    if x.len() < 2 {
        return 0.0;
    }
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}
