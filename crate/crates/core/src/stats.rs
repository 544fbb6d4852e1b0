//! Sample summaries for Monte-Carlo estimates.

use serde::{Deserialize, Serialize};

/// Mean and standard error of the mean of `n` samples.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub stderr: f64,
    pub n: usize,
}

impl Summary {
    /// Summarize in slice order; with `n = 1` the standard error is 0.
    pub fn of(samples: &[f64]) -> Self {
        let n = samples.len();
        if n == 0 {
            return Self { mean: f64::NAN, stderr: f64::NAN, n };
        }
        let mean = samples.iter().sum::<f64>() / n as f64;
        let stderr = if n > 1 {
            let ss: f64 = samples.iter().map(|x| (x - mean) * (x - mean)).sum();
            (ss / (n - 1) as f64).sqrt() / (n as f64).sqrt()
        } else {
            0.0
        };
        Self { mean, stderr, n }
    }

    /// `|mean - target| ≤ nsig·stderr`, plus a floor for estimates that are
    /// exact up to rounding.
    pub fn agrees_with(&self, target: f64, nsig: f64) -> bool {
        (self.mean - target).abs() <= nsig * self.stderr + slack(target)
    }

    /// `mean ≥ target - nsig·stderr`, with the same floor.
    pub fn at_least(&self, target: f64, nsig: f64) -> bool {
        self.mean >= target - nsig * self.stderr - slack(target)
    }
}

fn slack(target: f64) -> f64 {
    1e-9 * target.abs().max(1.0)
}

/// Sample variance together with the standard error of that estimate,
/// from the spread of the squared deviations.
pub fn variance_summary(samples: &[f64]) -> Summary {
    let n = samples.len();
    let mean = samples.iter().sum::<f64>() / n as f64;
    let sq: Vec<f64> = samples.iter().map(|x| (x - mean) * (x - mean)).collect();
    let mut s = Summary::of(&sq);
    if n > 1 {
        s.mean *= n as f64 / (n - 1) as f64;
        s.stderr *= n as f64 / (n - 1) as f64;
    }
    s
}
