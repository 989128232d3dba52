//! Monte Carlo plumbing: ordered parallel trials and deterministic summaries.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Runs `f(trial)` for every trial index; results come back in index order,
/// so any reduction over them is independent of scheduling.
pub fn run_trials<T: Send, F: Fn(u64) -> T + Sync + Send>(trials: u64, f: F) -> Vec<T> {
    (0..trials).into_par_iter().map(f).collect()
}

/// Pairwise summation.
pub fn pairwise_sum(x: &[f64]) -> f64 {
    if x.len() <= 16 {
        return x.iter().sum();
    }
    let (a, b) = x.split_at(x.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MeanStderr {
    pub mean: f64,
    pub stderr: f64,
    pub n: usize,
}

impl MeanStderr {
    pub fn of(x: &[f64]) -> Self {
        let n = x.len();
        if n == 0 {
            return Self::default();
        }
        let mean = pairwise_sum(x) / n as f64;
        if n == 1 {
            return Self {
                mean,
                stderr: 0.0,
                n,
            };
        }
        let dev: Vec<f64> = x.iter().map(|v| (v - mean) * (v - mean)).collect();
        let var = pairwise_sum(&dev) / (n - 1) as f64;
        Self {
            mean,
            stderr: (var / n as f64).sqrt(),
            n,
        }
    }

    /// |a - b| and √(se_a² + se_b²).
    pub fn difference(&self, other: &Self) -> (f64, f64) {
        (
            (self.mean - other.mean).abs(),
            self.stderr.hypot(other.stderr),
        )
    }
}
