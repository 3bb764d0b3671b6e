//! Monte Carlo replication and the estimate type shared by all estimators.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngSpec;

/// Value in nats with its Monte Carlo standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiEstimate {
    pub value: f64,
    pub stderr: f64,
    pub replicas: usize,
    pub master_seed: u64,
}

impl DiEstimate {
    pub fn exact(value: f64, master_seed: u64) -> Self {
        Self { value, stderr: 0.0, replicas: 0, master_seed }
    }

    /// Mean and standard error of the replica values, summed in replica order.
    pub fn from_samples(samples: &[f64], master_seed: u64) -> Self {
        let n = samples.len();
        let mean = samples.iter().sum::<f64>() / n as f64;
        let stderr = if n > 1 {
            let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        } else {
            f64::NAN
        };
        Self { value: mean, stderr, replicas: n, master_seed }
    }

    /// `|value - target| <= max(rel·|target|, k·stderr)`.
    pub fn agrees_with(&self, target: f64, rel: f64, k_sigma: f64) -> bool {
        let tol = (rel * target.abs()).max(k_sigma * self.stderr);
        (self.value - target).abs() <= tol
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McConfig {
    pub replicas: usize,
}

impl McConfig {
    pub fn new(replicas: usize) -> Self {
        Self { replicas }
    }
}

/// Runs `f(replica, rng)` for every replica in parallel and returns the values
/// in replica order. Output does not depend on the number of worker threads.
pub fn run_replicas<F>(mc: McConfig, rng: RngSpec, f: F) -> Result<Vec<f64>>
where
    F: Fn(u64, &mut rand_chacha::ChaCha8Rng) -> Result<f64> + Sync,
{
    if mc.replicas == 0 {
        return Err(Error::Domain("need at least one replica".into()));
    }
    (0..mc.replicas as u64)
        .into_par_iter()
        .map(|r| {
            let mut stream = rng.stream(r);
            f(r, &mut stream)
        })
        .collect()
}

/// [`run_replicas`] followed by the mean/stderr reduction.
pub fn estimate<F>(mc: McConfig, rng: RngSpec, f: F) -> Result<DiEstimate>
where
    F: Fn(u64, &mut rand_chacha::ChaCha8Rng) -> Result<f64> + Sync,
{
    let samples = run_replicas(mc, rng, f)?;
    Ok(DiEstimate::from_samples(&samples, rng.master_seed))
}
