use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::metrics::{compensated_sum, mean};
use crate::error::{Error, Result};

/// Percentile bootstrap interval for a mean.
#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapCI {
    pub level: f64,
    pub replicates: usize,
    pub seed: u64,
    pub lower: f64,
    pub upper: f64,
    pub point: f64,
}

pub const DEFAULT_REPLICATES: usize = 1000;

/// Resamples the per-window errors with replacement `replicates` times and
/// takes the empirical `(1-level)/2` and `(1+level)/2` quantiles of the
/// resampled means. Replicate `b` draws from its own ChaCha stream `b`, so the
/// result does not depend on evaluation order.
pub fn bootstrap_ci(errors: &[f64], level: f64, replicates: usize, seed: u64) -> Result<BootstrapCI> {
    if errors.is_empty() {
        return Err(Error::Data("bootstrap needs at least one error value".into()));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::Config(format!("confidence level {level} must be in (0, 1)")));
    }
    if replicates == 0 {
        return Err(Error::Config("bootstrap needs at least one replicate".into()));
    }
    if replicates < 100 {
        log::warn!("only {replicates} bootstrap replicates; percentiles will be coarse");
    }
    let n = errors.len();
    let mut means: Vec<f64> = (0..replicates)
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            compensated_sum((0..n).map(|_| errors[rng.random_range(0..n)])) / n as f64
        })
        .collect();
    means.sort_by(f64::total_cmp);
    let alpha = (1.0 - level) / 2.0;
    Ok(BootstrapCI {
        level,
        replicates,
        seed,
        lower: quantile_sorted(&means, alpha),
        upper: quantile_sorted(&means, 1.0 - alpha),
        point: mean(errors),
    })
}

/// Linear interpolation between order statistics at `q * (n - 1)`.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}
