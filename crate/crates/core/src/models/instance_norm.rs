use crate::error::{Error, Result};
use crate::nnkernel::Tensor2;

pub const INSTANCE_NORM_EPS: f64 = 1e-5;

/// Per-channel statistics of one lookback window.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceNormState {
    pub mu: Vec<f64>,
    pub sigma: Vec<f64>,
    pub eps: f64,
}

impl InstanceNormState {
    pub fn scale(&self, channel: usize) -> f64 {
        self.sigma[channel] + self.eps
    }
}

/// `(x - mu) / (sigma + eps)` per channel, with population std.
pub fn instance_normalize(window: &Tensor2) -> Result<(Tensor2, InstanceNormState)> {
    let (l, c) = window.shape();
    if l < 2 {
        return Err(Error::Config(format!(
            "instance norm needs at least 2 timesteps, got {l}"
        )));
    }
    let mut mu = vec![0.0; c];
    let mut sigma = vec![0.0; c];
    for r in 0..l {
        for (m, v) in mu.iter_mut().zip(window.row(r)) {
            *m += v;
        }
    }
    mu.iter_mut().for_each(|m| *m /= l as f64);
    for r in 0..l {
        for ((s, v), m) in sigma.iter_mut().zip(window.row(r)).zip(&mu) {
            *s += (v - m) * (v - m);
        }
    }
    sigma.iter_mut().for_each(|s| *s = (*s / l as f64).sqrt());
    let state = InstanceNormState {
        mu,
        sigma,
        eps: INSTANCE_NORM_EPS,
    };
    let mut out = window.clone();
    for r in 0..l {
        for (ch, v) in out.row_mut(r).iter_mut().enumerate() {
            *v = (*v - state.mu[ch]) / state.scale(ch);
        }
    }
    Ok((out, state))
}

pub fn instance_denormalize(forecast: &Tensor2, state: &InstanceNormState) -> Result<Tensor2> {
    if forecast.cols() != state.mu.len() {
        return Err(Error::dim(
            "instance_denormalize",
            forecast.shape(),
            (forecast.rows(), state.mu.len()),
        ));
    }
    let mut out = forecast.clone();
    for r in 0..out.rows() {
        for (ch, v) in out.row_mut(r).iter_mut().enumerate() {
            *v = *v * state.scale(ch) + state.mu[ch];
        }
    }
    Ok(out)
}
