use crate::error::{Error, Result};
use crate::nnkernel::Tensor2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PatchConfig {
    pub patch_len: usize,
    pub stride: usize,
}

impl PatchConfig {
    pub fn new(patch_len: usize, stride: usize) -> Self {
        Self { patch_len, stride }
    }

    pub fn validate(&self, lookback: usize) -> Result<()> {
        if self.stride == 0 || self.stride > self.patch_len || self.patch_len > lookback {
            return Err(Error::Config(format!(
                "patching needs 1 <= stride ({}) <= patch_len ({}) <= lookback ({lookback})",
                self.stride, self.patch_len
            )));
        }
        Ok(())
    }

    /// `floor((L - P) / S) + 1`
    pub fn token_count(&self, lookback: usize) -> usize {
        (lookback - self.patch_len) / self.stride + 1
    }
}

/// Splits a series into overlapping patches, one per row. Timesteps after the
/// last full patch are dropped.
pub fn patchify(series: &[f64], cfg: PatchConfig) -> Result<Tensor2> {
    cfg.validate(series.len())?;
    let n = cfg.token_count(series.len());
    let mut out = Vec::with_capacity(n * cfg.patch_len);
    for i in 0..n {
        out.extend_from_slice(&series[i * cfg.stride..i * cfg.stride + cfg.patch_len]);
    }
    Tensor2::from_vec(n, cfg.patch_len, out)
}
