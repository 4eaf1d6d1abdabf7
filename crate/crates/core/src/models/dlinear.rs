use rand::Rng;

use super::decompose::moving_average;
use super::layout::{check_windows, gather_grads, scatter, series_rows};
use crate::error::{Error, Result};
use crate::nnkernel::{join, LinearCache, LinearLayer, Parameter, Parameterized, Tensor2};

/// Moving-average trend plus remainder, each mapped to the horizon by one
/// linear layer shared across channels.
#[derive(Debug, Clone, PartialEq)]
pub struct DLinearModel {
    lookback: usize,
    horizon: usize,
    pub ma_kernel: usize,
    pub trend_map: LinearLayer,
    pub remainder_map: LinearLayer,
}

#[derive(Debug, Clone)]
pub struct DLinearCache {
    channels: usize,
    trend: LinearCache,
    remainder: LinearCache,
}

impl DLinearModel {
    pub fn new(lookback: usize, horizon: usize, ma_kernel: usize, rng: &mut impl Rng) -> Result<Self> {
        if ma_kernel.is_multiple_of(2) {
            return Err(Error::Config(format!("moving-average kernel {ma_kernel} must be odd")));
        }
        Ok(Self {
            lookback,
            horizon,
            ma_kernel,
            trend_map: LinearLayer::new(lookback, horizon, rng),
            remainder_map: LinearLayer::new(lookback, horizon, rng),
        })
    }

    pub fn lookback(&self) -> usize {
        self.lookback
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// Per-series rows of (trend, remainder).
    pub fn split_trend(&self, windows: &[Tensor2]) -> Result<(Tensor2, Tensor2)> {
        check_windows(windows, self.lookback)?;
        let series = series_rows(windows);
        let mut trend = Tensor2::zeros(series.rows(), series.cols());
        for s in 0..series.rows() {
            trend
                .row_mut(s)
                .copy_from_slice(&moving_average(series.row(s), self.ma_kernel)?);
        }
        let remainder = series.sub(&trend)?;
        Ok((trend, remainder))
    }

    pub fn forward(&self, windows: &[Tensor2]) -> Result<(Vec<Tensor2>, DLinearCache)> {
        let channels = check_windows(windows, self.lookback)?;
        let (trend, remainder) = self.split_trend(windows)?;
        let (yt, tc) = self.trend_map.forward(&trend)?;
        let (yr, rc) = self.remainder_map.forward(&remainder)?;
        let out = yt.add(&yr)?;
        Ok((
            scatter(&out, channels, None),
            DLinearCache {
                channels,
                trend: tc,
                remainder: rc,
            },
        ))
    }

    pub fn backward(&mut self, cache: &DLinearCache, grads: &[Tensor2]) -> Result<()> {
        let dout = gather_grads(grads, self.horizon, cache.channels, None)?;
        self.trend_map.backward(&cache.trend, &dout)?;
        self.remainder_map.backward(&cache.remainder, &dout)?;
        Ok(())
    }
}

impl Parameterized for DLinearModel {
    fn visit_params(&self, prefix: &str, f: &mut dyn FnMut(String, &Parameter)) {
        self.trend_map.visit_params(&join(prefix, "trend_map"), f);
        self.remainder_map.visit_params(&join(prefix, "remainder_map"), f);
    }

    fn visit_params_mut(&mut self, prefix: &str, f: &mut dyn FnMut(String, &mut Parameter)) {
        self.trend_map.visit_params_mut(&join(prefix, "trend_map"), f);
        self.remainder_map.visit_params_mut(&join(prefix, "remainder_map"), f);
    }
}
