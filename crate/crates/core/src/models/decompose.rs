use crate::error::{Error, Result};
use crate::nnkernel::Tensor2;

/// Trend, seasonal and residual parts of a window; they sum back to it.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub trend: Tensor2,
    pub seasonal: Tensor2,
    pub residual: Tensor2,
}

pub(crate) fn check_kernels(k_trend: usize, k_seasonal: usize) -> Result<()> {
    if k_trend.is_multiple_of(2) || k_seasonal.is_multiple_of(2) {
        return Err(Error::Config(format!(
            "moving-average kernels must be odd, got trend {k_trend} and seasonal {k_seasonal}"
        )));
    }
    if k_seasonal > k_trend {
        return Err(Error::Config(format!(
            "seasonal kernel {k_seasonal} wider than trend kernel {k_trend}"
        )));
    }
    Ok(())
}

/// Centered moving average of odd width with the boundary values replicated
/// `(k - 1) / 2` times on each side.
pub fn moving_average(series: &[f64], k: usize) -> Result<Vec<f64>> {
    if k.is_multiple_of(2) {
        return Err(Error::Config(format!("moving-average width {k} must be odd")));
    }
    let n = series.len();
    if n == 0 || k == 1 {
        return Ok(series.to_vec());
    }
    let half = (k - 1) / 2;
    let at = |i: isize| -> f64 { series[i.clamp(0, n as isize - 1) as usize] };
    let inv = 1.0 / k as f64;
    Ok((0..n as isize)
        .map(|t| {
            let mut s = 0.0;
            for j in (t - half as isize)..=(t + half as isize) {
                s += at(j);
            }
            s * inv
        })
        .collect())
}

/// Column-wise moving average of a `L x C` window.
pub fn moving_average_columns(window: &Tensor2, k: usize) -> Result<Tensor2> {
    let mut out = Tensor2::zeros(window.rows(), window.cols());
    for c in 0..window.cols() {
        out.set_column(c, &moving_average(&window.column(c), k)?);
    }
    Ok(out)
}

/// Three-way additive decomposition, per channel.
pub fn decompose_series(window: &Tensor2, k_trend: usize, k_seasonal: usize) -> Result<Decomposition> {
    check_kernels(k_trend, k_seasonal)?;
    let trend = moving_average_columns(window, k_trend)?;
    let detrended = window.sub(&trend)?;
    let seasonal = moving_average_columns(&detrended, k_seasonal)?;
    let residual = detrended.sub(&seasonal)?;
    Ok(Decomposition {
        trend,
        seasonal,
        residual,
    })
}
