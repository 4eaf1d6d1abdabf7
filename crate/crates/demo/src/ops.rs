//! Single-channel operations behind the page, usable natively.

use tsablate::eval::{bootstrap_ci, derive_seed, perturb_window, PerturbationKind};
use tsablate::models::{decompose_series, NaiveBaseline};
use tsablate::nnkernel::Tensor2;
use tsablate::{Error, Result};

fn column(values: &[f64]) -> Result<Tensor2> {
    if values.is_empty() {
        return Err(Error::Data("series is empty".into()));
    }
    Tensor2::from_vec(values.len(), 1, values.to_vec())
}

/// Daily-style sine with a slow drift and reproducible uniform noise.
pub fn synthetic_series(len: usize, period: f64, noise: f64, seed: u64) -> Vec<f64> {
    (0..len)
        .map(|t| {
            let u = (derive_seed(seed, t as u64) >> 11) as f64 / (1u64 << 53) as f64;
            let x = t as f64;
            (std::f64::consts::TAU * x / period).sin()
                + 0.4 * (std::f64::consts::TAU * x / (7.0 * period)).cos()
                + 0.004 * x
                + noise * (2.0 * u - 1.0)
        })
        .collect()
}

pub struct Parts {
    pub trend: Vec<f64>,
    pub seasonal: Vec<f64>,
    pub residual: Vec<f64>,
}

pub fn decompose(values: &[f64], k_trend: usize, k_seasonal: usize) -> Result<Parts> {
    let d = decompose_series(&column(values)?, k_trend, k_seasonal)?;
    Ok(Parts {
        trend: d.trend.column(0),
        seasonal: d.seasonal.column(0),
        residual: d.residual.column(0),
    })
}

/// `kind` is any perturbation name the CLI accepts, e.g. `sf-half` or `masking:0.3`.
pub fn perturb(values: &[f64], kind: &str, seed: u64) -> Result<Vec<f64>> {
    let kind: PerturbationKind = kind.parse()?;
    Ok(perturb_window(&column(values)?, kind, seed).column(0))
}

pub struct Backtest {
    /// Forecast for the final window, aligned with the last `horizon` points.
    pub forecast: Vec<f64>,
    pub windows: usize,
    pub mse: f64,
    pub mae: f64,
    pub mse_lower: f64,
    pub mse_upper: f64,
}

/// Slides a `lookback + horizon` window over the series in steps of
/// `horizon`, forecasts each with a naive baseline and bootstraps the
/// per-window MSE.
pub fn backtest(
    values: &[f64],
    lookback: usize,
    horizon: usize,
    method: &str,
    period: usize,
    seed: u64,
) -> Result<Backtest> {
    let baseline = match method {
        "meanp" => NaiveBaseline::MeanP,
        "seasonal" => NaiveBaseline::Seasonal { period },
        other => return Err(Error::Config(format!("unknown baseline '{other}'"))),
    };
    if lookback == 0 || horizon == 0 {
        return Err(Error::Config("lookback and horizon must be positive".into()));
    }
    if values.len() < lookback + horizon {
        return Err(Error::Data(format!(
            "series of {} points is shorter than lookback + horizon = {}",
            values.len(),
            lookback + horizon
        )));
    }
    let series = column(values)?;
    let mut sq = Vec::new();
    let mut abs = Vec::new();
    let mut forecast = Vec::new();
    // last window ends at the final point
    let last = values.len() - lookback - horizon;
    let starts: Vec<usize> = (0..=last).rev().step_by(horizon).collect();
    for &s in starts.iter().rev() {
        let window = series.slice_rows(s, s + lookback);
        let pred = baseline.forecast(&window, horizon)?.column(0);
        let target = &values[s + lookback..s + lookback + horizon];
        let n = horizon as f64;
        sq.push(pred.iter().zip(target).map(|(p, t)| (p - t).powi(2)).sum::<f64>() / n);
        abs.push(pred.iter().zip(target).map(|(p, t)| (p - t).abs()).sum::<f64>() / n);
        forecast = pred;
    }
    let ci = bootstrap_ci(&sq, 0.95, 1000, seed)?;
    Ok(Backtest {
        forecast,
        windows: sq.len(),
        mse: ci.point,
        mae: abs.iter().sum::<f64>() / abs.len() as f64,
        mse_lower: ci.lower,
        mse_upper: ci.upper,
    })
}
