//! WebAssembly bindings for the static demo page in `www/`.

pub mod ops;

use wasm_bindgen::prelude::*;

fn js(e: tsablate::Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen]
pub fn synthetic_series(len: usize, period: f64, noise: f64, seed: u32) -> Vec<f64> {
    ops::synthetic_series(len, period, noise, seed.into())
}

#[wasm_bindgen(getter_with_clone)]
pub struct Decomposed {
    pub trend: Vec<f64>,
    pub seasonal: Vec<f64>,
    pub residual: Vec<f64>,
}

#[wasm_bindgen]
pub fn decompose(values: &[f64], k_trend: usize, k_seasonal: usize) -> Result<Decomposed, JsError> {
    let p = ops::decompose(values, k_trend, k_seasonal).map_err(js)?;
    Ok(Decomposed { trend: p.trend, seasonal: p.seasonal, residual: p.residual })
}

#[wasm_bindgen]
pub fn perturb(values: &[f64], kind: &str, seed: u32) -> Result<Vec<f64>, JsError> {
    ops::perturb(values, kind, seed.into()).map_err(js)
}

#[wasm_bindgen(getter_with_clone)]
pub struct Backtest {
    pub forecast: Vec<f64>,
    pub windows: usize,
    pub mse: f64,
    pub mae: f64,
    pub mse_lower: f64,
    pub mse_upper: f64,
}

#[wasm_bindgen]
pub fn backtest(
    values: &[f64],
    lookback: usize,
    horizon: usize,
    method: &str,
    period: usize,
    seed: u32,
) -> Result<Backtest, JsError> {
    let b = ops::backtest(values, lookback, horizon, method, period, seed.into()).map_err(js)?;
    Ok(Backtest {
        forecast: b.forecast,
        windows: b.windows,
        mse: b.mse,
        mae: b.mae,
        mse_lower: b.mse_lower,
        mse_upper: b.mse_upper,
    })
}
