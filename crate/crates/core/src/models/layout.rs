//! Conversions between per-window `L x C` blocks and per-series rows.
//!
//! Series row `b * C + c` holds channel `c` of window `b`.

use super::instance_norm::{instance_normalize, InstanceNormState};
use crate::error::{Error, Result};
use crate::nnkernel::Tensor2;

pub(crate) fn check_windows(windows: &[Tensor2], lookback: usize) -> Result<usize> {
    let first = windows
        .first()
        .ok_or_else(|| Error::Data("empty window batch".into()))?;
    let c = first.cols();
    for w in windows {
        if w.shape() != (lookback, c) {
            return Err(Error::dim("forecast input", w.shape(), (lookback, c)));
        }
    }
    Ok(c)
}

pub(crate) fn series_rows(windows: &[Tensor2]) -> Tensor2 {
    let (l, c) = windows[0].shape();
    let mut out = Tensor2::zeros(windows.len() * c, l);
    for (b, w) in windows.iter().enumerate() {
        for t in 0..l {
            for (ch, &v) in w.row(t).iter().enumerate() {
                out.set(b * c + ch, t, v);
            }
        }
    }
    out
}

pub(crate) fn normalized_series_rows(
    windows: &[Tensor2],
) -> Result<(Tensor2, Vec<InstanceNormState>)> {
    let mut normed = Vec::with_capacity(windows.len());
    let mut states = Vec::with_capacity(windows.len());
    for w in windows {
        let (n, s) = instance_normalize(w)?;
        normed.push(n);
        states.push(s);
    }
    Ok((series_rows(&normed), states))
}

/// `S x H` rows back into `H x C` windows, optionally denormalized.
pub(crate) fn scatter(rows: &Tensor2, channels: usize, states: Option<&[InstanceNormState]>) -> Vec<Tensor2> {
    let h = rows.cols();
    let count = rows.rows() / channels;
    (0..count)
        .map(|b| {
            let mut out = Tensor2::zeros(h, channels);
            for ch in 0..channels {
                let src = rows.row(b * channels + ch);
                let (scale, shift) = match states {
                    Some(s) => (s[b].scale(ch), s[b].mu[ch]),
                    None => (1.0, 0.0),
                };
                for (t, &v) in src.iter().enumerate() {
                    out.set(t, ch, v * scale + shift);
                }
            }
            out
        })
        .collect()
}

/// Inverse of [`scatter`] for gradients: `H x C` windows to `S x H` rows,
/// multiplied by the denormalization scale.
pub(crate) fn gather_grads(
    grads: &[Tensor2],
    horizon: usize,
    channels: usize,
    states: Option<&[InstanceNormState]>,
) -> Result<Tensor2> {
    let mut out = Tensor2::zeros(grads.len() * channels, horizon);
    for (b, g) in grads.iter().enumerate() {
        if g.shape() != (horizon, channels) {
            return Err(Error::dim("forecast gradient", g.shape(), (horizon, channels)));
        }
        for ch in 0..channels {
            let scale = states.map_or(1.0, |s| s[b].scale(ch));
            let dst = out.row_mut(b * channels + ch);
            for (t, d) in dst.iter_mut().enumerate() {
                *d = g.get(t, ch) * scale;
            }
        }
    }
    Ok(out)
}
