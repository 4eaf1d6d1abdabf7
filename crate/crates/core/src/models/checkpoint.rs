use std::collections::HashMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::config::{ModelConfig, ModelKind};
use super::forecast::ForecastModel;
use crate::binfmt::{BinReader, BinWriter};
use crate::error::{Error, Result};
use crate::nnkernel::Parameterized;

/// Writes kind tag, the config block (L, H, C, P, S, D, h, k_trend,
/// k_seasonal, ma_kernel, period as u32) and every parameter value.
pub fn write_checkpoint(model: &ForecastModel, out: impl Write) -> Result<()> {
    let cfg = model.config();
    let mut w = BinWriter::new(out);
    w.header(cfg.kind.tag())?;
    for v in [
        cfg.lookback,
        cfg.horizon,
        cfg.channels,
        cfg.patch_len,
        cfg.stride,
        cfg.d_model,
        cfg.heads,
        cfg.k_trend,
        cfg.k_seasonal,
        cfg.ma_kernel,
        cfg.period,
    ] {
        w.usize(v)?;
    }
    let mut params = Vec::new();
    model.visit_params("", &mut |name, p| params.push((name, p.value.clone())));
    w.usize(params.len())?;
    for (name, value) in &params {
        w.record(name, value)?;
    }
    w.finish()?;
    Ok(())
}

pub fn read_checkpoint(input: impl Read) -> Result<ForecastModel> {
    let mut r = BinReader::new(input);
    let kind = ModelKind::from_tag(r.header()?)?;
    let mut block = [0usize; 11];
    for v in block.iter_mut() {
        *v = r.usize()?;
    }
    let [lookback, horizon, channels, patch_len, stride, d_model, heads, k_trend, k_seasonal, ma_kernel, period] =
        block;
    let config = ModelConfig {
        kind,
        lookback,
        horizon,
        channels,
        patch_len,
        stride,
        d_model,
        heads,
        k_trend,
        k_seasonal,
        ma_kernel,
        period,
    };
    let mut model = ForecastModel::new(config, 0)?;
    let count = r.usize()?;
    let mut stored = HashMap::with_capacity(count);
    for _ in 0..count {
        let (name, t) = r.record()?;
        stored.insert(name, t);
    }
    let mut problem = None;
    model.visit_params_mut("", &mut |name, p| {
        if problem.is_some() {
            return;
        }
        match stored.remove(&name) {
            Some(t) if t.shape() == p.shape() => p.value = t,
            Some(t) => {
                problem = Some(format!(
                    "parameter {name} has shape {:?}, expected {:?}",
                    t.shape(),
                    p.shape()
                ))
            }
            None => problem = Some(format!("parameter {name} missing")),
        }
    });
    if let Some(msg) = problem {
        return Err(Error::Checkpoint(msg));
    }
    if let Some(extra) = stored.keys().next() {
        return Err(Error::Checkpoint(format!("unexpected parameter {extra}")));
    }
    Ok(model)
}

pub fn save_checkpoint(model: &ForecastModel, path: impl AsRef<Path>) -> Result<()> {
    write_checkpoint(model, BufWriter::new(File::create(path)?))
}

pub fn load_checkpoint(path: impl AsRef<Path>) -> Result<ForecastModel> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| {
        Error::Checkpoint(format!("cannot open {}: {e}", path.display()))
    })?;
    read_checkpoint(BufReader::new(file))
}
