use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::forecast::ForecastModel;
use crate::data::WindowSampler;
use crate::error::{Error, Result};
use crate::nnkernel::{adam_step, mse_loss_with_grad, AdamConfig, Tensor2};

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    /// Multiplier applied to the learning rate after every epoch.
    pub lr_decay: f64,
    pub seed: u64,
    /// Epochs without validation improvement before stopping; 0 disables.
    pub early_stop_patience: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 10,
            batch_size: 32,
            learning_rate: 1e-3,
            lr_decay: 0.5,
            seed: 2024,
            early_stop_patience: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_mse: Option<f64>,
    pub learning_rate: f64,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    /// Best-validation weights, or the final weights without a validation set.
    pub model: ForecastModel,
    pub history: Vec<EpochRecord>,
    pub best_epoch: Option<usize>,
}

/// Forecasts for every window of a sampler, in window order.
pub fn forecast_sampler(
    model: &ForecastModel,
    sampler: &WindowSampler<'_>,
    batch_size: usize,
) -> Result<(Vec<Tensor2>, Vec<Tensor2>)> {
    let mut preds = Vec::with_capacity(sampler.len());
    let mut targets = Vec::with_capacity(sampler.len());
    let idx: Vec<usize> = (0..sampler.len()).collect();
    for chunk in idx.chunks(batch_size.max(1)) {
        let (inputs, tgts): (Vec<_>, Vec<_>) = chunk
            .iter()
            .map(|&i| {
                let w = sampler.get(i);
                (w.lookback, w.target)
            })
            .unzip();
        preds.extend(model.predict_batch(&inputs)?);
        targets.extend(tgts);
    }
    Ok((preds, targets))
}

fn mean_squared_error(preds: &[Tensor2], targets: &[Tensor2]) -> f64 {
    let total: f64 = preds
        .iter()
        .zip(targets)
        .map(|(p, t)| {
            p.as_slice()
                .iter()
                .zip(t.as_slice())
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
        })
        .sum();
    let count: usize = preds.iter().map(|p| p.len()).sum();
    total / count as f64
}

/// Mini-batch MSE training with Adam, seeded shuffling and early stopping
/// on validation MSE.
pub fn train_model(
    mut model: ForecastModel,
    train: &WindowSampler<'_>,
    val: Option<&WindowSampler<'_>>,
    cfg: &TrainConfig,
) -> Result<TrainOutcome> {
    if !model.is_trainable() {
        return Err(Error::Config(format!(
            "{} has no trainable parameters",
            model.kind()
        )));
    }
    if cfg.epochs == 0 {
        return Ok(TrainOutcome {
            model,
            history: Vec::new(),
            best_epoch: None,
        });
    }
    if train.is_empty() {
        return Err(Error::Data("training split yields no windows".into()));
    }
    if cfg.batch_size == 0 {
        return Err(Error::Config("batch size must be positive".into()));
    }
    let mut adam = AdamConfig::with_lr(cfg.learning_rate);
    adam.validate()?;
    let val = val.filter(|v| !v.is_empty());

    let mut history = Vec::with_capacity(cfg.epochs);
    let mut best: Option<(f64, ForecastModel, usize)> = None;
    let mut stale = 0;
    let mut order: Vec<usize> = (0..train.len()).collect();
    for epoch in 0..cfg.epochs {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(epoch as u64);
        order.sort_unstable();
        order.shuffle(&mut rng);

        let mut loss_sum = 0.0;
        let mut batches = 0usize;
        for chunk in order.chunks(cfg.batch_size) {
            let (inputs, targets): (Vec<_>, Vec<_>) = chunk
                .iter()
                .map(|&i| {
                    let w = train.get(i);
                    (w.lookback, w.target)
                })
                .unzip();
            let (preds, cache) = model.forward(&inputs)?;
            let h = preds[0].rows();
            let (loss, grad) =
                mse_loss_with_grad(&Tensor2::vstack(&preds)?, &Tensor2::vstack(&targets)?)?;
            if !loss.is_finite() {
                return Err(Error::Divergence { epoch });
            }
            let grads: Vec<Tensor2> = (0..preds.len())
                .map(|b| grad.slice_rows(b * h, (b + 1) * h))
                .collect();
            model.backward(&cache, &grads)?;
            adam_step(&mut model, &adam);
            loss_sum += loss;
            batches += 1;
        }
        let train_loss = loss_sum / batches as f64;
        let val_mse = match val {
            Some(v) => {
                let (p, t) = forecast_sampler(&model, v, cfg.batch_size.max(64))?;
                let mse = mean_squared_error(&p, &t);
                if !mse.is_finite() {
                    return Err(Error::Divergence { epoch });
                }
                Some(mse)
            }
            None => None,
        };
        log::info!(
            "epoch {epoch}: train loss {train_loss:.6}, val mse {}",
            val_mse.map_or("-".into(), |v| format!("{v:.6}"))
        );
        history.push(EpochRecord {
            epoch,
            train_loss,
            val_mse,
            learning_rate: adam.learning_rate,
        });
        adam.learning_rate *= cfg.lr_decay;

        if let Some(v) = val_mse {
            if best.as_ref().is_none_or(|(b, _, _)| v < *b) {
                best = Some((v, model.clone(), epoch));
                stale = 0;
            } else {
                stale += 1;
                if cfg.early_stop_patience > 0 && stale >= cfg.early_stop_patience {
                    log::info!("early stop after epoch {epoch}");
                    break;
                }
            }
        }
    }
    Ok(match best {
        Some((_, best_model, epoch)) => TrainOutcome {
            model: best_model,
            history,
            best_epoch: Some(epoch),
        },
        None => TrainOutcome {
            model,
            history,
            best_epoch: None,
        },
    })
}
