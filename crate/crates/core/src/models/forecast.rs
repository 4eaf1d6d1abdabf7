use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::config::{AblationVariant, ModelConfig, ModelKind};
use super::decomposed::{Branch, DecomposedCache, DecomposedModel};
use super::dlinear::{DLinearCache, DLinearModel};
use super::ltrsf::{LTrsfCache, LTrsfModel};
use super::naive::NaiveBaseline;
use super::patch::PatchConfig;
use super::pattn::{PatchCache, PatchModel};
use crate::error::{Error, Result};
use crate::nnkernel::{Parameter, Parameterized, Tensor2};

#[derive(Debug, Clone, PartialEq)]
pub enum ModelBody {
    Patch(PatchModel),
    LTrsf(LTrsfModel),
    Decomposed(DecomposedModel),
    DLinear(DLinearModel),
    Naive(NaiveBaseline),
}

#[derive(Debug, Clone)]
pub enum ForecastCache {
    Patch(PatchCache),
    LTrsf(LTrsfCache),
    Decomposed(DecomposedCache),
    DLinear(DLinearCache),
    Naive,
}

/// Any forecaster behind one `forecast(window) -> horizon` contract.
#[derive(Debug, Clone, PartialEq)]
pub struct ForecastModel {
    config: ModelConfig,
    pub body: ModelBody,
}

impl ForecastModel {
    /// Builds a freshly initialized model; `seed` fixes every initial weight.
    pub fn new(config: ModelConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let patch = PatchConfig::new(config.patch_len, config.stride);
        let (l, h, d, heads) = (config.lookback, config.horizon, config.d_model, config.heads);
        let body = match config.kind {
            ModelKind::PAttn => ModelBody::Patch(PatchModel::pattn(l, h, patch, d, heads, &mut rng)?),
            ModelKind::Ablation(v) => {
                ModelBody::Patch(PatchModel::new(v, l, h, patch, d, heads, &mut rng)?)
            }
            ModelKind::LTrsf => ModelBody::LTrsf(LTrsfModel::new(l, h, d, heads, &mut rng)?),
            ModelKind::DPAttn => {
                let mut make = || -> Result<Branch> {
                    Ok(Branch::Patch(PatchModel::new(
                        AblationVariant::SingleAttention,
                        l,
                        h,
                        patch,
                        d,
                        heads,
                        &mut rng,
                    )?))
                };
                let branches = [make()?, make()?, make()?];
                ModelBody::Decomposed(DecomposedModel::new(config.k_trend, config.k_seasonal, branches)?)
            }
            ModelKind::DLTrsf => {
                let mut make =
                    || -> Result<Branch> { Ok(Branch::LTrsf(LTrsfModel::new(l, h, d, heads, &mut rng)?)) };
                let branches = [make()?, make()?, make()?];
                ModelBody::Decomposed(DecomposedModel::new(config.k_trend, config.k_seasonal, branches)?)
            }
            ModelKind::DLinear => ModelBody::DLinear(DLinearModel::new(l, h, config.ma_kernel, &mut rng)?),
            ModelKind::MeanP => ModelBody::Naive(NaiveBaseline::MeanP),
            ModelKind::Seasonal => ModelBody::Naive(NaiveBaseline::Seasonal {
                period: config.period,
            }),
        };
        Ok(Self { config, body })
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn kind(&self) -> ModelKind {
        self.config.kind
    }

    pub fn is_trainable(&self) -> bool {
        self.config.kind.is_trainable()
    }

    pub fn forward(&self, windows: &[Tensor2]) -> Result<(Vec<Tensor2>, ForecastCache)> {
        match &self.body {
            ModelBody::Patch(m) => m.forward(windows).map(|(y, c)| (y, ForecastCache::Patch(c))),
            ModelBody::LTrsf(m) => m.forward(windows).map(|(y, c)| (y, ForecastCache::LTrsf(c))),
            ModelBody::Decomposed(m) => {
                m.forward(windows).map(|(y, c)| (y, ForecastCache::Decomposed(c)))
            }
            ModelBody::DLinear(m) => m.forward(windows).map(|(y, c)| (y, ForecastCache::DLinear(c))),
            ModelBody::Naive(n) => {
                let h = self.config.horizon;
                let preds = windows
                    .iter()
                    .map(|w| {
                        if w.rows() != self.config.lookback {
                            return Err(Error::dim(
                                "forecast input",
                                w.shape(),
                                (self.config.lookback, w.cols()),
                            ));
                        }
                        n.forecast(w, h)
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok((preds, ForecastCache::Naive))
            }
        }
    }

    /// Accumulates parameter gradients for `d loss / d forecast`.
    pub fn backward(&mut self, cache: &ForecastCache, grads: &[Tensor2]) -> Result<()> {
        match (&mut self.body, cache) {
            (ModelBody::Patch(m), ForecastCache::Patch(c)) => m.backward(c, grads),
            (ModelBody::LTrsf(m), ForecastCache::LTrsf(c)) => m.backward(c, grads),
            (ModelBody::Decomposed(m), ForecastCache::Decomposed(c)) => m.backward(c, grads),
            (ModelBody::DLinear(m), ForecastCache::DLinear(c)) => m.backward(c, grads),
            (ModelBody::Naive(_), _) => Err(Error::Config(format!(
                "{} has no trainable parameters",
                self.config.kind
            ))),
            _ => unreachable!("cache produced by a different model body"),
        }
    }

    pub fn predict(&self, window: &Tensor2) -> Result<Tensor2> {
        let (mut out, _) = self.forward(std::slice::from_ref(window))?;
        Ok(out.pop().expect("one window in, one forecast out"))
    }

    pub fn predict_batch(&self, windows: &[Tensor2]) -> Result<Vec<Tensor2>> {
        Ok(self.forward(windows)?.0)
    }
}

impl Parameterized for ForecastModel {
    fn visit_params(&self, prefix: &str, f: &mut dyn FnMut(String, &Parameter)) {
        match &self.body {
            ModelBody::Patch(m) => m.visit_params(prefix, f),
            ModelBody::LTrsf(m) => m.visit_params(prefix, f),
            ModelBody::Decomposed(m) => m.visit_params(prefix, f),
            ModelBody::DLinear(m) => m.visit_params(prefix, f),
            ModelBody::Naive(_) => {}
        }
    }

    fn visit_params_mut(&mut self, prefix: &str, f: &mut dyn FnMut(String, &mut Parameter)) {
        match &mut self.body {
            ModelBody::Patch(m) => m.visit_params_mut(prefix, f),
            ModelBody::LTrsf(m) => m.visit_params_mut(prefix, f),
            ModelBody::Decomposed(m) => m.visit_params_mut(prefix, f),
            ModelBody::DLinear(m) => m.visit_params_mut(prefix, f),
            ModelBody::Naive(_) => {}
        }
    }
}
