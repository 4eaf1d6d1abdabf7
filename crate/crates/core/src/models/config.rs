use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Which token mixer sits between the patch embedding and the linear head.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AblationVariant {
    /// Tokens go straight to the head.
    Identity,
    /// One multi-head attention layer with a residual connection.
    SingleAttention,
    /// One pre-norm transformer block.
    SingleTransformer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    PAttn,
    LTrsf,
    DPAttn,
    DLTrsf,
    DLinear,
    MeanP,
    Seasonal,
    Ablation(AblationVariant),
}

impl ModelKind {
    pub const ALL: [ModelKind; 10] = [
        ModelKind::PAttn,
        ModelKind::LTrsf,
        ModelKind::DPAttn,
        ModelKind::DLTrsf,
        ModelKind::DLinear,
        ModelKind::MeanP,
        ModelKind::Seasonal,
        ModelKind::Ablation(AblationVariant::Identity),
        ModelKind::Ablation(AblationVariant::SingleAttention),
        ModelKind::Ablation(AblationVariant::SingleTransformer),
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::PAttn => "pattn",
            ModelKind::LTrsf => "ltrsf",
            ModelKind::DPAttn => "d-pattn",
            ModelKind::DLTrsf => "d-ltrsf",
            ModelKind::DLinear => "dlinear",
            ModelKind::MeanP => "meanp",
            ModelKind::Seasonal => "seasonal",
            ModelKind::Ablation(AblationVariant::Identity) => "ablation-identity",
            ModelKind::Ablation(AblationVariant::SingleAttention) => "ablation-attention",
            ModelKind::Ablation(AblationVariant::SingleTransformer) => "ablation-transformer",
        }
    }

    /// Stable numeric tag used in checkpoints.
    pub fn tag(self) -> u32 {
        match self {
            ModelKind::PAttn => 1,
            ModelKind::LTrsf => 2,
            ModelKind::DPAttn => 3,
            ModelKind::DLTrsf => 4,
            ModelKind::DLinear => 5,
            ModelKind::MeanP => 6,
            ModelKind::Seasonal => 7,
            ModelKind::Ablation(AblationVariant::Identity) => 8,
            ModelKind::Ablation(AblationVariant::SingleAttention) => 9,
            ModelKind::Ablation(AblationVariant::SingleTransformer) => 10,
        }
    }

    pub fn from_tag(tag: u32) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.tag() == tag)
            .ok_or_else(|| Error::Checkpoint(format!("unknown model kind tag {tag}")))
    }

    pub fn is_trainable(self) -> bool {
        !matches!(self, ModelKind::MeanP | ModelKind::Seasonal)
    }

    pub fn uses_patches(self) -> bool {
        matches!(self, ModelKind::PAttn | ModelKind::DPAttn | ModelKind::Ablation(_))
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        let alias = match lower.as_str() {
            "dpattn" => "d-pattn",
            "dltrsf" => "d-ltrsf",
            "w/o-llm" | "ablation-none" => "ablation-identity",
            "llm2attn" => "ablation-attention",
            "llm2trsf" => "ablation-transformer",
            other => other,
        };
        Self::ALL
            .into_iter()
            .find(|k| k.name() == alias)
            .ok_or_else(|| Error::Config(format!("unknown model kind '{s}'")))
    }
}

/// Architecture hyperparameters shared by every forecaster.
///
/// Every field is carried for every kind, used or not.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelConfig {
    pub kind: ModelKind,
    pub lookback: usize,
    pub horizon: usize,
    pub channels: usize,
    pub patch_len: usize,
    pub stride: usize,
    pub d_model: usize,
    pub heads: usize,
    pub k_trend: usize,
    pub k_seasonal: usize,
    pub ma_kernel: usize,
    pub period: usize,
}

impl ModelConfig {
    pub fn new(kind: ModelKind, lookback: usize, horizon: usize, channels: usize) -> Self {
        let d_model = match kind {
            ModelKind::LTrsf | ModelKind::DLTrsf => 128,
            _ => 64,
        };
        Self {
            kind,
            lookback,
            horizon,
            channels,
            patch_len: 16,
            stride: 8,
            d_model,
            heads: 4,
            k_trend: 25,
            k_seasonal: 7,
            ma_kernel: 25,
            period: 24,
        }
    }

    pub fn token_count(&self) -> usize {
        if self.lookback < self.patch_len || self.stride == 0 {
            0
        } else {
            (self.lookback - self.patch_len) / self.stride + 1
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if self.lookback == 0 || self.horizon == 0 || self.channels == 0 {
            return fail(format!(
                "lookback ({}), horizon ({}) and channels ({}) must be positive",
                self.lookback, self.horizon, self.channels
            ));
        }
        if self.kind.uses_patches()
            && (self.stride == 0 || self.stride > self.patch_len || self.patch_len > self.lookback) {
                return fail(format!(
                    "patching needs 1 <= stride ({}) <= patch_len ({}) <= lookback ({})",
                    self.stride, self.patch_len, self.lookback
                ));
            }
        if self.kind.is_trainable()
            && self.kind != ModelKind::DLinear
            && (self.heads == 0 || self.d_model == 0 || !self.d_model.is_multiple_of(self.heads))
        {
            return fail(format!(
                "model dim {} is not divisible by {} heads",
                self.d_model, self.heads
            ));
        }
        if matches!(self.kind, ModelKind::DPAttn | ModelKind::DLTrsf) {
            super::decompose::check_kernels(self.k_trend, self.k_seasonal)?;
        }
        if self.kind == ModelKind::DLinear && self.ma_kernel.is_multiple_of(2) {
            return fail(format!("moving-average kernel {} must be odd", self.ma_kernel));
        }
        if self.kind == ModelKind::Seasonal && (self.period == 0 || self.period > self.lookback) {
            return fail(format!(
                "seasonal period {} must be in 1..=lookback ({})",
                self.period, self.lookback
            ));
        }
        if matches!(self.kind, ModelKind::MeanP | ModelKind::Seasonal | ModelKind::DLinear) {
            return Ok(());
        }
        if self.lookback < 2 {
            return fail("instance norm needs a lookback of at least 2".into());
        }
        Ok(())
    }
}
