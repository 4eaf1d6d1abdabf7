use rand::Rng;

use super::ablation::{AblationCache, AblationHead};
use super::config::AblationVariant;
use super::instance_norm::InstanceNormState;
use super::layout::{check_windows, gather_grads, normalized_series_rows, scatter};
use super::patch::PatchConfig;
use crate::error::Result;
use crate::nnkernel::{
    join, LinearCache, LinearLayer, MultiHeadAttention, Parameter, Parameterized, Tensor2,
    TransformerBlock,
};

/// Channel-independent patch forecaster.
///
/// Each channel is instance-normalized, cut into patches, embedded to width
/// `D`, mixed by an [`AblationHead`], flattened and projected to the horizon.
/// There is no positional embedding. With a single-attention mixer this is
/// PAttn; the other mixers give the encoder ablations.
#[derive(Debug, Clone, PartialEq)]
pub struct PatchModel {
    lookback: usize,
    horizon: usize,
    pub patch: PatchConfig,
    pub embed: LinearLayer,
    pub mixer: AblationHead,
    pub head: LinearLayer,
}

pub type PAttnModel = PatchModel;

#[derive(Debug, Clone)]
pub struct PatchCache {
    channels: usize,
    states: Vec<InstanceNormState>,
    embed: LinearCache,
    mixer: AblationCache,
    head: LinearCache,
}

impl PatchModel {
    pub fn new(
        variant: AblationVariant,
        lookback: usize,
        horizon: usize,
        patch: PatchConfig,
        d_model: usize,
        heads: usize,
        rng: &mut impl Rng,
    ) -> Result<Self> {
        patch.validate(lookback)?;
        let n = patch.token_count(lookback);
        let embed = LinearLayer::new(patch.patch_len, d_model, rng);
        let mixer = match variant {
            AblationVariant::Identity => AblationHead::Identity,
            AblationVariant::SingleAttention => {
                AblationHead::SingleAttention(MultiHeadAttention::new(d_model, heads, rng)?)
            }
            AblationVariant::SingleTransformer => {
                AblationHead::SingleTransformer(TransformerBlock::new(d_model, heads, rng)?)
            }
        };
        let head = LinearLayer::new(n * d_model, horizon, rng);
        Ok(Self {
            lookback,
            horizon,
            patch,
            embed,
            mixer,
            head,
        })
    }

    pub fn pattn(
        lookback: usize,
        horizon: usize,
        patch: PatchConfig,
        d_model: usize,
        heads: usize,
        rng: &mut impl Rng,
    ) -> Result<Self> {
        Self::new(AblationVariant::SingleAttention, lookback, horizon, patch, d_model, heads, rng)
    }

    pub fn lookback(&self) -> usize {
        self.lookback
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn token_count(&self) -> usize {
        self.patch.token_count(self.lookback)
    }

    pub fn d_model(&self) -> usize {
        self.embed.d_out()
    }

    /// Patch tokens after embedding, before mixing (`S*N x D`), for every
    /// channel of every window.
    pub fn embed_tokens(&self, windows: &[Tensor2]) -> Result<Tensor2> {
        check_windows(windows, self.lookback)?;
        let (series, _) = normalized_series_rows(windows)?;
        self.embed.infer(&self.patches(&series)?)
    }

    fn patches(&self, series: &Tensor2) -> Result<Tensor2> {
        let n = self.token_count();
        let p = self.patch.patch_len;
        let mut out = Tensor2::zeros(series.rows() * n, p);
        for s in 0..series.rows() {
            let row = series.row(s);
            for i in 0..n {
                out.row_mut(s * n + i)
                    .copy_from_slice(&row[i * self.patch.stride..i * self.patch.stride + p]);
            }
        }
        Ok(out)
    }

    pub fn forward(&self, windows: &[Tensor2]) -> Result<(Vec<Tensor2>, PatchCache)> {
        let channels = check_windows(windows, self.lookback)?;
        let (series, states) = normalized_series_rows(windows)?;
        let patches = self.patches(&series)?;
        let (tokens, embed) = self.embed.forward(&patches)?;
        let n = self.token_count();
        let (mixed, mixer) = self.mixer.forward_batch(&tokens, n)?;
        let flat = mixed.reshape(series.rows(), n * self.d_model())?;
        let (out, head) = self.head.forward(&flat)?;
        let preds = scatter(&out, channels, Some(&states));
        Ok((
            preds,
            PatchCache {
                channels,
                states,
                embed,
                mixer,
                head,
            },
        ))
    }

    pub fn backward(&mut self, cache: &PatchCache, grads: &[Tensor2]) -> Result<()> {
        let dout = gather_grads(grads, self.horizon, cache.channels, Some(&cache.states))?;
        let dflat = self.head.backward(&cache.head, &dout)?;
        let n = self.token_count();
        let dmixed = dflat.reshape(dout.rows() * n, self.d_model())?;
        let dtokens = self.mixer.backward(&cache.mixer, &dmixed)?;
        self.embed.backward(&cache.embed, &dtokens)?;
        Ok(())
    }
}

impl Parameterized for PatchModel {
    fn visit_params(&self, prefix: &str, f: &mut dyn FnMut(String, &Parameter)) {
        self.embed.visit_params(&join(prefix, "embed"), f);
        self.mixer.visit_params(&join(prefix, "mixer"), f);
        self.head.visit_params(&join(prefix, "head"), f);
    }

    fn visit_params_mut(&mut self, prefix: &str, f: &mut dyn FnMut(String, &mut Parameter)) {
        self.embed.visit_params_mut(&join(prefix, "embed"), f);
        self.mixer.visit_params_mut(&join(prefix, "mixer"), f);
        self.head.visit_params_mut(&join(prefix, "head"), f);
    }
}
