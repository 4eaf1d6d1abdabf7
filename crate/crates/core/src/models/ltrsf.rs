use rand::Rng;

use super::instance_norm::InstanceNormState;
use super::layout::{check_windows, gather_grads, normalized_series_rows, scatter};
use crate::error::Result;
use crate::nnkernel::{
    join, LinearCache, LinearLayer, Parameter, Parameterized, Tensor2, TransformerBlock,
    TransformerCache,
};

/// Channel-as-token transformer: every channel's normalized lookback becomes
/// one token, a single transformer block mixes channels, and a shared head
/// maps each token to its horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct LTrsfModel {
    lookback: usize,
    horizon: usize,
    pub embed: LinearLayer,
    pub block: TransformerBlock,
    pub head: LinearLayer,
}

#[derive(Debug, Clone)]
pub struct LTrsfCache {
    channels: usize,
    states: Vec<InstanceNormState>,
    embed: LinearCache,
    block: TransformerCache,
    head: LinearCache,
}

impl LTrsfModel {
    pub fn new(
        lookback: usize,
        horizon: usize,
        d_model: usize,
        heads: usize,
        rng: &mut impl Rng,
    ) -> Result<Self> {
        Ok(Self {
            lookback,
            horizon,
            embed: LinearLayer::new(lookback, d_model, rng),
            block: TransformerBlock::new(d_model, heads, rng)?,
            head: LinearLayer::new(d_model, horizon, rng),
        })
    }

    pub fn lookback(&self) -> usize {
        self.lookback
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn forward(&self, windows: &[Tensor2]) -> Result<(Vec<Tensor2>, LTrsfCache)> {
        let channels = check_windows(windows, self.lookback)?;
        let (series, states) = normalized_series_rows(windows)?;
        let (tokens, embed) = self.embed.forward(&series)?;
        let (mixed, block) = self.block.forward_batch(&tokens, channels)?;
        let (out, head) = self.head.forward(&mixed)?;
        let preds = scatter(&out, channels, Some(&states));
        Ok((
            preds,
            LTrsfCache {
                channels,
                states,
                embed,
                block,
                head,
            },
        ))
    }

    pub fn backward(&mut self, cache: &LTrsfCache, grads: &[Tensor2]) -> Result<()> {
        let dout = gather_grads(grads, self.horizon, cache.channels, Some(&cache.states))?;
        let dmixed = self.head.backward(&cache.head, &dout)?;
        let dtokens = self.block.backward(&cache.block, &dmixed)?;
        self.embed.backward(&cache.embed, &dtokens)?;
        Ok(())
    }
}

impl Parameterized for LTrsfModel {
    fn visit_params(&self, prefix: &str, f: &mut dyn FnMut(String, &Parameter)) {
        self.embed.visit_params(&join(prefix, "embed"), f);
        self.block.visit_params(&join(prefix, "block"), f);
        self.head.visit_params(&join(prefix, "head"), f);
    }

    fn visit_params_mut(&mut self, prefix: &str, f: &mut dyn FnMut(String, &mut Parameter)) {
        self.embed.visit_params_mut(&join(prefix, "embed"), f);
        self.block.visit_params_mut(&join(prefix, "block"), f);
        self.head.visit_params_mut(&join(prefix, "head"), f);
    }
}
