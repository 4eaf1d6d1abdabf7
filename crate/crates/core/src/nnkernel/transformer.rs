use rand::Rng;

use super::attention::{AttentionCache, MultiHeadAttention};
use super::layernorm::{LayerNorm, LayerNormCache};
use super::linear::{LinearCache, LinearLayer};
use super::param::{join, Parameter, Parameterized};
use super::tensor::Tensor2;
use crate::error::Result;

const GELU_C: f64 = 0.797_884_560_802_865_4; // sqrt(2/pi)

/// GELU, tanh approximation.
pub fn gelu(x: f64) -> f64 {
    0.5 * x * (1.0 + (GELU_C * (x + 0.044715 * x * x * x)).tanh())
}

pub fn gelu_grad(x: f64) -> f64 {
    let u = GELU_C * (x + 0.044715 * x * x * x);
    let t = u.tanh();
    let du = GELU_C * (1.0 + 3.0 * 0.044715 * x * x);
    0.5 * (1.0 + t) + 0.5 * x * (1.0 - t * t) * du
}

/// Pre-norm residual block: `h = x + MHA(LN1(x))`, `y = h + FFN(LN2(h))`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformerBlock {
    pub attention: MultiHeadAttention,
    pub ffn_in: LinearLayer,
    pub ffn_out: LinearLayer,
    pub norm1: LayerNorm,
    pub norm2: LayerNorm,
}

#[derive(Debug, Clone)]
pub struct TransformerCache {
    norm1: LayerNormCache,
    attn: AttentionCache,
    norm2: LayerNormCache,
    ffn_in: LinearCache,
    pre_act: Tensor2,
    ffn_out: LinearCache,
}

impl TransformerBlock {
    pub fn new(model_dim: usize, heads: usize, rng: &mut impl Rng) -> Result<Self> {
        Ok(Self {
            attention: MultiHeadAttention::new(model_dim, heads, rng)?,
            ffn_in: LinearLayer::new(model_dim, 4 * model_dim, rng),
            ffn_out: LinearLayer::new(4 * model_dim, model_dim, rng),
            norm1: LayerNorm::new(model_dim),
            norm2: LayerNorm::new(model_dim),
        })
    }

    /// Block whose every weight and bias is zero (norms keep gamma = 1).
    pub fn zeroed(model_dim: usize, heads: usize) -> Result<Self> {
        let z = || Tensor2::zeros(model_dim, model_dim);
        Ok(Self {
            attention: MultiHeadAttention::from_weights(heads, z(), z(), z(), z())?,
            ffn_in: LinearLayer::zeros(model_dim, 4 * model_dim),
            ffn_out: LinearLayer::zeros(4 * model_dim, model_dim),
            norm1: LayerNorm::new(model_dim),
            norm2: LayerNorm::new(model_dim),
        })
    }

    pub fn model_dim(&self) -> usize {
        self.attention.model_dim()
    }

    pub fn forward(&self, x: &Tensor2) -> Result<(Tensor2, TransformerCache)> {
        self.forward_batch(x, x.rows())
    }

    pub fn forward_batch(&self, x: &Tensor2, seq_len: usize) -> Result<(Tensor2, TransformerCache)> {
        let (n1, norm1) = self.norm1.forward(x)?;
        let (a, attn) = self.attention.forward_batch(&n1, seq_len)?;
        let h = x.add(&a)?;
        let (n2, norm2) = self.norm2.forward(&h)?;
        let (pre_act, ffn_in) = self.ffn_in.forward(&n2)?;
        let act = pre_act.map(gelu);
        let (f, ffn_out) = self.ffn_out.forward(&act)?;
        let y = h.add(&f)?;
        Ok((
            y,
            TransformerCache {
                norm1,
                attn,
                norm2,
                ffn_in,
                pre_act,
                ffn_out,
            },
        ))
    }

    pub fn backward(&mut self, cache: &TransformerCache, dy: &Tensor2) -> Result<Tensor2> {
        let dact = self.ffn_out.backward(&cache.ffn_out, dy)?;
        let dpre = dact.mul_elem(&cache.pre_act.map(gelu_grad))?;
        let dn2 = self.ffn_in.backward(&cache.ffn_in, &dpre)?;
        let mut dh = self.norm2.backward(&cache.norm2, &dn2)?;
        dh.add_assign(dy)?;
        let dn1 = self.attention.backward(&cache.attn, &dh)?;
        let mut dx = self.norm1.backward(&cache.norm1, &dn1)?;
        dx.add_assign(&dh)?;
        Ok(dx)
    }
}

impl Parameterized for TransformerBlock {
    fn visit_params(&self, prefix: &str, f: &mut dyn FnMut(String, &Parameter)) {
        self.norm1.visit_params(&join(prefix, "norm1"), f);
        self.attention.visit_params(&join(prefix, "attn"), f);
        self.norm2.visit_params(&join(prefix, "norm2"), f);
        self.ffn_in.visit_params(&join(prefix, "ffn_in"), f);
        self.ffn_out.visit_params(&join(prefix, "ffn_out"), f);
    }

    fn visit_params_mut(&mut self, prefix: &str, f: &mut dyn FnMut(String, &mut Parameter)) {
        self.norm1.visit_params_mut(&join(prefix, "norm1"), f);
        self.attention.visit_params_mut(&join(prefix, "attn"), f);
        self.norm2.visit_params_mut(&join(prefix, "norm2"), f);
        self.ffn_in.visit_params_mut(&join(prefix, "ffn_in"), f);
        self.ffn_out.visit_params_mut(&join(prefix, "ffn_out"), f);
    }
}
