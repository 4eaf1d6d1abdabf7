use crate::error::Result;
use crate::nnkernel::{
    join, AttentionCache, MultiHeadAttention, Parameter, Parameterized, Tensor2, TransformerBlock,
    TransformerCache,
};

use super::config::AblationVariant;

/// The token mixer placed between a patch encoder and its output head.
#[derive(Debug, Clone, PartialEq)]
pub enum AblationHead {
    Identity,
    SingleAttention(MultiHeadAttention),
    SingleTransformer(TransformerBlock),
}

#[derive(Debug, Clone)]
pub enum AblationCache {
    Identity,
    Attention(AttentionCache),
    Transformer(TransformerCache),
}

impl AblationHead {
    pub fn variant(&self) -> AblationVariant {
        match self {
            AblationHead::Identity => AblationVariant::Identity,
            AblationHead::SingleAttention(_) => AblationVariant::SingleAttention,
            AblationHead::SingleTransformer(_) => AblationVariant::SingleTransformer,
        }
    }

    /// Treats all rows as one token sequence.
    pub fn apply(&self, tokens: &Tensor2) -> Result<Tensor2> {
        Ok(self.forward_batch(tokens, tokens.rows().max(1))?.0)
    }

    pub fn forward_batch(&self, tokens: &Tensor2, seq_len: usize) -> Result<(Tensor2, AblationCache)> {
        match self {
            AblationHead::Identity => Ok((tokens.clone(), AblationCache::Identity)),
            AblationHead::SingleAttention(attn) => {
                let (a, cache) = attn.forward_batch(tokens, seq_len)?;
                Ok((tokens.add(&a)?, AblationCache::Attention(cache)))
            }
            AblationHead::SingleTransformer(block) => {
                let (y, cache) = block.forward_batch(tokens, seq_len)?;
                Ok((y, AblationCache::Transformer(cache)))
            }
        }
    }

    pub fn backward(&mut self, cache: &AblationCache, dy: &Tensor2) -> Result<Tensor2> {
        match (self, cache) {
            (AblationHead::Identity, AblationCache::Identity) => Ok(dy.clone()),
            (AblationHead::SingleAttention(attn), AblationCache::Attention(c)) => {
                let mut dx = attn.backward(c, dy)?;
                dx.add_assign(dy)?;
                Ok(dx)
            }
            (AblationHead::SingleTransformer(block), AblationCache::Transformer(c)) => {
                block.backward(c, dy)
            }
            _ => unreachable!("cache produced by a different head variant"),
        }
    }
}

impl Parameterized for AblationHead {
    fn visit_params(&self, prefix: &str, f: &mut dyn FnMut(String, &Parameter)) {
        match self {
            AblationHead::Identity => {}
            AblationHead::SingleAttention(a) => a.visit_params(&join(prefix, "attn"), f),
            AblationHead::SingleTransformer(b) => b.visit_params(&join(prefix, "block"), f),
        }
    }

    fn visit_params_mut(&mut self, prefix: &str, f: &mut dyn FnMut(String, &mut Parameter)) {
        match self {
            AblationHead::Identity => {}
            AblationHead::SingleAttention(a) => a.visit_params_mut(&join(prefix, "attn"), f),
            AblationHead::SingleTransformer(b) => b.visit_params_mut(&join(prefix, "block"), f),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tokens() -> Tensor2 {
        Tensor2::from_fn(5, 8, |r, c| ((r * 3 + c * 5) % 7) as f64 * 0.3 - 1.0)
    }

    #[test]
    fn identity_is_bitwise_passthrough() {
        let x = tokens();
        assert_eq!(AblationHead::Identity.apply(&x).unwrap(), x);
    }

    #[test]
    fn zero_transformer_is_identity() {
        let head = AblationHead::SingleTransformer(TransformerBlock::zeroed(8, 2).unwrap());
        let x = tokens();
        assert_eq!(head.apply(&x).unwrap(), x);
    }

    #[test]
    fn attention_keeps_shape() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let head = AblationHead::SingleAttention(MultiHeadAttention::new(8, 2, &mut rng).unwrap());
        assert_eq!(head.apply(&tokens()).unwrap().shape(), (5, 8));
    }
}
