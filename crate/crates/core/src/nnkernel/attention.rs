use rand::Rng;

use super::param::{join, Parameter, Parameterized};
use super::tensor::{dot, matmul, matmul_a_bt, matmul_at_b, softmax_in_place, Tensor2};
use crate::error::{Error, Result};

/// Bidirectional multi-head self-attention without biases or masking.
///
/// Inputs may hold several independent sequences stacked vertically; each
/// block of `seq_len` rows attends only within itself.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiHeadAttention {
    heads: usize,
    model_dim: usize,
    pub wq: Parameter,
    pub wk: Parameter,
    pub wv: Parameter,
    pub wo: Parameter,
}

#[derive(Debug, Clone)]
pub struct AttentionCache {
    seq_len: usize,
    x: Tensor2,
    q: Tensor2,
    k: Tensor2,
    v: Tensor2,
    /// Attention probabilities, laid out `[seq][head][query][key]`.
    probs: Vec<f64>,
    concat: Tensor2,
}

impl AttentionCache {
    /// Probability matrix (`seq_len x seq_len`) for one sequence and head.
    pub fn weights(&self, seq: usize, head: usize, heads: usize) -> Tensor2 {
        let n = self.seq_len;
        let off = (seq * heads + head) * n * n;
        Tensor2::from_vec(n, n, self.probs[off..off + n * n].to_vec()).expect("square block")
    }
}

impl MultiHeadAttention {
    pub fn new(model_dim: usize, heads: usize, rng: &mut impl Rng) -> Result<Self> {
        Self::check_dims(model_dim, heads)?;
        Ok(Self {
            heads,
            model_dim,
            wq: Parameter::xavier_uniform(model_dim, model_dim, rng),
            wk: Parameter::xavier_uniform(model_dim, model_dim, rng),
            wv: Parameter::xavier_uniform(model_dim, model_dim, rng),
            wo: Parameter::xavier_uniform(model_dim, model_dim, rng),
        })
    }

    pub fn from_weights(
        heads: usize,
        wq: Tensor2,
        wk: Tensor2,
        wv: Tensor2,
        wo: Tensor2,
    ) -> Result<Self> {
        let d = wq.rows();
        Self::check_dims(d, heads)?;
        for w in [&wq, &wk, &wv, &wo] {
            if w.shape() != (d, d) {
                return Err(Error::dim("attention weights", (d, d), w.shape()));
            }
        }
        Ok(Self {
            heads,
            model_dim: d,
            wq: Parameter::new(wq),
            wk: Parameter::new(wk),
            wv: Parameter::new(wv),
            wo: Parameter::new(wo),
        })
    }

    fn check_dims(model_dim: usize, heads: usize) -> Result<()> {
        if heads == 0 || model_dim == 0 || !model_dim.is_multiple_of(heads) {
            return Err(Error::Config(format!(
                "model dim {model_dim} is not divisible by {heads} heads"
            )));
        }
        Ok(())
    }

    pub fn heads(&self) -> usize {
        self.heads
    }

    pub fn model_dim(&self) -> usize {
        self.model_dim
    }

    fn head_dim(&self) -> usize {
        self.model_dim / self.heads
    }

    fn check_input(&self, x: &Tensor2, seq_len: usize) -> Result<()> {
        if x.cols() != self.model_dim {
            return Err(Error::dim("attention input", x.shape(), (seq_len, self.model_dim)));
        }
        if seq_len == 0 || !x.rows().is_multiple_of(seq_len) {
            return Err(Error::dim("attention sequence split", x.shape(), (seq_len, self.model_dim)));
        }
        Ok(())
    }

    /// Single sequence: all rows of `x` attend to each other.
    pub fn forward(&self, x: &Tensor2) -> Result<(Tensor2, AttentionCache)> {
        self.forward_batch(x, x.rows())
    }

    pub fn forward_batch(&self, x: &Tensor2, seq_len: usize) -> Result<(Tensor2, AttentionCache)> {
        self.check_input(x, seq_len)?;
        let q = matmul(x, &self.wq.value)?;
        let k = matmul(x, &self.wk.value)?;
        let v = matmul(x, &self.wv.value)?;
        let n = seq_len;
        let d = self.model_dim;
        let dk = self.head_dim();
        let scale = 1.0 / (dk as f64).sqrt();
        let seqs = x.rows() / n;
        let mut probs = vec![0.0; seqs * self.heads * n * n];
        let mut concat = Tensor2::zeros(x.rows(), d);
        let (qs, ks, vs) = (q.as_slice(), k.as_slice(), v.as_slice());
        let cs = concat.as_mut_slice();
        for s in 0..seqs {
            let base = s * n;
            for h in 0..self.heads {
                let hs = h * dk;
                let pblock = &mut probs[(s * self.heads + h) * n * n..][..n * n];
                for i in 0..n {
                    let qi = &qs[(base + i) * d + hs..][..dk];
                    let prow = &mut pblock[i * n..(i + 1) * n];
                    for (j, p) in prow.iter_mut().enumerate() {
                        let kj = &ks[(base + j) * d + hs..][..dk];
                        *p = dot(qi, kj) * scale;
                    }
                    softmax_in_place(prow);
                    let orow = &mut cs[(base + i) * d + hs..][..dk];
                    for (j, &p) in prow.iter().enumerate() {
                        let vj = &vs[(base + j) * d + hs..][..dk];
                        for (o, &vv) in orow.iter_mut().zip(vj) {
                            *o += p * vv;
                        }
                    }
                }
            }
        }
        let y = matmul(&concat, &self.wo.value)?;
        Ok((
            y,
            AttentionCache {
                seq_len,
                x: x.clone(),
                q,
                k,
                v,
                probs,
                concat,
            },
        ))
    }

    /// Accumulates weight gradients and returns the token gradient.
    pub fn backward(&mut self, cache: &AttentionCache, dy: &Tensor2) -> Result<Tensor2> {
        if dy.shape() != cache.x.shape() {
            return Err(Error::dim("attention backward", dy.shape(), cache.x.shape()));
        }
        let n = cache.seq_len;
        let d = self.model_dim;
        let dk = self.head_dim();
        let scale = 1.0 / (dk as f64).sqrt();
        let seqs = cache.x.rows() / n;

        self.wo.grad.add_assign(&matmul_at_b(&cache.concat, dy)?)?;
        let dconcat = matmul_a_bt(dy, &self.wo.value)?;

        let rows = cache.x.rows();
        let mut dq = Tensor2::zeros(rows, d);
        let mut dk_t = Tensor2::zeros(rows, d);
        let mut dv = Tensor2::zeros(rows, d);
        let (qs, ks, vs) = (cache.q.as_slice(), cache.k.as_slice(), cache.v.as_slice());
        let dos = dconcat.as_slice();
        let mut dprob = vec![0.0; n];
        {
            let (dqs, dks, dvs) = (dq.as_mut_slice(), dk_t.as_mut_slice(), dv.as_mut_slice());
            for s in 0..seqs {
                let base = s * n;
                for h in 0..self.heads {
                    let hs = h * dk;
                    let pblock = &cache.probs[(s * self.heads + h) * n * n..][..n * n];
                    for i in 0..n {
                        let doi = &dos[(base + i) * d + hs..][..dk];
                        let prow = &pblock[i * n..(i + 1) * n];
                        // dA = dO · Vᵀ ; dV += Aᵀ · dO
                        for j in 0..n {
                            let vj = &vs[(base + j) * d + hs..][..dk];
                            dprob[j] = dot(doi, vj);
                            let dvj = &mut dvs[(base + j) * d + hs..][..dk];
                            let p = prow[j];
                            for (g, &o) in dvj.iter_mut().zip(doi) {
                                *g += p * o;
                            }
                        }
                        // softmax Jacobian
                        let inner = dot(prow, &dprob);
                        let qi = &qs[(base + i) * d + hs..][..dk];
                        for j in 0..n {
                            let ds = prow[j] * (dprob[j] - inner) * scale;
                            if ds == 0.0 {
                                continue;
                            }
                            let kj = &ks[(base + j) * d + hs..][..dk];
                            let dqi = &mut dqs[(base + i) * d + hs..][..dk];
                            for (g, &kv) in dqi.iter_mut().zip(kj) {
                                *g += ds * kv;
                            }
                            let dkj = &mut dks[(base + j) * d + hs..][..dk];
                            for (g, &qv) in dkj.iter_mut().zip(qi) {
                                *g += ds * qv;
                            }
                        }
                    }
                }
            }
        }
        self.wq.grad.add_assign(&matmul_at_b(&cache.x, &dq)?)?;
        self.wk.grad.add_assign(&matmul_at_b(&cache.x, &dk_t)?)?;
        self.wv.grad.add_assign(&matmul_at_b(&cache.x, &dv)?)?;
        let mut dx = matmul_a_bt(&dq, &self.wq.value)?;
        dx.add_assign(&matmul_a_bt(&dk_t, &self.wk.value)?)?;
        dx.add_assign(&matmul_a_bt(&dv, &self.wv.value)?)?;
        Ok(dx)
    }
}

impl Parameterized for MultiHeadAttention {
    fn visit_params(&self, prefix: &str, f: &mut dyn FnMut(String, &Parameter)) {
        f(join(prefix, "wq"), &self.wq);
        f(join(prefix, "wk"), &self.wk);
        f(join(prefix, "wv"), &self.wv);
        f(join(prefix, "wo"), &self.wo);
    }

    fn visit_params_mut(&mut self, prefix: &str, f: &mut dyn FnMut(String, &mut Parameter)) {
        f(join(prefix, "wq"), &mut self.wq);
        f(join(prefix, "wk"), &mut self.wk);
        f(join(prefix, "wv"), &mut self.wv);
        f(join(prefix, "wo"), &mut self.wo);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rejects_indivisible_heads() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            MultiHeadAttention::new(6, 4, &mut rng),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn uniform_attention_averages_tokens() {
        let d = 3;
        let attn = MultiHeadAttention::from_weights(
            1,
            Tensor2::zeros(d, d),
            Tensor2::zeros(d, d),
            Tensor2::identity(d),
            Tensor2::identity(d),
        )
        .unwrap();
        let x = Tensor2::from_rows(&[&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0], &[-2.0, 0.0, 9.0], &[1.0, 1.0, 2.0]]);
        let (y, _) = attn.forward(&x).unwrap();
        let mean = x.sum_rows().scale(0.25);
        for r in 0..4 {
            for c in 0..d {
                assert!((y.get(r, c) - mean.get(0, c)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn single_token_attends_to_itself() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let attn = MultiHeadAttention::new(4, 2, &mut rng).unwrap();
        let x = Tensor2::from_rows(&[&[0.3, -1.0, 2.0, 0.5]]);
        let (y, cache) = attn.forward(&x).unwrap();
        for h in 0..2 {
            assert_eq!(cache.weights(0, h, 2).as_slice(), &[1.0]);
        }
        let expect = matmul(&matmul(&x, &attn.wv.value).unwrap(), &attn.wo.value).unwrap();
        assert!(y.max_abs_diff(&expect) < 1e-12);
    }

    #[test]
    fn batched_sequences_do_not_interact() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let attn = MultiHeadAttention::new(4, 2, &mut rng).unwrap();
        let a = Tensor2::from_fn(3, 4, |r, c| (r * 4 + c) as f64 * 0.1 - 0.4);
        let b = Tensor2::from_fn(3, 4, |r, c| ((r + c) % 3) as f64 - 1.0);
        let stacked = Tensor2::vstack(&[a.clone(), b.clone()]).unwrap();
        let (ys, _) = attn.forward_batch(&stacked, 3).unwrap();
        let (ya, _) = attn.forward(&a).unwrap();
        let (yb, _) = attn.forward(&b).unwrap();
        assert_eq!(ys, Tensor2::vstack(&[ya, yb]).unwrap());
    }

    #[test]
    fn attention_rows_sum_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let attn = MultiHeadAttention::new(8, 4, &mut rng).unwrap();
        let x = Tensor2::from_fn(6, 8, |r, c| ((r * 7 + c * 3) % 5) as f64 - 2.0);
        let (_, cache) = attn.forward(&x).unwrap();
        for h in 0..4 {
            let w = cache.weights(0, h, 4);
            for r in 0..6 {
                assert!((w.row(r).iter().sum::<f64>() - 1.0).abs() < 1e-12);
            }
        }
    }
}
