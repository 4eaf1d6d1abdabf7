use rand::Rng;

use super::param::{join, Parameter, Parameterized};
use super::tensor::{matmul, matmul_a_bt, matmul_at_b, Tensor2};
use crate::error::{Error, Result};

/// Affine map `x · W + b` over rows of `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearLayer {
    pub weight: Parameter,
    pub bias: Parameter,
}

/// Forward activations kept for the backward pass.
#[derive(Debug, Clone)]
pub struct LinearCache {
    input: Tensor2,
}

impl LinearLayer {
    pub fn new(d_in: usize, d_out: usize, rng: &mut impl Rng) -> Self {
        Self {
            weight: Parameter::xavier_uniform(d_in, d_out, rng),
            bias: Parameter::zeros(1, d_out),
        }
    }

    pub fn from_weights(weight: Tensor2, bias: Tensor2) -> Result<Self> {
        if bias.rows() != 1 || weight.cols() != bias.cols() {
            return Err(Error::dim("linear bias", weight.shape(), bias.shape()));
        }
        Ok(Self {
            weight: Parameter::new(weight),
            bias: Parameter::new(bias),
        })
    }

    pub fn zeros(d_in: usize, d_out: usize) -> Self {
        Self {
            weight: Parameter::zeros(d_in, d_out),
            bias: Parameter::zeros(1, d_out),
        }
    }

    pub fn d_in(&self) -> usize {
        self.weight.value.rows()
    }

    pub fn d_out(&self) -> usize {
        self.weight.value.cols()
    }

    pub fn infer(&self, x: &Tensor2) -> Result<Tensor2> {
        if x.cols() != self.d_in() {
            return Err(Error::dim("linear forward", x.shape(), self.weight.shape()));
        }
        let mut y = matmul(x, &self.weight.value)?;
        let b = self.bias.value.as_slice();
        for r in 0..y.rows() {
            for (o, bv) in y.row_mut(r).iter_mut().zip(b) {
                *o += bv;
            }
        }
        Ok(y)
    }

    pub fn forward(&self, x: &Tensor2) -> Result<(Tensor2, LinearCache)> {
        let y = self.infer(x)?;
        Ok((y, LinearCache { input: x.clone() }))
    }

    /// Accumulates `dW`, `db` and returns `dx`.
    pub fn backward(&mut self, cache: &LinearCache, dy: &Tensor2) -> Result<Tensor2> {
        if dy.rows() != cache.input.rows() || dy.cols() != self.d_out() {
            return Err(Error::dim(
                "linear backward",
                dy.shape(),
                (cache.input.rows(), self.d_out()),
            ));
        }
        let dw = matmul_at_b(&cache.input, dy)?;
        self.weight.grad.add_assign(&dw)?;
        self.bias.grad.add_assign(&dy.sum_rows())?;
        matmul_a_bt(dy, &self.weight.value)
    }
}

impl Parameterized for LinearLayer {
    fn visit_params(&self, prefix: &str, f: &mut dyn FnMut(String, &Parameter)) {
        f(join(prefix, "weight"), &self.weight);
        f(join(prefix, "bias"), &self.bias);
    }

    fn visit_params_mut(&mut self, prefix: &str, f: &mut dyn FnMut(String, &mut Parameter)) {
        f(join(prefix, "weight"), &mut self.weight);
        f(join(prefix, "bias"), &mut self.bias);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_weights_pass_through() {
        let layer = LinearLayer::from_weights(Tensor2::identity(3), Tensor2::zeros(1, 3)).unwrap();
        let x = Tensor2::from_rows(&[&[1.0, -2.0, 0.5], &[4.0, 0.0, 9.0]]);
        assert_eq!(layer.infer(&x).unwrap(), x);
    }

    #[test]
    fn bias_only() {
        let layer =
            LinearLayer::from_weights(Tensor2::zeros(1, 1), Tensor2::filled(1, 1, 5.0)).unwrap();
        let y = layer.infer(&Tensor2::filled(1, 1, -17.0)).unwrap();
        assert_eq!(y.as_slice(), &[5.0]);
    }

    #[test]
    fn shape_errors() {
        let mut layer = LinearLayer::zeros(3, 2);
        assert!(layer.infer(&Tensor2::zeros(1, 4)).is_err());
        let (_, cache) = layer.forward(&Tensor2::zeros(2, 3)).unwrap();
        assert!(layer.backward(&cache, &Tensor2::zeros(2, 3)).is_err());
        assert!(LinearLayer::from_weights(Tensor2::zeros(3, 2), Tensor2::zeros(1, 3)).is_err());
    }
}
