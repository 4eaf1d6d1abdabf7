use super::param::{join, Parameter, Parameterized};
use super::tensor::Tensor2;
use crate::error::{Error, Result};

pub const LAYERNORM_EPS: f64 = 1e-5;

/// Row-wise layer normalization with learnable scale and shift.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerNorm {
    pub gamma: Parameter,
    pub beta: Parameter,
    pub eps: f64,
}

#[derive(Debug, Clone)]
pub struct LayerNormCache {
    xhat: Tensor2,
    inv_std: Vec<f64>,
}

impl LayerNorm {
    pub fn new(dim: usize) -> Self {
        Self {
            gamma: Parameter::new(Tensor2::filled(1, dim, 1.0)),
            beta: Parameter::zeros(1, dim),
            eps: LAYERNORM_EPS,
        }
    }

    pub fn dim(&self) -> usize {
        self.gamma.value.cols()
    }

    pub fn forward(&self, x: &Tensor2) -> Result<(Tensor2, LayerNormCache)> {
        let d = self.dim();
        if x.cols() != d {
            return Err(Error::dim("layernorm", x.shape(), (x.rows(), d)));
        }
        let mut xhat = Tensor2::zeros(x.rows(), d);
        let mut y = Tensor2::zeros(x.rows(), d);
        let mut inv_std = Vec::with_capacity(x.rows());
        let g = self.gamma.value.as_slice();
        let b = self.beta.value.as_slice();
        for r in 0..x.rows() {
            let row = x.row(r);
            let mean = row.iter().sum::<f64>() / d as f64;
            let var = row.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / d as f64;
            let is = 1.0 / (var + self.eps).sqrt();
            inv_std.push(is);
            let xr = xhat.row_mut(r);
            for (o, v) in xr.iter_mut().zip(row) {
                *o = (v - mean) * is;
            }
            let xr = xhat.row(r).to_vec();
            for (c, o) in y.row_mut(r).iter_mut().enumerate() {
                *o = g[c] * xr[c] + b[c];
            }
        }
        Ok((y, LayerNormCache { xhat, inv_std }))
    }

    pub fn backward(&mut self, cache: &LayerNormCache, dy: &Tensor2) -> Result<Tensor2> {
        if dy.shape() != cache.xhat.shape() {
            return Err(Error::dim("layernorm backward", dy.shape(), cache.xhat.shape()));
        }
        let d = self.dim();
        let g = self.gamma.value.as_slice().to_vec();
        let mut dx = Tensor2::zeros(dy.rows(), d);
        let dg = self.gamma.grad.as_mut_slice();
        let db = self.beta.grad.as_mut_slice();
        let mut dxhat = vec![0.0; d];
        for r in 0..dy.rows() {
            let dyr = dy.row(r);
            let xr = cache.xhat.row(r);
            for c in 0..d {
                dg[c] += dyr[c] * xr[c];
                db[c] += dyr[c];
                dxhat[c] = dyr[c] * g[c];
            }
            let mean_d = dxhat.iter().sum::<f64>() / d as f64;
            let mean_dx = dxhat.iter().zip(xr).map(|(a, b)| a * b).sum::<f64>() / d as f64;
            let is = cache.inv_std[r];
            for (c, o) in dx.row_mut(r).iter_mut().enumerate() {
                *o = is * (dxhat[c] - mean_d - xr[c] * mean_dx);
            }
        }
        Ok(dx)
    }
}

impl Parameterized for LayerNorm {
    fn visit_params(&self, prefix: &str, f: &mut dyn FnMut(String, &Parameter)) {
        f(join(prefix, "gamma"), &self.gamma);
        f(join(prefix, "beta"), &self.beta);
    }

    fn visit_params_mut(&mut self, prefix: &str, f: &mut dyn FnMut(String, &mut Parameter)) {
        f(join(prefix, "gamma"), &mut self.gamma);
        f(join(prefix, "beta"), &mut self.beta);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_row_maps_to_zero() {
        let ln = LayerNorm::new(3);
        let (y, _) = ln.forward(&Tensor2::filled(1, 3, 4.2)).unwrap();
        assert_eq!(y.as_slice(), &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn rows_have_zero_mean() {
        let ln = LayerNorm::new(5);
        let x = Tensor2::from_fn(4, 5, |r, c| ((r + 1) * (c * c + 1)) as f64 * 0.37 - 3.0);
        let (y, _) = ln.forward(&x).unwrap();
        for r in 0..4 {
            let m = y.row(r).iter().sum::<f64>() / 5.0;
            assert!(m.abs() < 1e-12);
            let v = y.row(r).iter().map(|v| v * v).sum::<f64>() / 5.0;
            assert!((v - 1.0).abs() < 1e-3);
        }
    }
}
