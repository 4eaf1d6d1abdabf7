use std::ops::Range;

use crate::error::{Error, Result};
use crate::nnkernel::Tensor2;

pub const STANDARDIZER_EPS: f64 = 1e-8;

/// Per-channel z-scoring fitted on training rows only.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    pub eps: f64,
}

pub fn fit_standardizer(values: &Tensor2, train: Range<usize>) -> Result<Standardizer> {
    if train.is_empty() || train.end > values.rows() {
        return Err(Error::Data(format!(
            "cannot fit standardizer on rows {train:?} of {}",
            values.rows()
        )));
    }
    let c = values.cols();
    let n = train.len() as f64;
    let mut mean = vec![0.0; c];
    for r in train.clone() {
        for (m, v) in mean.iter_mut().zip(values.row(r)) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    let mut var = vec![0.0; c];
    for r in train {
        for ((s, v), m) in var.iter_mut().zip(values.row(r)).zip(&mean) {
            *s += (v - m) * (v - m);
        }
    }
    let std = var
        .into_iter()
        .enumerate()
        .map(|(ch, s)| {
            let sd = (s / n).sqrt();
            if sd < STANDARDIZER_EPS {
                log::warn!("channel {ch} has zero variance on the train split; clamping std");
                STANDARDIZER_EPS
            } else {
                sd
            }
        })
        .collect();
    Ok(Standardizer {
        mean,
        std,
        eps: STANDARDIZER_EPS,
    })
}

impl Standardizer {
    pub fn apply(&self, values: &Tensor2) -> Result<Tensor2> {
        self.check(values)?;
        let mut out = values.clone();
        for r in 0..out.rows() {
            for (ch, v) in out.row_mut(r).iter_mut().enumerate() {
                *v = (*v - self.mean[ch]) / self.std[ch];
            }
        }
        Ok(out)
    }

    pub fn invert(&self, values: &Tensor2) -> Result<Tensor2> {
        self.check(values)?;
        let mut out = values.clone();
        for r in 0..out.rows() {
            for (ch, v) in out.row_mut(r).iter_mut().enumerate() {
                *v = *v * self.std[ch] + self.mean[ch];
            }
        }
        Ok(out)
    }

    fn check(&self, values: &Tensor2) -> Result<()> {
        if values.cols() != self.mean.len() {
            return Err(Error::dim(
                "standardizer",
                values.shape(),
                (values.rows(), self.mean.len()),
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_rows() {
        let v = Tensor2::from_rows(&[&[0.0], &[2.0], &[100.0]]);
        let s = fit_standardizer(&v, 0..2).unwrap();
        assert_eq!(s.mean, vec![1.0]);
        assert_eq!(s.std, vec![1.0]);
    }

    #[test]
    fn constant_channel_clamps() {
        let v = Tensor2::from_rows(&[&[3.0, 1.0], &[3.0, 2.0], &[3.0, 5.0]]);
        let s = fit_standardizer(&v, 0..3).unwrap();
        assert_eq!(s.std[0], STANDARDIZER_EPS);
        let z = s.apply(&v).unwrap();
        assert!(z.all_finite());
        assert_eq!(z.column(0), vec![0.0; 3]);
    }

    #[test]
    fn empty_range_rejected() {
        assert!(fit_standardizer(&Tensor2::zeros(3, 1), 0..0).is_err());
    }
}
