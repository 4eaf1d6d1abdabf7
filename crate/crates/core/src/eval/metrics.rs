use crate::error::{Error, Result};
use crate::nnkernel::Tensor2;

/// MAE/MSE over a set of equally shaped forecast windows.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub mae: f64,
    pub mse: f64,
    /// Mean absolute error of each window.
    pub per_window_abs_errors: Vec<f64>,
    /// Mean squared error of each window.
    pub per_window_sq_errors: Vec<f64>,
    /// Total number of scored elements.
    pub count: usize,
}

pub fn compute_metrics(predictions: &[Tensor2], targets: &[Tensor2]) -> Result<MetricReport> {
    if predictions.is_empty() {
        return Err(Error::Data("no windows to score".into()));
    }
    if predictions.len() != targets.len() {
        return Err(Error::dim(
            "compute_metrics window count",
            (predictions.len(), 0),
            (targets.len(), 0),
        ));
    }
    let shape = predictions[0].shape();
    let mut abs_errors = Vec::with_capacity(predictions.len());
    let mut sq_errors = Vec::with_capacity(predictions.len());
    for (p, t) in predictions.iter().zip(targets) {
        if p.shape() != t.shape() || p.shape() != shape {
            return Err(Error::dim("compute_metrics", p.shape(), t.shape()));
        }
        let n = p.len() as f64;
        let (mut a, mut s) = (0.0, 0.0);
        for (x, y) in p.as_slice().iter().zip(t.as_slice()) {
            let d = x - y;
            a += d.abs();
            s += d * d;
        }
        abs_errors.push(a / n);
        sq_errors.push(s / n);
    }
    Ok(MetricReport {
        mae: mean(&abs_errors),
        mse: mean(&sq_errors),
        count: predictions.len() * shape.0 * shape.1,
        per_window_abs_errors: abs_errors,
        per_window_sq_errors: sq_errors,
    })
}

/// Neumaier-compensated mean; exact for constant inputs.
pub(crate) fn mean(v: &[f64]) -> f64 {
    compensated_sum(v.iter().copied()) / v.len() as f64
}

pub(crate) fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for x in values {
        let t = sum + x;
        comp += if sum.abs() >= x.abs() { (sum - t) + x } else { (x - t) + sum };
        sum = t;
    }
    sum + comp
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_forecast() {
        let p = vec![Tensor2::from_rows(&[&[1.0, 2.0], &[3.0, 4.0]])];
        let r = compute_metrics(&p, &p).unwrap();
        assert_eq!((r.mae, r.mse), (0.0, 0.0));
        assert_eq!(r.count, 4);
    }

    #[test]
    fn hand_example() {
        let r = compute_metrics(
            &[Tensor2::from_rows(&[&[1.0, 2.0]])],
            &[Tensor2::from_rows(&[&[0.0, 2.0]])],
        )
        .unwrap();
        assert_eq!((r.mae, r.mse), (0.5, 0.5));
    }

    #[test]
    fn empty_and_mismatched() {
        assert!(compute_metrics(&[], &[]).is_err());
        assert!(compute_metrics(&[Tensor2::zeros(2, 1)], &[Tensor2::zeros(1, 2)]).is_err());
    }
}
