use super::tensor::Tensor2;
use crate::error::{Error, Result};

/// Mean squared error and its gradient with respect to `pred`.
pub fn mse_loss_with_grad(pred: &Tensor2, target: &Tensor2) -> Result<(f64, Tensor2)> {
    if pred.shape() != target.shape() {
        return Err(Error::dim("mse_loss", pred.shape(), target.shape()));
    }
    let n = pred.len() as f64;
    let diff = pred.sub(target)?;
    let loss = diff.as_slice().iter().map(|d| d * d).sum::<f64>() / n;
    Ok((loss, diff.scale(2.0 / n)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_inputs_give_zero() {
        let p = Tensor2::from_rows(&[&[1.0, -3.0], &[2.0, 0.5]]);
        let (l, g) = mse_loss_with_grad(&p, &p).unwrap();
        assert_eq!(l, 0.0);
        assert!(g.as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn hand_example() {
        let (l, g) = mse_loss_with_grad(
            &Tensor2::from_rows(&[&[1.0, 2.0]]),
            &Tensor2::from_rows(&[&[0.0, 2.0]]),
        )
        .unwrap();
        assert_eq!(l, 0.5);
        assert_eq!(g.as_slice(), &[1.0, 0.0]);
    }

    #[test]
    fn grad_matches_finite_differences() {
        let pred = Tensor2::from_rows(&[&[0.3, -1.2, 2.0], &[0.0, 4.0, -0.7]]);
        let target = Tensor2::from_rows(&[&[1.0, 0.2, -2.0], &[0.5, 3.0, 0.7]]);
        let (_, g) = mse_loss_with_grad(&pred, &target).unwrap();
        let h = 1e-6;
        for i in 0..pred.len() {
            let mut p = pred.clone();
            p.as_mut_slice()[i] += h;
            let up = mse_loss_with_grad(&p, &target).unwrap().0;
            p.as_mut_slice()[i] -= 2.0 * h;
            let down = mse_loss_with_grad(&p, &target).unwrap().0;
            assert!(((up - down) / (2.0 * h) - g.as_slice()[i]).abs() < 1e-6);
        }
    }

    #[test]
    fn shape_mismatch() {
        assert!(mse_loss_with_grad(&Tensor2::zeros(1, 2), &Tensor2::zeros(2, 1)).is_err());
    }
}
