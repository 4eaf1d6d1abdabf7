use super::param::{Parameter, Parameterized};
use crate::error::{Error, Result};

/// Outcome of a finite-difference gradient comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckReport {
    pub max_relative_error: f64,
    pub worst_param: String,
    pub worst_index: usize,
    pub entries_checked: usize,
}

/// Compares analytic gradients against central differences.
///
/// `loss_fn` must run a full forward and backward pass, accumulating into the
/// parameter grads, and return the scalar loss. The error per entry is
/// `|analytic - numeric| / max(1, |analytic|, |numeric|)`.
pub fn grad_check<M, F>(model: &mut M, loss_fn: F, h: f64) -> Result<f64>
where
    M: Parameterized + ?Sized,
    F: FnMut(&mut M) -> Result<f64>,
{
    grad_check_report(model, loss_fn, h).map(|r| r.max_relative_error)
}

pub fn grad_check_report<M, F>(model: &mut M, mut loss_fn: F, h: f64) -> Result<GradCheckReport>
where
    M: Parameterized + ?Sized,
    F: FnMut(&mut M) -> Result<f64>,
{
    model.zero_grads();
    let base = loss_fn(model)?;
    if !base.is_finite() {
        return Err(Error::NonFinite(format!("loss at the check point is {base}")));
    }
    let mut analytic: Vec<(String, Vec<f64>)> = Vec::new();
    model.visit_params("", &mut |name, p| {
        analytic.push((name, p.grad.as_slice().to_vec()))
    });

    let mut report = GradCheckReport {
        max_relative_error: 0.0,
        worst_param: String::new(),
        worst_index: 0,
        entries_checked: 0,
    };
    for (pi, (name, grads)) in analytic.iter().enumerate() {
        for (ei, &a) in grads.iter().enumerate() {
            nudge(model, pi, ei, h);
            let up = loss_fn(model)?;
            nudge(model, pi, ei, -2.0 * h);
            let down = loss_fn(model)?;
            nudge(model, pi, ei, h);
            if !up.is_finite() || !down.is_finite() {
                return Err(Error::NonFinite(format!(
                    "perturbed loss for {name}[{ei}] is not finite"
                )));
            }
            let numeric = (up - down) / (2.0 * h);
            let err = (a - numeric).abs() / 1f64.max(a.abs()).max(numeric.abs());
            report.entries_checked += 1;
            if err > report.max_relative_error {
                report.max_relative_error = err;
                report.worst_param = name.clone();
                report.worst_index = ei;
            }
        }
    }
    model.zero_grads();
    Ok(report)
}

fn nudge<M: Parameterized + ?Sized>(model: &mut M, param: usize, entry: usize, delta: f64) {
    let mut idx = 0;
    model.visit_params_mut("", &mut |_, p: &mut Parameter| {
        if idx == param {
            p.value.as_mut_slice()[entry] += delta;
        }
        idx += 1;
    });
}
