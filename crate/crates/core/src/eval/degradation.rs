use super::metrics::{compute_metrics, MetricReport};
use super::perturb::{derive_seed, perturb_window, PerturbationKind};
use crate::data::WindowSampler;
use crate::error::Result;
use crate::models::ForecastModel;

/// Relative error increase after a perturbation, per metric.
/// `None` marks an undefined percentage (zero baseline).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Degradation {
    pub mse_pct: Option<f64>,
    pub mae_pct: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AblationEntry {
    pub kind: PerturbationKind,
    pub perturbed: MetricReport,
    pub degradation: Degradation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AblationReport {
    pub baseline: MetricReport,
    pub entries: Vec<AblationEntry>,
}

/// `100 * (perturbed - baseline) / baseline`.
pub fn percent_change(baseline: f64, perturbed: f64) -> Option<f64> {
    (baseline > 0.0 && baseline.is_finite()).then(|| 100.0 * (perturbed - baseline) / baseline)
}

pub fn degradation_pct(baseline: &MetricReport, perturbed: &MetricReport) -> Degradation {
    Degradation {
        mse_pct: percent_change(baseline.mse, perturbed.mse),
        mae_pct: percent_change(baseline.mae, perturbed.mae),
    }
}

/// Scores `model` on every window of `sampler`.
pub fn evaluate_model(
    model: &ForecastModel,
    sampler: &WindowSampler<'_>,
    batch_size: usize,
) -> Result<MetricReport> {
    evaluate_with(model, sampler, batch_size, |_, w| w)
}

/// Scores `model` with the lookback of window `i` perturbed under seed
/// `derive_seed(seed, i)`. Targets are left untouched.
pub fn evaluate_perturbed(
    model: &ForecastModel,
    sampler: &WindowSampler<'_>,
    kind: PerturbationKind,
    seed: u64,
    batch_size: usize,
) -> Result<MetricReport> {
    evaluate_with(model, sampler, batch_size, |i, w| {
        perturb_window(&w, kind, derive_seed(seed, i as u64))
    })
}

pub fn run_ablation(
    model: &ForecastModel,
    sampler: &WindowSampler<'_>,
    kinds: &[PerturbationKind],
    seed: u64,
    batch_size: usize,
) -> Result<AblationReport> {
    let baseline = evaluate_model(model, sampler, batch_size)?;
    let entries = kinds
        .iter()
        .map(|&kind| {
            let perturbed = evaluate_perturbed(model, sampler, kind, seed, batch_size)?;
            Ok(AblationEntry {
                kind,
                degradation: degradation_pct(&baseline, &perturbed),
                perturbed,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AblationReport { baseline, entries })
}

fn evaluate_with(
    model: &ForecastModel,
    sampler: &WindowSampler<'_>,
    batch_size: usize,
    mut transform: impl FnMut(usize, crate::nnkernel::Tensor2) -> crate::nnkernel::Tensor2,
) -> Result<MetricReport> {
    let n = sampler.len();
    let mut preds = Vec::with_capacity(n);
    let mut targets = Vec::with_capacity(n);
    let batch = batch_size.max(1);
    let mut start = 0;
    while start < n {
        let end = (start + batch).min(n);
        let mut inputs = Vec::with_capacity(end - start);
        for i in start..end {
            let w = sampler.get(i);
            inputs.push(transform(i, w.lookback));
            targets.push(w.target);
        }
        preds.extend(model.predict_batch(&inputs)?);
        start = end;
    }
    compute_metrics(&preds, &targets)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(mae: f64, mse: f64) -> MetricReport {
        MetricReport {
            mae,
            mse,
            per_window_abs_errors: vec![mae],
            per_window_sq_errors: vec![mse],
            count: 1,
        }
    }

    #[test]
    fn zero_and_fifty_percent() {
        let d = degradation_pct(&report(0.3, 0.4), &report(0.3, 0.6));
        assert_eq!(d.mae_pct, Some(0.0));
        assert!((d.mse_pct.unwrap() - 50.0).abs() < 1e-12);
    }

    #[test]
    fn zero_baseline_is_undefined() {
        let d = degradation_pct(&report(0.0, 0.0), &report(0.1, 0.1));
        assert_eq!((d.mae_pct, d.mse_pct), (None, None));
    }
}
