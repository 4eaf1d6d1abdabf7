//! Metrics, bootstrap intervals, lookback perturbations and result tables.

mod bootstrap;
mod degradation;
mod metrics;
mod perturb;
mod table;
mod wins;

pub use bootstrap::{bootstrap_ci, quantile_sorted, BootstrapCI, DEFAULT_REPLICATES};
pub use degradation::{
    degradation_pct, evaluate_model, evaluate_perturbed, percent_change, run_ablation,
    AblationEntry, AblationReport, Degradation,
};
pub use metrics::{compute_metrics, MetricReport};
pub use perturb::{
    derive_seed, permutation, perturb_window, PerturbationKind, DEFAULT_MASKING_RATIO,
};
pub use table::{
    emit_table, parse_csv_table, GridRow, Metric, ResultEntry, ResultGrid, TableFormat, TableLayout,
};
pub use wins::{count_wins, WinsTally};
