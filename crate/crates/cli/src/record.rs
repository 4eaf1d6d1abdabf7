use std::fs::OpenOptions;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tsablate::eval::{AblationReport, BootstrapCI, MetricReport};
use tsablate::models::EpochRecord;

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub mae: f64,
    pub mse: f64,
    pub windows: usize,
    pub elements: usize,
}

impl From<&MetricReport> for Metrics {
    fn from(m: &MetricReport) -> Self {
        Self {
            mae: m.mae,
            mse: m.mse,
            windows: m.per_window_abs_errors.len(),
            elements: m.count,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lower: f64,
    pub point: f64,
    pub upper: f64,
}

impl From<&BootstrapCI> for Interval {
    fn from(c: &BootstrapCI) -> Self {
        Self {
            lower: c.lower,
            point: c.point,
            upper: c.upper,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CiRecord {
    pub level: f64,
    pub replicates: usize,
    pub seed: u64,
    pub unit: String,
    pub mae: Interval,
    pub mse: Interval,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationRow {
    pub kind: String,
    pub mae: f64,
    pub mse: f64,
    /// `None` when the baseline error is zero.
    pub mae_degradation_pct: Option<f64>,
    pub mse_degradation_pct: Option<f64>,
}

pub fn ablation_rows(report: &AblationReport) -> Vec<AblationRow> {
    report
        .entries
        .iter()
        .map(|e| AblationRow {
            kind: e.kind.name(),
            mae: e.perturbed.mae,
            mse: e.perturbed.mse,
            mae_degradation_pct: e.degradation.mae_pct,
            mse_degradation_pct: e.degradation.mse_pct,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRow {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_mse: Option<f64>,
    pub learning_rate: f64,
}

impl From<&EpochRecord> for EpochRow {
    fn from(e: &EpochRecord) -> Self {
        Self {
            epoch: e.epoch,
            train_loss: e.train_loss,
            val_mse: e.val_mse,
            learning_rate: e.learning_rate,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingSummary {
    pub train_windows: usize,
    pub parameters: usize,
    pub best_epoch: Option<usize>,
    pub history: Vec<EpochRow>,
}

/// One JSON line of a results file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub command: String,
    pub method: String,
    pub dataset: String,
    pub lookback: usize,
    pub horizon: usize,
    pub channels: usize,
    pub split: String,
    /// Metrics are computed on train-standardized values.
    pub units: String,
    pub seed: u64,
    pub config_hash: String,
    pub data_hash: String,
    pub config: ExperimentConfig,
    pub checkpoint: Option<PathBuf>,
    pub metrics: Metrics,
    pub ci: Option<CiRecord>,
    pub ablation: Option<Vec<AblationRow>>,
    pub training: Option<TrainingSummary>,
    pub wall_clock_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Artifacts {
    pub checkpoint: PathBuf,
    pub results: PathBuf,
    pub manifest: PathBuf,
}

/// Written next to each trained checkpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config_hash: String,
    pub data_hash: String,
    pub dataset_path: PathBuf,
    pub started_at: String,
    pub finished_at: String,
    pub artifacts: Artifacts,
    pub test_metrics: Metrics,
    pub config: ExperimentConfig,
}

pub fn append_record(path: &Path, record: &ResultRecord) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    let line = serde_json::to_string(record).expect("record serializes");
    let mut f = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| CliError::io(path, e))?;
    writeln!(f, "{line}").map_err(|e| CliError::io(path, e))
}

pub fn read_records(path: &Path) -> CliResult<Vec<ResultRecord>> {
    let f = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(f).lines().enumerate() {
        let line = line.map_err(|e| CliError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|source| CliError::Record {
            path: path.to_path_buf(),
            line: i + 1,
            source,
        })?);
    }
    Ok(out)
}

pub fn write_manifest(path: &Path, manifest: &RunManifest) -> CliResult<()> {
    let text = serde_json::to_string_pretty(manifest).expect("manifest serializes");
    std::fs::write(path, text + "\n").map_err(|e| CliError::io(path, e))
}

pub fn read_manifest(path: &Path) -> CliResult<RunManifest> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|source| CliError::Record {
        path: path.to_path_buf(),
        line: 1,
        source,
    })
}
