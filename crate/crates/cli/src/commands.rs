use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use tsablate::data::{content_hash, WindowSampler};
use tsablate::eval::{
    bootstrap_ci, emit_table, evaluate_model, run_ablation, Metric, MetricReport, ResultEntry,
    ResultGrid, TableFormat, TableLayout, WinsTally,
};
use tsablate::models::{load_checkpoint, save_checkpoint, train_model, ForecastModel, ModelConfig};
use tsablate::nnkernel::Parameterized;

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};
use crate::pipeline::{prepare, Prepared};
use crate::record::{
    ablation_rows, append_record, read_records, write_manifest, Artifacts, CiRecord, EpochRow,
    ResultRecord, RunManifest, TrainingSummary,
};

pub const RESULTS_FILE: &str = "results.jsonl";

fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

fn method_label(cfg: &ExperimentConfig, model: &ModelConfig) -> String {
    if cfg.data.fewshot {
        format!("{}-fewshot", model.kind.name())
    } else {
        model.kind.name().to_string()
    }
}

fn run_id(dataset: &str, method: &str, model: &ModelConfig, seed: u64) -> String {
    let raw = format!("{dataset}_{method}_L{}_H{}_s{seed}", model.lookback, model.horizon);
    raw.chars()
        .map(|c| if c.is_ascii_alphanumeric() || "-_.".contains(c) { c } else { '_' })
        .collect()
}

/// Dataset plus resolved model configuration for one invocation.
struct Setup {
    data: Prepared,
    model_cfg: ModelConfig,
}

fn setup(cfg: &mut ExperimentConfig, checkpoint: Option<&ForecastModel>) -> CliResult<Setup> {
    let data = prepare(cfg)?;
    let model_cfg = match checkpoint {
        Some(model) => {
            let mc = model.config().clone();
            if mc.channels != data.channels() {
                return Err(tsablate::Error::Data(format!(
                    "checkpoint expects C={} channels but {} has C={}",
                    mc.channels,
                    data.path.display(),
                    data.channels()
                ))
                .into());
            }
            cfg.adopt_model(&mc);
            mc
        }
        None => cfg.resolve(&data.name, data.raw.sampling_rate, data.channels())?,
    };
    data.check_window_fit(model_cfg.lookback, model_cfg.horizon)?;
    Ok(Setup { data, model_cfg })
}

fn load_model(path: &Path) -> CliResult<ForecastModel> {
    load_checkpoint(path).map_err(|e| match e {
        tsablate::Error::Io(io) => {
            tsablate::Error::Data(format!("cannot read checkpoint {}: {io}", path.display())).into()
        }
        tsablate::Error::Checkpoint(m) => {
            tsablate::Error::Checkpoint(format!("{}: {m}", path.display())).into()
        }
        other => other.into(),
    })
}

fn confidence(cfg: &ExperimentConfig, report: &MetricReport) -> CliResult<Option<CiRecord>> {
    if !cfg.eval.ci {
        return Ok(None);
    }
    let (level, b, seed) = (cfg.eval.level, cfg.eval.replicates, cfg.train.seed);
    let mae = bootstrap_ci(&report.per_window_abs_errors, level, b, seed)?;
    let mse = bootstrap_ci(&report.per_window_sq_errors, level, b, seed)?;
    Ok(Some(CiRecord {
        level,
        replicates: b,
        seed,
        unit: "window".into(),
        mae: (&mae).into(),
        mse: (&mse).into(),
    }))
}

fn base_record(
    command: &str,
    cfg: &ExperimentConfig,
    setup: &Setup,
    metrics: &MetricReport,
    started: Instant,
) -> ResultRecord {
    ResultRecord {
        command: command.into(),
        method: method_label(cfg, &setup.model_cfg),
        dataset: setup.data.name.clone(),
        lookback: setup.model_cfg.lookback,
        horizon: setup.model_cfg.horizon,
        channels: setup.model_cfg.channels,
        split: "test".into(),
        units: "standardized".into(),
        seed: cfg.train.seed,
        config_hash: content_hash(cfg.to_canonical_json().as_bytes()),
        data_hash: setup.data.data_hash.clone(),
        config: cfg.clone(),
        checkpoint: cfg.eval.checkpoint.clone(),
        metrics: metrics.into(),
        ci: None,
        ablation: None,
        training: None,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
    }
}

fn results_path(cfg: &ExperimentConfig) -> PathBuf {
    cfg.output.dir.join(RESULTS_FILE)
}

pub struct TrainOutput {
    pub record: ResultRecord,
    pub manifest: RunManifest,
}

pub fn train(mut cfg: ExperimentConfig) -> CliResult<TrainOutput> {
    let started_at = now();
    let clock = Instant::now();
    let setup = setup(&mut cfg, None)?;
    let (l, h) = (setup.model_cfg.lookback, setup.model_cfg.horizon);
    let train_sampler = setup.data.train_sampler(&cfg, l, h)?;
    let val_sampler = setup.data.val_sampler(l, h)?;
    let test_sampler = setup.data.test_sampler(l, h)?;

    let model = ForecastModel::new(setup.model_cfg.clone(), cfg.train.seed)?;
    let (model, best_epoch, history) = if model.is_trainable() {
        log::info!(
            "training {} ({} parameters) on {} windows",
            model.kind(),
            model.param_count(),
            train_sampler.len()
        );
        let out = train_model(model, &train_sampler, Some(&val_sampler), &cfg.train_config())?;
        (out.model, out.best_epoch, out.history)
    } else {
        (model, None, Vec::new())
    };

    std::fs::create_dir_all(&cfg.output.dir).map_err(|e| CliError::io(&cfg.output.dir, e))?;
    let method = method_label(&cfg, &setup.model_cfg);
    let id = run_id(&setup.data.name, &method, &setup.model_cfg, cfg.train.seed);
    let checkpoint = cfg.output.dir.join(format!("{id}.tsab"));
    let manifest_path = cfg.output.dir.join(format!("{id}.manifest.json"));
    save_checkpoint(&model, &checkpoint)?;
    cfg.eval.checkpoint = Some(checkpoint.clone());

    let metrics = evaluate_model(&model, &test_sampler, cfg.train.batch_size.max(64))?;
    let mut record = base_record("train", &cfg, &setup, &metrics, clock);
    record.ci = confidence(&cfg, &metrics)?;
    record.training = Some(TrainingSummary {
        train_windows: train_sampler.len(),
        parameters: model.param_count(),
        best_epoch,
        history: history.iter().map(EpochRow::from).collect(),
    });
    record.wall_clock_seconds = clock.elapsed().as_secs_f64();
    let results = results_path(&cfg);
    append_record(&results, &record)?;

    let manifest = RunManifest {
        config_hash: record.config_hash.clone(),
        data_hash: record.data_hash.clone(),
        dataset_path: setup.data.path.clone(),
        started_at,
        finished_at: now(),
        artifacts: Artifacts {
            checkpoint,
            results,
            manifest: manifest_path.clone(),
        },
        test_metrics: record.metrics.clone(),
        config: cfg.clone(),
    };
    write_manifest(&manifest_path, &manifest)?;
    Ok(TrainOutput { record, manifest })
}

/// Checkpointed model, or a fresh parameter-free baseline.
fn model_for_eval(cfg: &mut ExperimentConfig) -> CliResult<(Setup, ForecastModel)> {
    match cfg.eval.checkpoint.clone() {
        Some(path) => {
            let model = load_model(&path)?;
            let setup = setup(cfg, Some(&model))?;
            Ok((setup, model))
        }
        None => {
            let kind = cfg.kind()?;
            if kind.is_trainable() {
                return Err(CliError::Usage(format!(
                    "{kind} needs --checkpoint; only parameter-free models evaluate without one"
                )));
            }
            let setup = setup(cfg, None)?;
            let model = ForecastModel::new(setup.model_cfg.clone(), cfg.train.seed)?;
            Ok((setup, model))
        }
    }
}

fn test_sampler<'a>(setup: &'a Setup) -> CliResult<WindowSampler<'a>> {
    setup
        .data
        .test_sampler(setup.model_cfg.lookback, setup.model_cfg.horizon)
}

pub fn evaluate(mut cfg: ExperimentConfig) -> CliResult<ResultRecord> {
    let clock = Instant::now();
    let (setup, model) = model_for_eval(&mut cfg)?;
    let sampler = test_sampler(&setup)?;
    let metrics = evaluate_model(&model, &sampler, cfg.train.batch_size.max(64))?;
    let mut record = base_record("evaluate", &cfg, &setup, &metrics, clock);
    record.ci = confidence(&cfg, &metrics)?;
    record.wall_clock_seconds = clock.elapsed().as_secs_f64();
    append_record(&results_path(&cfg), &record)?;
    Ok(record)
}

pub fn ablate(mut cfg: ExperimentConfig) -> CliResult<ResultRecord> {
    let clock = Instant::now();
    let kinds = cfg.perturbations()?;
    let (setup, model) = model_for_eval(&mut cfg)?;
    let sampler = test_sampler(&setup)?;
    let report = run_ablation(&model, &sampler, &kinds, cfg.train.seed, cfg.train.batch_size.max(64))?;
    let mut record = base_record("ablate", &cfg, &setup, &report.baseline, clock);
    record.ci = confidence(&cfg, &report.baseline)?;
    record.ablation = Some(ablation_rows(&report));
    record.wall_clock_seconds = clock.elapsed().as_secs_f64();
    append_record(&results_path(&cfg), &record)?;
    Ok(record)
}

fn pct(v: Option<f64>) -> String {
    v.map_or("undefined".into(), |p| format!("{p:+.1}%"))
}

pub fn format_ablation(record: &ResultRecord) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "| input | MAE | MSE | MAE change | MSE change |");
    let _ = writeln!(out, "|---|---|---|---|---|");
    let _ = writeln!(
        out,
        "| original | {:.4} | {:.4} | - | - |",
        record.metrics.mae, record.metrics.mse
    );
    for row in record.ablation.iter().flatten() {
        let _ = writeln!(
            out,
            "| {} | {:.4} | {:.4} | {} | {} |",
            row.kind,
            row.mae,
            row.mse,
            pct(row.mae_degradation_pct),
            pct(row.mse_degradation_pct)
        );
    }
    out
}

pub struct ReportOptions {
    pub layout: TableLayout,
    pub format: TableFormat,
    pub wins_metrics: Vec<Metric>,
    pub precision: Option<usize>,
}

pub struct Report {
    pub table: String,
    pub grid: ResultGrid,
    pub wins: WinsTally,
}

/// Aggregates records from result files. Identical duplicates collapse;
/// records that disagree on the same (method, dataset, horizon) are an error.
pub fn report(files: &[PathBuf], opts: &ReportOptions) -> CliResult<Report> {
    if files.is_empty() {
        return Err(CliError::Usage("report needs at least one result file".into()));
    }
    let mut seen: BTreeMap<(String, String, usize), (f64, f64, Vec<String>)> = BTreeMap::new();
    for file in files {
        for r in read_records(file)? {
            let key = (r.method.clone(), r.dataset.clone(), r.horizon);
            let (mae, mse) = (r.metrics.mae, r.metrics.mse);
            match seen.get_mut(&key) {
                None => {
                    seen.insert(key, (mae, mse, vec![r.config_hash]));
                }
                Some((a, s, hashes)) => {
                    if !hashes.contains(&r.config_hash) {
                        hashes.push(r.config_hash);
                    }
                    if a.to_bits() != mae.to_bits() || s.to_bits() != mse.to_bits() {
                        return Err(CliError::Conflict {
                            key: format!("{}/{}/{}", key.0, key.1, key.2),
                            hashes: hashes.clone(),
                        });
                    }
                }
            }
        }
    }
    if seen.is_empty() {
        return Err(tsablate::Error::Data("result files hold no records".into()).into());
    }
    let entries: Vec<ResultEntry> = seen
        .into_iter()
        .map(|((method, dataset, horizon), (mae, mse, _))| ResultEntry {
            method,
            dataset,
            horizon,
            mae,
            mse,
        })
        .collect();
    let grid = ResultGrid::from_entries(&entries, opts.layout)?;
    let wins = grid.wins(&opts.wins_metrics)?;
    let table = emit_table(&grid, opts.format, opts.precision)?;
    Ok(Report { table, grid, wins })
}

pub fn format_wins(wins: &WinsTally, metrics: &[Metric]) -> String {
    let names: Vec<&str> = metrics.iter().map(|m| m.name()).collect();
    let counts: Vec<String> = wins.wins.iter().map(|(m, n)| format!("{m}={n}")).collect();
    format!(
        "# Wins ({} over {} cells): {}",
        names.join("+"),
        wins.cells,
        counts.join(" ")
    )
}
