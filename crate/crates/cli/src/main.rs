//! `tsablate`: train, evaluate, ablate and tabulate small forecasters.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tsablate::eval::{Metric, TableFormat, TableLayout};

use tsablate_cli::commands::{self, ReportOptions};
use tsablate_cli::config::{parse_list, ExperimentConfig};
use tsablate_cli::record::ResultRecord;
use tsablate_cli::{CliError, CliResult};

#[derive(Parser)]
#[command(name = "tsablate", version, about = "Train, evaluate and ablate small time series forecasters")]
struct Cli {
    /// Repeat for more log output (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a model, save its checkpoint and score the test split.
    Train(RunArgs),
    /// Score a checkpoint, or a parameter-free model, on the test split.
    Evaluate(RunArgs),
    /// Compare test error before and after lookback perturbations.
    Ablate(RunArgs),
    /// Tabulate result files and count wins.
    Report(ReportArgs),
}

/// Experiment flags. A `--config` file is applied after them and wins.
#[derive(Args, Default)]
struct RunArgs {
    /// `key = value` experiment file with [data], [model], [train], [eval], [output] sections.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Dataset CSV. Relative paths fall back to $TSABLATE_DATA_DIR.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Dataset name; alone it resolves to $TSABLATE_DATA_DIR/<name>.csv.
    #[arg(long)]
    dataset: Option<String>,
    /// Split fractions such as 60/20/20, or `auto`.
    #[arg(long)]
    split: Option<String>,
    /// Train on the leading fraction of the train split only.
    #[arg(long)]
    fewshot: bool,
    #[arg(long)]
    fewshot_fraction: Option<f64>,
    /// Directory for the standardized-data cache.
    #[arg(long)]
    cache_dir: Option<PathBuf>,

    /// pattn, ltrsf, d-pattn, d-ltrsf, dlinear, meanp, seasonal, ablation-{identity,attention,transformer}
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    lookback: Option<usize>,
    #[arg(long)]
    horizon: Option<usize>,
    #[arg(long)]
    patch_len: Option<usize>,
    #[arg(long)]
    stride: Option<usize>,
    #[arg(long)]
    d_model: Option<usize>,
    #[arg(long)]
    heads: Option<usize>,
    #[arg(long)]
    k_trend: Option<usize>,
    #[arg(long)]
    k_seasonal: Option<usize>,
    #[arg(long)]
    ma_kernel: Option<usize>,
    #[arg(long)]
    period: Option<usize>,

    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    batch_size: Option<usize>,
    #[arg(long)]
    lr: Option<f64>,
    /// Learning-rate multiplier applied after each epoch.
    #[arg(long)]
    lr_decay: Option<f64>,
    /// Epochs without validation improvement before stopping (0 disables).
    #[arg(long)]
    patience: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,

    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Add percentile bootstrap intervals.
    #[arg(long)]
    ci: bool,
    #[arg(short = 'B', long)]
    replicates: Option<usize>,
    #[arg(long)]
    level: Option<f64>,
    /// Comma-separated perturbations: sf-all, sf-half, ex-half, masking[:ratio]; `none` for baseline only.
    #[arg(long)]
    kinds: Option<String>,
    #[arg(long)]
    masking_ratio: Option<f64>,

    /// Output directory for checkpoints, manifests and results.jsonl.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    /// JSON-lines result files.
    #[arg(required = true)]
    files: Vec<PathBuf>,
    /// per-horizon or horizon-averaged.
    #[arg(long, default_value = "horizon-averaged")]
    layout: String,
    /// markdown or csv.
    #[arg(long, default_value = "markdown")]
    format: String,
    /// Metrics whose cells count towards wins: mse, mae or both.
    #[arg(long, default_value = "mse")]
    wins_metric: String,
    /// Decimal places; omit for full precision.
    #[arg(long)]
    precision: Option<usize>,
    /// Write the table here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn into_config(self) -> CliResult<ExperimentConfig> {
        let mut cfg = ExperimentConfig::default();
        let d = &mut cfg.data;
        if self.data.is_some() {
            d.path = self.data;
        }
        d.name = self.dataset.or(d.name.take());
        if let Some(v) = self.split {
            d.split = v;
        }
        d.fewshot |= self.fewshot;
        if let Some(v) = self.fewshot_fraction {
            d.fewshot_fraction = v;
        }
        if self.cache_dir.is_some() {
            d.cache_dir = self.cache_dir;
        }
        let m = &mut cfg.model;
        if let Some(v) = self.model {
            m.kind = v;
        }
        m.lookback = self.lookback.or(m.lookback);
        m.d_model = self.d_model.or(m.d_model);
        m.period = self.period.or(m.period);
        for (flag, slot) in [
            (self.horizon, &mut m.horizon),
            (self.patch_len, &mut m.patch_len),
            (self.stride, &mut m.stride),
            (self.heads, &mut m.heads),
            (self.k_trend, &mut m.k_trend),
            (self.k_seasonal, &mut m.k_seasonal),
            (self.ma_kernel, &mut m.ma_kernel),
            (self.epochs, &mut cfg.train.epochs),
            (self.batch_size, &mut cfg.train.batch_size),
            (self.patience, &mut cfg.train.patience),
            (self.replicates, &mut cfg.eval.replicates),
        ] {
            if let Some(v) = flag {
                *slot = v;
            }
        }
        for (flag, slot) in [
            (self.lr, &mut cfg.train.learning_rate),
            (self.lr_decay, &mut cfg.train.lr_decay),
            (self.level, &mut cfg.eval.level),
            (self.masking_ratio, &mut cfg.eval.masking_ratio),
        ] {
            if let Some(v) = flag {
                *slot = v;
            }
        }
        if let Some(v) = self.seed {
            cfg.train.seed = v;
        }
        if self.checkpoint.is_some() {
            cfg.eval.checkpoint = self.checkpoint;
        }
        cfg.eval.ci |= self.ci;
        if let Some(v) = self.kinds {
            cfg.eval.kinds = parse_list(&v);
        }
        if let Some(v) = self.out {
            cfg.output.dir = v;
        }
        if let Some(path) = &self.config {
            cfg.apply_file(path)?;
        }
        Ok(cfg)
    }
}

fn fmt_ci(r: &ResultRecord) -> String {
    r.ci.as_ref().map_or(String::new(), |ci| {
        format!(
            "  {:.0}% CI: MAE [{:.4}, {:.4}] MSE [{:.4}, {:.4}]",
            ci.level * 100.0,
            ci.mae.lower,
            ci.mae.upper,
            ci.mse.lower,
            ci.mse.upper
        )
    })
}

fn summary(r: &ResultRecord) -> String {
    format!(
        "{} {} L={} H={}: test MAE {:.4} MSE {:.4} over {} windows{}",
        r.dataset,
        r.method,
        r.lookback,
        r.horizon,
        r.metrics.mae,
        r.metrics.mse,
        r.metrics.windows,
        fmt_ci(r)
    )
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Train(args) => {
            let out = commands::train(args.into_config()?)?;
            println!("{}", summary(&out.record));
            println!("checkpoint: {}", out.manifest.artifacts.checkpoint.display());
            println!("manifest:   {}", out.manifest.artifacts.manifest.display());
            println!("results:    {}", out.manifest.artifacts.results.display());
        }
        Command::Evaluate(args) => {
            let r = commands::evaluate(args.into_config()?)?;
            println!("{}", summary(&r));
        }
        Command::Ablate(args) => {
            let r = commands::ablate(args.into_config()?)?;
            println!("{}", summary(&r));
            print!("{}", commands::format_ablation(&r));
        }
        Command::Report(args) => {
            let wins_metrics = match args.wins_metric.as_str() {
                "both" => vec![Metric::Mae, Metric::Mse],
                m => vec![m.parse::<Metric>()?],
            };
            let opts = ReportOptions {
                layout: args.layout.parse::<TableLayout>()?,
                format: args.format.parse::<TableFormat>()?,
                wins_metrics,
                precision: args.precision,
            };
            let rep = commands::report(&args.files, &opts)?;
            match &args.out {
                Some(path) => std::fs::write(path, &rep.table).map_err(|e| CliError::io(path, e))?,
                None => print!("{}", rep.table),
            }
            println!("{}", commands::format_wins(&rep.wins, &opts.wins_metrics));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
