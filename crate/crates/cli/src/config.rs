use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tsablate::data::{SamplingRate, SplitSpec};
use tsablate::eval::{PerturbationKind, DEFAULT_MASKING_RATIO, DEFAULT_REPLICATES};
use tsablate::models::{default_period, ModelConfig, ModelKind, TrainConfig};

use crate::error::{CliError, CliResult};

pub const DATA_DIR_ENV: &str = "TSABLATE_DATA_DIR";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataSection {
    pub path: Option<PathBuf>,
    pub name: Option<String>,
    /// `auto` or `train/val/test` fractions or percentages.
    pub split: String,
    pub fewshot: bool,
    pub fewshot_fraction: f64,
    pub cache_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSection {
    pub kind: String,
    pub lookback: Option<usize>,
    pub horizon: usize,
    pub patch_len: usize,
    pub stride: usize,
    pub d_model: Option<usize>,
    pub heads: usize,
    pub k_trend: usize,
    pub k_seasonal: usize,
    pub ma_kernel: usize,
    pub period: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainSection {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub lr_decay: f64,
    pub patience: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalSection {
    pub checkpoint: Option<PathBuf>,
    pub ci: bool,
    pub level: f64,
    pub replicates: usize,
    pub kinds: Vec<String>,
    pub masking_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputSection {
    pub dir: PathBuf,
}

/// Every knob of one experiment. Serialized verbatim into result records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub data: DataSection,
    pub model: ModelSection,
    pub train: TrainSection,
    pub eval: EvalSection,
    pub output: OutputSection,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let model = ModelConfig::new(ModelKind::PAttn, 336, 96, 1);
        let train = TrainConfig::default();
        Self {
            data: DataSection {
                path: None,
                name: None,
                split: "auto".into(),
                fewshot: false,
                fewshot_fraction: 0.10,
                cache_dir: None,
            },
            model: ModelSection {
                kind: model.kind.name().into(),
                lookback: None,
                horizon: model.horizon,
                patch_len: model.patch_len,
                stride: model.stride,
                d_model: None,
                heads: model.heads,
                k_trend: model.k_trend,
                k_seasonal: model.k_seasonal,
                ma_kernel: model.ma_kernel,
                period: None,
            },
            train: TrainSection {
                epochs: train.epochs,
                batch_size: train.batch_size,
                learning_rate: train.learning_rate,
                lr_decay: train.lr_decay,
                patience: train.early_stop_patience,
                seed: train.seed,
            },
            eval: EvalSection {
                checkpoint: None,
                ci: false,
                level: 0.95,
                replicates: DEFAULT_REPLICATES,
                kinds: vec!["sf-all".into(), "sf-half".into(), "ex-half".into()],
                masking_ratio: DEFAULT_MASKING_RATIO,
            },
            output: OutputSection {
                dir: PathBuf::from("runs"),
            },
        }
    }
}

/// Keys accepted in config files, by section.
pub const KNOWN_KEYS: &[(&str, &[&str])] = &[
    ("data", &["path", "name", "split", "fewshot", "fewshot_fraction", "cache_dir"]),
    (
        "model",
        &[
            "kind", "lookback", "horizon", "patch_len", "stride", "d_model", "heads", "k_trend",
            "k_seasonal", "ma_kernel", "period",
        ],
    ),
    ("train", &["epochs", "batch_size", "learning_rate", "lr_decay", "patience", "seed"]),
    ("eval", &["checkpoint", "ci", "level", "replicates", "kinds", "masking_ratio"]),
    ("output", &["dir"]),
];

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, String> {
    value
        .parse()
        .map_err(|_| format!("invalid value '{value}' for {key}"))
}

fn parse_bool(key: &str, value: &str) -> Result<bool, String> {
    match value {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(format!("invalid boolean '{value}' for {key}")),
    }
}

/// Comma-separated list; empty or `none` gives an empty list.
pub fn parse_list(value: &str) -> Vec<String> {
    if value.trim().is_empty() || value.trim() == "none" {
        return Vec::new();
    }
    value
        .split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect()
}

impl ExperimentConfig {
    /// Sets `section.key` from its textual value.
    pub fn set(&mut self, section: &str, key: &str, value: &str) -> Result<(), String> {
        let full = format!("{section}.{key}");
        let k = full.as_str();
        let opt_path = |v: &str| (!v.is_empty()).then(|| PathBuf::from(v));
        match (section, key) {
            ("data", "path") => self.data.path = opt_path(value),
            ("data", "name") => self.data.name = (!value.is_empty()).then(|| value.to_string()),
            ("data", "split") => self.data.split = value.to_string(),
            ("data", "fewshot") => self.data.fewshot = parse_bool(k, value)?,
            ("data", "fewshot_fraction") => self.data.fewshot_fraction = parse(k, value)?,
            ("data", "cache_dir") => self.data.cache_dir = opt_path(value),
            ("model", "kind") => self.model.kind = value.to_string(),
            ("model", "lookback") => self.model.lookback = Some(parse(k, value)?),
            ("model", "horizon") => self.model.horizon = parse(k, value)?,
            ("model", "patch_len") => self.model.patch_len = parse(k, value)?,
            ("model", "stride") => self.model.stride = parse(k, value)?,
            ("model", "d_model") => self.model.d_model = Some(parse(k, value)?),
            ("model", "heads") => self.model.heads = parse(k, value)?,
            ("model", "k_trend") => self.model.k_trend = parse(k, value)?,
            ("model", "k_seasonal") => self.model.k_seasonal = parse(k, value)?,
            ("model", "ma_kernel") => self.model.ma_kernel = parse(k, value)?,
            ("model", "period") => self.model.period = Some(parse(k, value)?),
            ("train", "epochs") => self.train.epochs = parse(k, value)?,
            ("train", "batch_size") => self.train.batch_size = parse(k, value)?,
            ("train", "learning_rate") => self.train.learning_rate = parse(k, value)?,
            ("train", "lr_decay") => self.train.lr_decay = parse(k, value)?,
            ("train", "patience") => self.train.patience = parse(k, value)?,
            ("train", "seed") => self.train.seed = parse(k, value)?,
            ("eval", "checkpoint") => self.eval.checkpoint = opt_path(value),
            ("eval", "ci") => self.eval.ci = parse_bool(k, value)?,
            ("eval", "level") => self.eval.level = parse(k, value)?,
            ("eval", "replicates") => self.eval.replicates = parse(k, value)?,
            ("eval", "kinds") => self.eval.kinds = parse_list(value),
            ("eval", "masking_ratio") => self.eval.masking_ratio = parse(k, value)?,
            ("output", "dir") => self.output.dir = PathBuf::from(value),
            _ => return Err(format!("unknown key '{full}'")),
        }
        Ok(())
    }

    /// Applies a `key = value` file with `[section]` headers on top of `self`.
    pub fn apply_file(&mut self, path: &Path) -> CliResult<()> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        self.apply_text(&text, path)
    }

    pub fn apply_text(&mut self, text: &str, origin: &Path) -> CliResult<()> {
        let fail = |line: usize, message: String| CliError::ConfigFile {
            path: origin.to_path_buf(),
            line,
            message,
        };
        let mut section: Option<String> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                let name = name.trim();
                if !KNOWN_KEYS.iter().any(|(s, _)| *s == name) {
                    return Err(fail(i + 1, format!("unknown section '[{name}]'")));
                }
                section = Some(name.to_string());
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(fail(i + 1, format!("expected 'key = value', got '{line}'")));
            };
            let (key, value) = (key.trim(), value.trim());
            let (sec, key) = match (key.split_once('.'), &section) {
                (Some((s, k)), _) => (s.to_string(), k),
                (None, Some(s)) => (s.clone(), key),
                (None, None) => {
                    return Err(fail(i + 1, format!("key '{key}' appears before any [section]")))
                }
            };
            self.set(&sec, key, value).map_err(|m| fail(i + 1, m))?;
        }
        Ok(())
    }

    pub fn kind(&self) -> CliResult<ModelKind> {
        self.model
            .kind
            .parse()
            .map_err(|_| CliError::Usage(format!("unknown model kind '{}'", self.model.kind)))
    }

    /// Dataset path: explicit path, then the data-dir fallback for relative
    /// paths and bare names.
    pub fn dataset_path(&self) -> CliResult<PathBuf> {
        let data_dir = std::env::var_os(DATA_DIR_ENV).map(PathBuf::from);
        match (&self.data.path, &self.data.name) {
            (Some(p), _) => {
                if p.exists() || p.is_absolute() {
                    return Ok(p.clone());
                }
                Ok(data_dir.map(|d| d.join(p)).filter(|c| c.exists()).unwrap_or_else(|| p.clone()))
            }
            (None, Some(name)) => {
                let dir = data_dir.ok_or_else(|| {
                    CliError::Usage(format!(
                        "dataset '{name}' given without --data and {DATA_DIR_ENV} is not set"
                    ))
                })?;
                Ok(dir.join(format!("{name}.csv")))
            }
            (None, None) => Err(CliError::Usage("no dataset: pass --data or --dataset".into())),
        }
    }

    pub fn dataset_name(&self, path: &Path) -> String {
        self.data.name.clone().unwrap_or_else(|| {
            path.file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "dataset".into())
        })
    }

    pub fn split_spec(&self, dataset: &str) -> CliResult<SplitSpec> {
        let s = self.data.split.trim();
        if s == "auto" {
            return Ok(SplitSpec::for_dataset(dataset));
        }
        let parts: Vec<f64> = s
            .split('/')
            .map(|p| p.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| CliError::Usage(format!("bad split '{s}'")))?;
        let [a, b, c] = parts[..] else {
            return Err(CliError::Usage(format!("split '{s}' needs three parts")));
        };
        let scale = if a + b + c > 1.5 { 100.0 } else { 1.0 };
        Ok(SplitSpec::new(a / scale, b / scale, c / scale)?)
    }

    pub fn perturbations(&self) -> CliResult<Vec<PerturbationKind>> {
        self.eval
            .kinds
            .iter()
            .map(|k| {
                let kind: PerturbationKind = k.parse()?;
                Ok(match (kind, k.contains(':')) {
                    (PerturbationKind::Masking { .. }, false) => PerturbationKind::Masking {
                        ratio: self.eval.masking_ratio,
                    },
                    _ => kind,
                })
            })
            .collect()
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            epochs: self.train.epochs,
            batch_size: self.train.batch_size,
            learning_rate: self.train.learning_rate,
            lr_decay: self.train.lr_decay,
            seed: self.train.seed,
            early_stop_patience: self.train.patience,
        }
    }

    /// Fills dataset-dependent defaults and returns the model config.
    pub fn resolve(&mut self, dataset: &str, rate: SamplingRate, channels: usize) -> CliResult<ModelConfig> {
        let kind = self.kind()?;
        self.model.kind = kind.name().to_string();
        let weekly = dataset.to_ascii_lowercase().contains("illness")
            || dataset.eq_ignore_ascii_case("ili")
            || dataset.eq_ignore_ascii_case("national_illness");
        let lookback = *self.model.lookback.get_or_insert(if weekly { 104 } else { 336 });
        let mut cfg = ModelConfig::new(kind, lookback, self.model.horizon, channels);
        let d_model = *self.model.d_model.get_or_insert(cfg.d_model);
        let period = *self.model.period.get_or_insert(default_period(rate));
        cfg.patch_len = self.model.patch_len;
        cfg.stride = self.model.stride;
        cfg.d_model = d_model;
        cfg.heads = self.model.heads;
        cfg.k_trend = self.model.k_trend;
        cfg.k_seasonal = self.model.k_seasonal;
        cfg.ma_kernel = self.model.ma_kernel;
        cfg.period = period;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Overwrites the model section with a checkpoint's configuration.
    pub fn adopt_model(&mut self, cfg: &ModelConfig) {
        self.model = ModelSection {
            kind: cfg.kind.name().into(),
            lookback: Some(cfg.lookback),
            horizon: cfg.horizon,
            patch_len: cfg.patch_len,
            stride: cfg.stride,
            d_model: Some(cfg.d_model),
            heads: cfg.heads,
            k_trend: cfg.k_trend,
            k_seasonal: cfg.k_seasonal,
            ma_kernel: cfg.ma_kernel,
            period: Some(cfg.period),
        };
    }

    /// Canonical textual form; also the input of the config hash.
    pub fn to_canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sections_and_dotted_keys() {
        let mut cfg = ExperimentConfig::default();
        cfg.apply_text(
            "# experiment\n[model]\nkind = dlinear\nlookback = 96  # short\n\ntrain.epochs = 3\n[eval]\nkinds = sf-all, masking:0.3\n",
            Path::new("x.conf"),
        )
        .unwrap();
        assert_eq!(cfg.model.kind, "dlinear");
        assert_eq!(cfg.model.lookback, Some(96));
        assert_eq!(cfg.train.epochs, 3);
        assert_eq!(cfg.eval.kinds, ["sf-all", "masking:0.3"]);
    }

    #[test]
    fn unknown_key_is_reported_with_line() {
        let err = ExperimentConfig::default()
            .apply_text("[model]\nkind = pattn\nwidth = 3\n", Path::new("x.conf"))
            .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("x.conf:3") && msg.contains("model.width"), "{msg}");
        assert_eq!(err.exit_code(), crate::error::EXIT_USAGE);
    }

    #[test]
    fn unknown_section_and_bad_values() {
        let mut cfg = ExperimentConfig::default();
        assert!(cfg.apply_text("[optim]\n", Path::new("c")).is_err());
        assert!(cfg.apply_text("[train]\nepochs = many\n", Path::new("c")).is_err());
        assert!(cfg.apply_text("epochs = 3\n", Path::new("c")).is_err());
    }

    #[test]
    fn split_forms() {
        let mut cfg = ExperimentConfig::default();
        assert_eq!(cfg.split_spec("ETTh1").unwrap(), SplitSpec::ETT);
        cfg.data.split = "70/10/20".into();
        assert_eq!(cfg.split_spec("ETTh1").unwrap(), SplitSpec::STANDARD);
        cfg.data.split = "0.6/0.2/0.2".into();
        assert_eq!(cfg.split_spec("x").unwrap(), SplitSpec::ETT);
    }

    #[test]
    fn masking_ratio_applies_to_bare_masking() {
        let mut cfg = ExperimentConfig::default();
        cfg.eval.kinds = vec!["masking".into(), "masking:0.2".into()];
        cfg.eval.masking_ratio = 0.4;
        assert_eq!(
            cfg.perturbations().unwrap(),
            [
                PerturbationKind::Masking { ratio: 0.4 },
                PerturbationKind::Masking { ratio: 0.2 }
            ]
        );
    }
}
