use std::ops::Range;
use std::path::{Path, PathBuf};

use tsablate::data::{
    cache_path, content_hash, fewshot_subset, fit_standardizer, make_splits, parse_csv,
    read_cache, write_cache, CachedData, CsvSchema, FewShotSpec, RawDataset, SplitRanges,
    WindowSampler,
};
use tsablate::nnkernel::Tensor2;

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};

/// A dataset read from disk, split and standardized on its train rows.
pub struct Prepared {
    pub path: PathBuf,
    pub name: String,
    pub data_hash: String,
    pub raw: RawDataset,
    pub splits: SplitRanges,
    pub standardized: Tensor2,
}

impl Prepared {
    pub fn channels(&self) -> usize {
        self.raw.channels()
    }

    /// Training rows, shortened to the few-shot prefix when requested.
    pub fn train_sampler(&self, cfg: &ExperimentConfig, lookback: usize, horizon: usize) -> CliResult<WindowSampler<'_>> {
        let mut range = self.splits.train.clone();
        if cfg.data.fewshot {
            let spec = FewShotSpec {
                fraction: cfg.data.fewshot_fraction,
            };
            range = fewshot_subset(range, &spec, lookback + horizon)?;
            log::info!("few-shot training on rows {range:?}");
        }
        Ok(WindowSampler::new(&self.standardized, range, lookback, horizon)?)
    }

    /// Validation and test windows keep their targets inside the split but
    /// may take their lookback from the rows just before it.
    fn eval_range(split: &Range<usize>, lookback: usize) -> Range<usize> {
        split.start.saturating_sub(lookback)..split.end
    }

    pub fn val_sampler(&self, lookback: usize, horizon: usize) -> CliResult<WindowSampler<'_>> {
        let range = Self::eval_range(&self.splits.val, lookback);
        Ok(WindowSampler::for_evaluation(&self.standardized, range, lookback, horizon)?)
    }

    pub fn test_sampler(&self, lookback: usize, horizon: usize) -> CliResult<WindowSampler<'_>> {
        let range = Self::eval_range(&self.splits.test, lookback);
        let s = WindowSampler::for_evaluation(&self.standardized, range, lookback, horizon)?;
        if s.is_empty() {
            return Err(tsablate::Error::Data(format!(
                "test split {:?} holds no window of {lookback} + {horizon} rows",
                self.splits.test
            ))
            .into());
        }
        Ok(s)
    }

    /// Train must hold one full window and test one horizon; an empty
    /// validation split only disables model selection.
    pub fn check_window_fit(&self, lookback: usize, horizon: usize) -> CliResult<()> {
        let fail = |name: &str, rows: usize, need: usize| -> CliResult<()> {
            Err(tsablate::Error::Data(format!(
                "{name} split of {} has {rows} rows, needs at least {need} for L={lookback}, H={horizon}",
                self.name
            ))
            .into())
        };
        if self.splits.train.len() < lookback + horizon {
            return fail("train", self.splits.train.len(), lookback + horizon);
        }
        if self.splits.test.len() < horizon || self.splits.test.end < lookback + horizon {
            return fail("test", self.splits.test.len(), horizon);
        }
        if self.splits.val.len() < horizon {
            log::warn!("validation split too short for one window; training without model selection");
        }
        Ok(())
    }
}

fn read_bytes(path: &Path) -> CliResult<Vec<u8>> {
    std::fs::read(path).map_err(|e| {
        tsablate::Error::Data(format!("cannot read dataset {}: {e}", path.display())).into()
    })
}

/// Loads, splits and standardizes the configured dataset. With a cache
/// directory the standardized matrix is reused while the CSV bytes and the
/// split boundaries are unchanged.
pub fn prepare(cfg: &ExperimentConfig) -> CliResult<Prepared> {
    let path = cfg.dataset_path()?;
    let name = cfg.dataset_name(&path);
    let bytes = read_bytes(&path)?;
    let data_hash = content_hash(&bytes);
    let raw = parse_csv(&name, bytes.as_slice(), &CsvSchema::default())
        .map_err(|e| with_path(e, &path))?;
    let spec = cfg.split_spec(&name)?;
    let splits = make_splits(raw.timesteps(), &spec, 0)?;

    let cache_key = content_hash(format!("{data_hash}:{:?}", splits).as_bytes());
    let cached = match &cfg.data.cache_dir {
        Some(dir) => read_cache(&cache_path(dir, &cache_key), &cache_key).unwrap_or_else(|e| {
            log::warn!("ignoring unreadable data cache: {e}");
            None
        }),
        None => None,
    };
    let standardized = match cached {
        Some(c) => {
            log::info!("using cached standardized data {}", &cache_key[..12]);
            c.standardized
        }
        None => {
            let standardizer = fit_standardizer(&raw.values, splits.train.clone())?;
            let standardized = standardizer.apply(&raw.values)?;
            if let Some(dir) = &cfg.data.cache_dir {
                std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
                write_cache(
                    &cache_path(dir, &cache_key),
                    &CachedData {
                        hash: cache_key.clone(),
                        standardized: standardized.clone(),
                        standardizer,
                    },
                )?;
            }
            standardized
        }
    };
    Ok(Prepared {
        path,
        name,
        data_hash,
        raw,
        splits,
        standardized,
    })
}

fn with_path(e: tsablate::Error, path: &Path) -> CliError {
    match e {
        tsablate::Error::Parse { row, column, message } => tsablate::Error::Parse {
            row,
            column,
            message: format!("{message} (in {})", path.display()),
        }
        .into(),
        tsablate::Error::Format(m) => tsablate::Error::Format(format!("{}: {m}", path.display())).into(),
        other => other.into(),
    }
}
