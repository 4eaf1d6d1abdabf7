//! Dataset ingestion, chronological splits, train-only standardization,
//! sliding windows and few-shot subsets.

mod cache;
mod csv;
mod fewshot;
mod split;
mod standardize;
mod window;

pub use self::cache::{
    cache_path, content_hash, read_cache, write_cache, CachedData, CACHE_KIND_TAG,
};
pub use self::csv::{load_csv, parse_csv, CsvSchema, RawDataset, SamplingRate};
pub use fewshot::{fewshot_subset, FewShotSpec};
pub use split::{make_splits, SplitRanges, SplitSpec};
pub use standardize::{fit_standardizer, Standardizer, STANDARDIZER_EPS};
pub use window::{window_count, WindowBatch, WindowSampler};
