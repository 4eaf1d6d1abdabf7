use std::ops::Range;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FewShotSpec {
    pub fraction: f64,
}

impl Default for FewShotSpec {
    fn default() -> Self {
        Self { fraction: 0.10 }
    }
}

/// Chronological prefix holding `floor(fraction * len)` rows of the train
/// split. `min_rows` is the length of one window.
pub fn fewshot_subset(train: Range<usize>, spec: &FewShotSpec, min_rows: usize) -> Result<Range<usize>> {
    if !(spec.fraction > 0.0 && spec.fraction <= 1.0) {
        return Err(Error::Config(format!(
            "few-shot fraction {} must be in (0, 1]",
            spec.fraction
        )));
    }
    let keep = ((spec.fraction * train.len() as f64) + 1e-9).floor() as usize;
    let keep = keep.min(train.len());
    if keep == 0 || keep < min_rows {
        return Err(Error::Data(format!(
            "few-shot train subset has {keep} rows, needs at least {}",
            min_rows.max(1)
        )));
    }
    Ok(train.start..train.start + keep)
}
