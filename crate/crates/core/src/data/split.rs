use std::ops::Range;

use crate::error::{Error, Result};

/// Chronological train/validation/test fractions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitSpec {
    pub train: f64,
    pub val: f64,
    pub test: f64,
}

impl SplitSpec {
    pub fn new(train: f64, val: f64, test: f64) -> Result<Self> {
        let s = Self { train, val, test };
        s.validate()?;
        Ok(s)
    }

    /// 60/20/20, used for the ETT family.
    pub const ETT: SplitSpec = SplitSpec {
        train: 0.6,
        val: 0.2,
        test: 0.2,
    };

    /// 70/10/20, used for everything else.
    pub const STANDARD: SplitSpec = SplitSpec {
        train: 0.7,
        val: 0.1,
        test: 0.2,
    };

    pub fn for_dataset(name: &str) -> Self {
        if name.to_ascii_lowercase().starts_with("ett") {
            Self::ETT
        } else {
            Self::STANDARD
        }
    }

    pub fn validate(&self) -> Result<()> {
        let parts = [self.train, self.val, self.test];
        if parts.iter().any(|&f| !(0.0..=1.0).contains(&f)) || self.train <= 0.0 {
            return Err(Error::Config(format!("invalid split fractions {parts:?}")));
        }
        if (parts.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!("split fractions {parts:?} do not sum to 1")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitRanges {
    pub train: Range<usize>,
    pub val: Range<usize>,
    pub test: Range<usize>,
}

// Guards floor() against products like 0.6 * 17420 landing a hair under an
// integer.
fn floor_fraction(fraction: f64, total: usize) -> usize {
    ((fraction * total as f64) + 1e-9).floor() as usize
}

/// Cumulative-floor boundaries over `[0, total)`. With `window_len > 0`,
/// every split must hold at least one window of that many rows.
pub fn make_splits(total: usize, spec: &SplitSpec, window_len: usize) -> Result<SplitRanges> {
    spec.validate()?;
    let train_end = floor_fraction(spec.train, total);
    let val_end = floor_fraction(spec.train + spec.val, total).min(total);
    let ranges = SplitRanges {
        train: 0..train_end,
        val: train_end..val_end,
        test: val_end..total,
    };
    if window_len > 0 {
        for (name, r) in [("train", &ranges.train), ("val", &ranges.val), ("test", &ranges.test)] {
            if r.len() < window_len {
                return Err(Error::Data(format!(
                    "{name} split has {} rows, fewer than one window of {window_len}",
                    r.len()
                )));
            }
        }
    }
    Ok(ranges)
}
