use std::ops::Range;

use crate::error::{Error, Result};
use crate::nnkernel::Tensor2;

/// One lookback block and the target block that follows it.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowBatch {
    /// `L x C`
    pub lookback: Tensor2,
    /// `H x C`
    pub target: Tensor2,
}

/// Stride-1 sliding windows over a row range of a `T x C` matrix.
#[derive(Debug, Clone)]
pub struct WindowSampler<'a> {
    data: &'a Tensor2,
    range: Range<usize>,
    lookback: usize,
    horizon: usize,
}

/// `len - L - H + 1`, or zero when the range is too short.
pub fn window_count(len: usize, lookback: usize, horizon: usize) -> usize {
    (len + 1).saturating_sub(lookback + horizon)
}

impl<'a> WindowSampler<'a> {
    /// Training use: a range that cannot hold one window is an error.
    pub fn new(data: &'a Tensor2, range: Range<usize>, lookback: usize, horizon: usize) -> Result<Self> {
        let s = Self::for_evaluation(data, range.clone(), lookback, horizon)?;
        if s.is_empty() {
            return Err(Error::Data(format!(
                "range {range:?} has {} rows, fewer than lookback {lookback} + horizon {horizon}",
                range.len()
            )));
        }
        Ok(s)
    }

    /// Evaluation use: a too-short range yields no windows and a warning.
    pub fn for_evaluation(
        data: &'a Tensor2,
        range: Range<usize>,
        lookback: usize,
        horizon: usize,
    ) -> Result<Self> {
        if range.end > data.rows() || range.start > range.end {
            return Err(Error::Data(format!(
                "range {range:?} outside data of {} rows",
                data.rows()
            )));
        }
        if lookback == 0 || horizon == 0 {
            return Err(Error::Config("lookback and horizon must be positive".into()));
        }
        let s = Self {
            data,
            range,
            lookback,
            horizon,
        };
        if s.is_empty() {
            log::warn!(
                "range {:?} is too short for lookback {lookback} + horizon {horizon}; no windows",
                s.range
            );
        }
        Ok(s)
    }

    pub fn len(&self) -> usize {
        window_count(self.range.len(), self.lookback, self.horizon)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn lookback(&self) -> usize {
        self.lookback
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn range(&self) -> Range<usize> {
        self.range.clone()
    }

    pub fn channels(&self) -> usize {
        self.data.cols()
    }

    pub fn get(&self, i: usize) -> WindowBatch {
        assert!(i < self.len(), "window {i} out of {}", self.len());
        let start = self.range.start + i;
        let mid = start + self.lookback;
        WindowBatch {
            lookback: self.data.slice_rows(start, mid),
            target: self.data.slice_rows(mid, mid + self.horizon),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = WindowBatch> + '_ {
        (0..self.len()).map(move |i| self.get(i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn count_and_layout() {
        let data = Tensor2::from_fn(10, 2, |r, c| (r * 10 + c) as f64);
        let s = WindowSampler::new(&data, 0..10, 4, 2).unwrap();
        assert_eq!(s.len(), 5);
        let w0 = s.get(0);
        assert_eq!(w0.target.row(0), data.row(4));
        let joined = Tensor2::vstack(&[w0.lookback, w0.target]).unwrap();
        assert_eq!(joined, data.slice_rows(0, 6));
    }

    #[test]
    fn short_range() {
        let data = Tensor2::zeros(5, 1);
        assert!(WindowSampler::new(&data, 0..5, 4, 2).is_err());
        let s = WindowSampler::for_evaluation(&data, 0..5, 4, 2).unwrap();
        assert!(s.is_empty());
    }

    #[test]
    fn offset_range_stays_inside() {
        let data = Tensor2::from_fn(20, 1, |r, _| r as f64);
        let s = WindowSampler::new(&data, 8..20, 3, 2).unwrap();
        let last = s.get(s.len() - 1);
        assert_eq!(last.target.get(1, 0), 19.0);
        assert_eq!(s.get(0).lookback.get(0, 0), 8.0);
    }
}
