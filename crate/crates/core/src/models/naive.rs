use crate::error::{Error, Result};
use crate::nnkernel::Tensor2;

/// Parameter-free reference forecasters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NaiveBaseline {
    /// Repeats the per-channel lookback mean.
    MeanP,
    /// Repeats the last full period of the lookback.
    Seasonal { period: usize },
}

impl NaiveBaseline {
    pub fn forecast(&self, window: &Tensor2, horizon: usize) -> Result<Tensor2> {
        let (l, c) = window.shape();
        match *self {
            NaiveBaseline::MeanP => {
                if l == 0 {
                    return Err(Error::Data("empty lookback window".into()));
                }
                let mean = window.sum_rows().scale(1.0 / l as f64);
                Ok(Tensor2::from_fn(horizon, c, |_, ch| mean.get(0, ch)))
            }
            NaiveBaseline::Seasonal { period } => {
                if period == 0 || l < period {
                    return Err(Error::Config(format!(
                        "seasonal period {period} needs a lookback of at least that length, got {l}"
                    )));
                }
                Ok(Tensor2::from_fn(horizon, c, |t, ch| {
                    window.get(l - period + t % period, ch)
                }))
            }
        }
    }
}

/// Hours per seasonal cycle by sampling rate: hourly 24, 15-min 96,
/// 10-min 144, weekly 52, daily 7.
pub fn default_period(rate: crate::data::SamplingRate) -> usize {
    use crate::data::SamplingRate::*;
    match rate {
        Hourly => 24,
        Min15 => 96,
        Min10 => 144,
        Weekly => 52,
        Daily => 7,
        Unknown => 24,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn col(v: &[f64]) -> Tensor2 {
        Tensor2::from_vec(v.len(), 1, v.to_vec()).unwrap()
    }

    #[test]
    fn meanp_repeats_mean() {
        let f = NaiveBaseline::MeanP.forecast(&col(&[1.0, 2.0, 3.0]), 2).unwrap();
        assert_eq!(f.as_slice(), &[2.0, 2.0]);
    }

    #[test]
    fn seasonal_repeats_last_period() {
        let f = NaiveBaseline::Seasonal { period: 2 }
            .forecast(&col(&[1.0, 2.0, 3.0, 4.0]), 3)
            .unwrap();
        assert_eq!(f.as_slice(), &[3.0, 4.0, 3.0]);
    }

    #[test]
    fn meanp_exact_on_constant() {
        let f = NaiveBaseline::MeanP.forecast(&col(&[0.5; 8]), 4).unwrap();
        assert!(f.as_slice().iter().all(|&v| v == 0.5));
    }

    #[test]
    fn seasonal_period_too_long() {
        assert!(NaiveBaseline::Seasonal { period: 5 }
            .forecast(&col(&[1.0, 2.0]), 1)
            .is_err());
    }
}
