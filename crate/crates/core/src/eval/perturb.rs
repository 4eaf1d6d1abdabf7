use std::fmt;
use std::str::FromStr;

use rand::seq::{index, SliceRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::nnkernel::Tensor2;

pub const DEFAULT_MASKING_RATIO: f64 = 0.5;

/// Lookback perturbations. All act on whole timestep rows, so channels stay
/// aligned.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PerturbationKind {
    /// Random permutation of all timesteps.
    SfAll,
    /// Random permutation of the first `floor(L/2)` timesteps.
    SfHalf,
    /// Second half followed by the first half.
    ExHalf,
    /// `round(ratio * L)` random timesteps set to zero.
    Masking { ratio: f64 },
}

impl PerturbationKind {
    pub fn name(&self) -> String {
        match self {
            PerturbationKind::SfAll => "sf-all".into(),
            PerturbationKind::SfHalf => "sf-half".into(),
            PerturbationKind::ExHalf => "ex-half".into(),
            PerturbationKind::Masking { ratio } => format!("masking:{ratio}"),
        }
    }
}

impl fmt::Display for PerturbationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for PerturbationKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s.as_str(), None),
        };
        let kind = match (head, arg) {
            ("sf-all", None) => PerturbationKind::SfAll,
            ("sf-half", None) => PerturbationKind::SfHalf,
            ("ex-half", None) => PerturbationKind::ExHalf,
            ("masking", None) => PerturbationKind::Masking {
                ratio: DEFAULT_MASKING_RATIO,
            },
            ("masking", Some(a)) => PerturbationKind::Masking {
                ratio: a
                    .parse()
                    .map_err(|_| Error::Config(format!("bad masking ratio '{a}'")))?,
            },
            _ => return Err(Error::Config(format!("unknown perturbation '{s}'"))),
        };
        if let PerturbationKind::Masking { ratio } = kind {
            if !(0.0..=1.0).contains(&ratio) {
                return Err(Error::Config(format!("masking ratio {ratio} outside [0, 1]")));
            }
        }
        Ok(kind)
    }
}

/// SplitMix64 finalizer over `(base, index)`; gives each window its own seed.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    let mut z = base ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Row order produced by `kind` for a window of `len` rows; `None` for masking.
pub fn permutation(kind: PerturbationKind, len: usize, seed: u64) -> Option<Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half = len / 2;
    let mut order: Vec<usize> = (0..len).collect();
    match kind {
        PerturbationKind::SfAll => order.shuffle(&mut rng),
        PerturbationKind::SfHalf => order[..half].shuffle(&mut rng),
        PerturbationKind::ExHalf => order = (half..len).chain(0..half).collect(),
        PerturbationKind::Masking { .. } => return None,
    }
    Some(order)
}

pub fn perturb_window(window: &Tensor2, kind: PerturbationKind, seed: u64) -> Tensor2 {
    let (l, c) = window.shape();
    match permutation(kind, l, seed) {
        Some(order) => {
            let mut out = Tensor2::zeros(l, c);
            for (dst, &src) in order.iter().enumerate() {
                out.row_mut(dst).copy_from_slice(window.row(src));
            }
            out
        }
        None => {
            let PerturbationKind::Masking { ratio } = kind else {
                unreachable!()
            };
            let count = ((ratio * l as f64).round() as usize).min(l);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut out = window.clone();
            for r in index::sample(&mut rng, l, count) {
                out.row_mut(r).fill(0.0);
            }
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(v: &[f64]) -> Tensor2 {
        Tensor2::from_vec(v.len(), 1, v.to_vec()).unwrap()
    }

    #[test]
    fn ex_half_swaps() {
        let out = perturb_window(&rows(&[1.0, 2.0, 3.0, 4.0]), PerturbationKind::ExHalf, 0);
        assert_eq!(out.as_slice(), &[3.0, 4.0, 1.0, 2.0]);
        let odd = perturb_window(&rows(&[1.0, 2.0, 3.0, 4.0, 5.0]), PerturbationKind::ExHalf, 0);
        assert_eq!(odd.as_slice(), &[3.0, 4.0, 5.0, 1.0, 2.0]);
    }

    #[test]
    fn identity_permutation_seed_leaves_window() {
        let w = rows(&[7.0, 8.0]);
        let seed = (0..1000)
            .find(|&s| permutation(PerturbationKind::SfAll, 2, s) == Some(vec![0, 1]))
            .expect("some seed keeps the order");
        assert_eq!(perturb_window(&w, PerturbationKind::SfAll, seed), w);
    }

    #[test]
    fn sf_half_only_touches_first_half() {
        let w = rows(&(0..10).map(|v| v as f64).collect::<Vec<_>>());
        let out = perturb_window(&w, PerturbationKind::SfHalf, 3);
        assert_eq!(&out.as_slice()[5..], &w.as_slice()[5..]);
    }

    #[test]
    fn masking_boundaries() {
        let w = Tensor2::from_fn(6, 2, |r, c| (r + c + 1) as f64);
        assert_eq!(perturb_window(&w, PerturbationKind::Masking { ratio: 0.0 }, 4), w);
        let all = perturb_window(&w, PerturbationKind::Masking { ratio: 1.0 }, 4);
        assert!(all.as_slice().iter().all(|&v| v == 0.0));
        let half = perturb_window(&w, PerturbationKind::Masking { ratio: 0.5 }, 4);
        let zero_rows = (0..6).filter(|&r| half.row(r).iter().all(|&v| v == 0.0)).count();
        assert_eq!(zero_rows, 3);
    }

    #[test]
    fn parse_names() {
        for k in [PerturbationKind::SfAll, PerturbationKind::SfHalf, PerturbationKind::ExHalf] {
            assert_eq!(k.name().parse::<PerturbationKind>().unwrap(), k);
        }
        assert_eq!(
            "masking".parse::<PerturbationKind>().unwrap(),
            PerturbationKind::Masking { ratio: 0.5 }
        );
        assert_eq!(
            "masking:0.25".parse::<PerturbationKind>().unwrap(),
            PerturbationKind::Masking { ratio: 0.25 }
        );
        assert!("masking:2".parse::<PerturbationKind>().is_err());
        assert!("reverse".parse::<PerturbationKind>().is_err());
    }
}
