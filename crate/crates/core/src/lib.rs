//! Small, LLM-free time series forecasters and the tooling to evaluate them.
//!
//! The crate is split into four layers:
//!
//! * [`nnkernel`]: dense 2-D tensors, hand-derived forward/backward passes for
//!   linear, attention, layer-norm and transformer blocks, Adam and a
//!   finite-difference gradient checker.
//! * [`models`]: patch-attention (PAttn), channel-token transformer (LTrsf),
//!   their decomposed variants, DLinear, naive baselines and the ablation heads,
//!   plus training and checkpointing.
//! * [`data`]: CSV ingestion, chronological splits, train-only standardization,
//!   sliding windows and few-shot subsets.
//! * [`eval`]: MAE/MSE, percentile bootstrap intervals, input perturbations,
//!   degradation percentages, win tallies and table emission.

mod binfmt;
pub mod data;
pub mod error;
pub mod eval;
pub mod models;
pub mod nnkernel;

pub use error::{Error, Result};
