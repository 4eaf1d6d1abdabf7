//! The forecaster family and its training loop.

mod ablation;
mod checkpoint;
mod config;
mod decompose;
mod decomposed;
mod dlinear;
mod forecast;
mod instance_norm;
mod layout;
mod ltrsf;
mod naive;
mod patch;
mod pattn;
mod train;

pub use ablation::{AblationCache, AblationHead};
pub use checkpoint::{load_checkpoint, read_checkpoint, save_checkpoint, write_checkpoint};
pub use config::{AblationVariant, ModelConfig, ModelKind};
pub use decompose::{decompose_series, moving_average, moving_average_columns, Decomposition};
pub use decomposed::{Branch, DecomposedModel};
pub use dlinear::DLinearModel;
pub use forecast::{ForecastCache, ForecastModel, ModelBody};
pub use instance_norm::{
    instance_denormalize, instance_normalize, InstanceNormState, INSTANCE_NORM_EPS,
};
pub use ltrsf::LTrsfModel;
pub use naive::{default_period, NaiveBaseline};
pub use patch::{patchify, PatchConfig};
pub use pattn::{PAttnModel, PatchModel};
pub use train::{forecast_sampler, train_model, EpochRecord, TrainConfig, TrainOutcome};
