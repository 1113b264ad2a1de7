//! Feed-forward ranking networks written from scratch.
//!
//! Parameters are stored as `f32` and every forward and backward pass
//! accumulates in `f64`. Two architectures are predefined:
//!
//! * NN1PR: 1024 → 256 (ReLU, dropout) → 1 (sigmoid), 262 657 parameters.
//! * NN2PR: 1536 → 512 (ReLU, dropout) → 128 (ReLU, dropout) → 1 (sigmoid),
//!   852 737 parameters.

mod gradcheck;
mod layer;
mod loss;
mod model;
mod train;
mod weights;

use thiserror::Error;

pub use gradcheck::{analytic_gradient, gradient_check, gradient_check_with, GradientReport};
pub use layer::{Activation, DenseLayer};
pub use loss::{bce_loss, PROBABILITY_EPSILON};
pub use model::{Architecture, Input, MlpModel, Mode};
pub use train::{train, ClassWeighting, EpochStats, Example, TrainConfig};
pub use weights::{decode_weights, encode_weights, load_weights, save_weights, WeightFileError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NeuralError {
    #[error("input width {actual} does not match the model's {expected}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("layer {layer} expects {expected} inputs but the previous layer gives {actual}")]
    BrokenChain { layer: usize, expected: usize, actual: usize },
    #[error("the last layer must have one sigmoid output")]
    BadOutputLayer,
    #[error("a model needs at least one layer")]
    NoLayers,
    #[error("dropout rate {0} is outside [0, 1)")]
    BadDropout(f32),
    #[error("training data is empty")]
    EmptyDataset,
    #[error("training data contains only one class")]
    SingleClassDataset,
    #[error("invalid training configuration: {0}")]
    InvalidConfig(String),
    #[error(
        "gradient mismatch at parameter {parameter}: analytic {analytic:e}, numeric {numeric:e}, relative error {relative_error:e}"
    )]
    GradientMismatch { parameter: usize, analytic: f64, numeric: f64, relative_error: f64 },
}
