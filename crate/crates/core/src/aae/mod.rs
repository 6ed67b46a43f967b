//! Adversarial autoencoder over design vectors.
//!
//! The encoder maps a design to a 2D latent point, the decoder maps it back
//! to per-layer probabilities and the discriminator pushes the aggregate
//! latent distribution toward a standard normal.

mod adam;
mod loss;
pub mod mlp;
mod model;
mod stats;
mod train;

use thiserror::Error;

pub use adam::Adam;
pub use loss::{discriminator_loss, generator_loss, reconstruction_grad, reconstruction_loss, PROB_CLAMP};
pub use mlp::{Activation, Batch, Mlp};
pub use model::{AaeModel, Architecture, MODEL_MAGIC, MODEL_VERSION};
pub use stats::energy_distance;
pub use train::{train, EpochStats, TrainConfig, TrainHistory, Trainer, HISTORY_HEADER};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AaeError {
    #[error("non-finite {what} loss at epoch {epoch}, batch {batch}")]
    NonFinite { epoch: usize, batch: usize, what: &'static str },
    #[error("shape mismatch: expected width {expected}, got {got}")]
    Shape { expected: usize, got: usize },
    #[error("invalid training configuration: {0}")]
    Config(String),
    #[error("dataset unusable for training: {0}")]
    Dataset(String),
    #[error("malformed model file at byte {offset}: {message}")]
    Format { offset: usize, message: String },
    #[error("I/O error: {0}")]
    Io(String),
}
