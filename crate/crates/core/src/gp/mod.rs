//! Gaussian-process surrogates and expected-improvement search.

mod acquisition;
mod bo;
mod cholesky;
mod halton;
mod model;

use thiserror::Error;

pub use acquisition::{expected_improvement, normal_cdf, normal_pdf};
pub use bo::{bo_loop, bo_maximize, suggest, BoConfig, BoHistory, EvalKind, Evaluation, FnObjective, Objective, Outcome};
pub use halton::halton_points;
pub use model::{GpModel, HyperGrid, Kernel, JITTER_LADDER, VARIANCE_FLOOR};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GpError {
    #[error("kernel matrix not positive definite even with jitter {jitter}")]
    Conditioning { jitter: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Shape { expected: usize, got: usize },
    #[error("no training data")]
    Empty,
    #[error("non-finite training data")]
    NonFinite,
    #[error("invalid optimizer configuration: {0}")]
    Config(String),
    #[error("objective aborted the run: {0}")]
    Objective(String),
}
