//! Design vectors and training data.

mod dataset;
mod generate;
mod structure;

use thiserror::Error;

pub use dataset::{Dataset, Design, Provenance, Record, DATASET_FILE, SPECTRA_DIR};
pub use generate::{augment, generate_training_set, AugmentConfig, GenerationConfig, GenerationStatus};
pub use structure::{
    random_structure, threshold, to_stack, MaterialMap, RelaxedVector, StructureVector, DEFAULT_LAYERS,
    UNIT_THICKNESS_UM,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CodecError {
    #[error("design length {got} is invalid (expected 1..=64, default {expected})")]
    Length { expected: usize, got: usize },
    #[error("value {0} is not a valid design entry")]
    NotBinary(f64),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("dataset error: {0}")]
    Dataset(String),
    #[error("augmentation retry bound exceeded for seed record {seed_id}")]
    Augmentation { seed_id: usize },
    #[error("I/O error: {0}")]
    Io(String),
}
