//! Inverse design of narrowband thermal emitters built from binary Ge/SiO2
//! multilayers on a tungsten substrate.
//!
//! The crate is organised bottom-up:
//!
//! - [`optics`]: tabulated optical constants and an exact transfer-matrix
//!   solver for planar stacks (reflectance, emissivity, angular maps, field
//!   profiles).
//! - [`spectra`]: Planck weighting, peak counting and the narrowband figure
//!   of merit.
//! - [`codec`]: binary design vectors, their relaxations, training-set
//!   generation, augmentation and dataset files.
//! - [`scoring`]: a precomputed evaluator that turns a design vector into a
//!   spectrum and a figure of merit quickly.
//! - [`aae`]: a small adversarial autoencoder trained from scratch.
//! - [`gp`]: Gaussian-process regression and expected-improvement Bayesian
//!   optimization over box domains.
//! - [`pipeline`]: hybrid latent-space optimization, the direct baseline,
//!   exhaustive enumeration and run comparison.

pub mod aae;
pub mod codec;
pub mod gp;
pub mod optics;
pub mod pipeline;
pub mod rng;
pub mod scoring;
pub mod spectra;

mod error;

pub use error::{Error, Result};
