//! Emission spectra and the narrowband figure of merit.
//!
//! The figure of merit rewards blackbody-weighted emission inside a narrow
//! target band `[λ₁, λ₂]`, subtracts the weighted emission fractions on
//! either side of it within the working band `[λ_min, λ_max]`, and charges a
//! fixed penalty per detected emission peak.

mod fom;
mod peaks;
mod planck;
mod spectrum;

use thiserror::Error;

pub use fom::{fom, fom_weighted, FomConfig, FomReport};
pub use peaks::{count_peaks, find_peaks, Peak};
pub use planck::{planck_radiance, FIRST_RADIATION_CONSTANT, SECOND_RADIATION_CONSTANT};
pub use spectrum::Spectrum;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectrumError {
    #[error("invalid spectrum: {0}")]
    Invalid(String),
    #[error("cannot parse spectrum line {line}: {content:?}")]
    Parse { line: usize, content: String },
    #[error("spectrum covers [{have_min}, {have_max}] um but the working band is [{need_min}, {need_max}] um")]
    Coverage {
        have_min: f64,
        have_max: f64,
        need_min: f64,
        need_max: f64,
    },
    #[error("invalid figure-of-merit configuration: {0}")]
    Config(String),
    #[error("Planck radiance needs positive wavelength and temperature (got {wavelength_um} um, {temperature_k} K)")]
    Domain { wavelength_um: f64, temperature_k: f64 },
}
