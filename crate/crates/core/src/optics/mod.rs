//! Exact electromagnetics of planar multilayers.
//!
//! Stacks are described from the incidence side down to a semi-infinite
//! substrate. Reflectance comes from the 2×2 characteristic-matrix product;
//! because the substrate is treated as an opaque exit medium, emissivity is
//! `1 − R` by Kirchhoff's law.
//!
//! Conventions: time dependence `exp(−iωt)`, complex index `n + ik` with
//! `k ≥ 0`, and the normal wavevector component in every medium is taken on
//! the branch with non-negative imaginary part so that forward waves decay.

mod field;
mod material;
mod tmm;

use thiserror::Error;

pub use field::{field_profile, FieldProfile};
pub use material::{Material, OpticalConstantsTable, OpticalRow};
pub use tmm::{
    angular_map, emission_spectrum, emissivity, reflectance, reflection_coefficient, AngularMap,
};

pub(crate) use tmm::{admittance, layer_matrix, normal_component, CharMatrix};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OpticsError {
    #[error("wavelength {wavelength_um} um is outside the {material} table [{min}, {max}] um")]
    OutOfRange {
        material: String,
        wavelength_um: f64,
        min: f64,
        max: f64,
    },
    #[error("invalid optical table for {material}: {reason}")]
    InvalidTable { material: String, reason: String },
    #[error("cannot parse {material} table line {line}: {content:?}")]
    Parse {
        material: String,
        line: usize,
        content: String,
    },
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("incidence angle {0} deg must lie in [0, 90)")]
    Angle(f64),
    #[error("wavelength must be positive, got {0}")]
    Wavelength(f64),
    #[error("layer {index} has non-positive thickness {thickness_um}")]
    Thickness { index: usize, thickness_um: f64 },
    #[error("invalid wavelength grid: {0}")]
    Grid(String),
    #[error("field profile needs at least 2 samples per layer, got {0}")]
    Samples(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarization {
    /// Transverse electric.
    S,
    /// Transverse magnetic; the default scoring polarization.
    P,
}

impl std::str::FromStr for Polarization {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "s" | "te" => Ok(Polarization::S),
            "p" | "tm" => Ok(Polarization::P),
            other => Err(format!("unknown polarization {other:?} (expected s or p)")),
        }
    }
}

impl std::fmt::Display for Polarization {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Polarization::S => "s",
            Polarization::P => "p",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub material: Material,
    pub thickness_um: f64,
}

/// Layers ordered from the incidence side to the substrate.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerStack {
    pub layers: Vec<Layer>,
    pub substrate: Material,
    /// Real index of the incidence medium.
    pub ambient_index: f64,
}

impl LayerStack {
    pub fn new(layers: Vec<Layer>, substrate: Material) -> Self {
        Self {
            layers,
            substrate,
            ambient_index: 1.0,
        }
    }

    /// Bare substrate with no films.
    pub fn bare(substrate: Material) -> Self {
        Self::new(Vec::new(), substrate)
    }

    pub fn with_ambient(mut self, ambient_index: f64) -> Self {
        self.ambient_index = ambient_index;
        self
    }

    pub fn push(&mut self, material: Material, thickness_um: f64) {
        self.layers.push(Layer {
            material,
            thickness_um,
        });
    }

    /// Sum of all layer thicknesses in μm.
    pub fn total_thickness(&self) -> f64 {
        self.layers.iter().map(|l| l.thickness_um).sum()
    }

    pub(crate) fn validate(&self) -> Result<(), OpticsError> {
        for (index, layer) in self.layers.iter().enumerate() {
            if !(layer.thickness_um > 0.0) {
                return Err(OpticsError::Thickness {
                    index,
                    thickness_um: layer.thickness_um,
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneWaveQuery {
    pub wavelength_um: f64,
    /// Degrees from the surface normal, in `[0, 90)`.
    pub angle_deg: f64,
    pub polarization: Polarization,
}

impl PlaneWaveQuery {
    /// Normal incidence, p-polarized.
    pub fn normal(wavelength_um: f64) -> Self {
        Self {
            wavelength_um,
            angle_deg: 0.0,
            polarization: Polarization::P,
        }
    }

    pub fn new(wavelength_um: f64, angle_deg: f64, polarization: Polarization) -> Self {
        Self {
            wavelength_um,
            angle_deg,
            polarization,
        }
    }

    pub(crate) fn validate(&self) -> Result<(), OpticsError> {
        if !(self.wavelength_um > 0.0) || !self.wavelength_um.is_finite() {
            return Err(OpticsError::Wavelength(self.wavelength_um));
        }
        if !(self.angle_deg >= 0.0 && self.angle_deg < 90.0) {
            return Err(OpticsError::Angle(self.angle_deg));
        }
        Ok(())
    }
}
