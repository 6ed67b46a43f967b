use std::f64::consts::PI;

use num_complex::Complex64;

use super::{LayerStack, OpticsError, PlaneWaveQuery, Polarization};
use crate::spectra::Spectrum;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Characteristic matrix relating tangential `(E, H)` at the top of a film
/// to the values at its bottom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct CharMatrix {
    pub m11: Complex64,
    pub m12: Complex64,
    pub m21: Complex64,
    pub m22: Complex64,
}

impl CharMatrix {
    pub const IDENTITY: CharMatrix = CharMatrix {
        m11: Complex64::new(1.0, 0.0),
        m12: Complex64::new(0.0, 0.0),
        m21: Complex64::new(0.0, 0.0),
        m22: Complex64::new(1.0, 0.0),
    };

    #[inline]
    pub fn mul(&self, o: &CharMatrix) -> CharMatrix {
        CharMatrix {
            m11: self.m11 * o.m11 + self.m12 * o.m21,
            m12: self.m11 * o.m12 + self.m12 * o.m22,
            m21: self.m21 * o.m11 + self.m22 * o.m21,
            m22: self.m21 * o.m12 + self.m22 * o.m22,
        }
    }

    #[inline]
    pub fn apply(&self, e: Complex64, h: Complex64) -> (Complex64, Complex64) {
        (self.m11 * e + self.m12 * h, self.m21 * e + self.m22 * h)
    }

    /// Amplitude reflection coefficient of a stack with this total matrix
    /// between an incidence medium and an exit medium.
    #[inline]
    pub fn reflection(&self, eta_in: Complex64, eta_out: Complex64) -> Complex64 {
        let b = self.m11 + self.m12 * eta_out;
        let c = self.m21 + self.m22 * eta_out;
        (eta_in * b - c) / (eta_in * b + c)
    }
}

/// Normal wavevector component `sqrt(N² − ξ²)` (in units of the vacuum
/// wavenumber) on the decaying branch.
#[inline]
pub(crate) fn normal_component(index: Complex64, xi: f64) -> Complex64 {
    let q = (index * index - xi * xi).sqrt();
    if q.im < 0.0 || (q.im == 0.0 && q.re < 0.0) {
        -q
    } else {
        q
    }
}

/// Tilted optical admittance in units of the vacuum admittance.
#[inline]
pub(crate) fn admittance(index: Complex64, q: Complex64, pol: Polarization) -> Complex64 {
    match pol {
        Polarization::S => q,
        Polarization::P => index * index / q,
    }
}

#[inline]
pub(crate) fn layer_matrix(q: Complex64, eta: Complex64, thickness_um: f64, wavelength_um: f64) -> CharMatrix {
    let delta = q * (2.0 * PI * thickness_um / wavelength_um);
    let (c, s) = (delta.cos(), delta.sin());
    CharMatrix {
        m11: c,
        m12: -I * s / eta,
        m21: -I * eta * s,
        m22: c,
    }
}

/// Complex amplitude reflection coefficient of the stack.
pub fn reflection_coefficient(stack: &LayerStack, query: &PlaneWaveQuery) -> Result<Complex64, OpticsError> {
    query.validate()?;
    stack.validate()?;
    let lambda = query.wavelength_um;
    let pol = query.polarization;
    let n0 = Complex64::new(stack.ambient_index, 0.0);
    let xi = stack.ambient_index * query.angle_deg.to_radians().sin();
    let eta_in = admittance(n0, normal_component(n0, xi), pol);

    let mut total = CharMatrix::IDENTITY;
    for layer in &stack.layers {
        let n = layer.material.index_at(lambda)?;
        let q = normal_component(n, xi);
        total = total.mul(&layer_matrix(q, admittance(n, q, pol), layer.thickness_um, lambda));
    }
    let ns = stack.substrate.index_at(lambda)?;
    let eta_out = admittance(ns, normal_component(ns, xi), pol);
    Ok(total.reflection(eta_in, eta_out))
}

/// Power reflectance `|r|²`, clamped into `[0, 1]` against roundoff.
pub fn reflectance(stack: &LayerStack, query: &PlaneWaveQuery) -> Result<f64, OpticsError> {
    Ok(reflection_coefficient(stack, query)?.norm_sqr().clamp(0.0, 1.0))
}

/// Emissivity `1 − R` of a stack on an opaque substrate.
pub fn emissivity(stack: &LayerStack, query: &PlaneWaveQuery) -> Result<f64, OpticsError> {
    Ok(1.0 - reflectance(stack, query)?)
}

fn check_grid(grid: &[f64]) -> Result<(), OpticsError> {
    if grid.is_empty() {
        return Err(OpticsError::Grid("empty wavelength grid".into()));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(OpticsError::Grid("wavelengths must be strictly increasing".into()));
    }
    Ok(())
}

/// Emissivity sampled on `grid` for a fixed angle and polarization.
pub fn emission_spectrum(
    stack: &LayerStack,
    grid: &[f64],
    angle_deg: f64,
    polarization: Polarization,
) -> Result<Spectrum, OpticsError> {
    check_grid(grid)?;
    let values = grid
        .iter()
        .map(|&w| emissivity(stack, &PlaneWaveQuery::new(w, angle_deg, polarization)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Spectrum::from_parts_unchecked(grid.to_vec(), values))
}

/// Emissivity over an angle × wavelength grid.
#[derive(Debug, Clone, PartialEq)]
pub struct AngularMap {
    pub wavelengths: Vec<f64>,
    pub angles_deg: Vec<f64>,
    pub polarization: Polarization,
    /// One row per angle, one column per wavelength.
    pub values: Vec<Vec<f64>>,
}

pub fn angular_map(
    stack: &LayerStack,
    grid: &[f64],
    angles_deg: &[f64],
    polarization: Polarization,
) -> Result<AngularMap, OpticsError> {
    check_grid(grid)?;
    if let Some(&bad) = angles_deg.iter().find(|a| !(**a >= 0.0 && **a < 90.0)) {
        return Err(OpticsError::Angle(bad));
    }
    let values = angles_deg
        .iter()
        .map(|&a| emission_spectrum(stack, grid, a, polarization).map(|s| s.values().to_vec()))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(AngularMap {
        wavelengths: grid.to_vec(),
        angles_deg: angles_deg.to_vec(),
        polarization,
        values,
    })
}
