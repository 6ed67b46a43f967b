use std::f64::consts::PI;

use num_complex::Complex64;

use super::tmm::{admittance, layer_matrix, normal_component};
use super::{LayerStack, OpticsError, PlaneWaveQuery, Polarization};

/// Normalized electric-field amplitude versus depth.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldProfile {
    /// Depth in μm below the top interface. Interfaces appear twice, once
    /// as the bottom sample of the upper layer and once as the top sample of
    /// the lower one.
    pub depths: Vec<f64>,
    /// `|E(z)|` divided by its maximum over the sampled range.
    pub amplitudes: Vec<f64>,
    /// Depth of each interface, top first; the last entry is the substrate
    /// boundary.
    pub interfaces: Vec<f64>,
}

/// `|E(z)|` inside the stack for a normally incident plane wave of unit
/// amplitude, sampled at `samples_per_layer` points per layer (both
/// interfaces included) and over three field decay lengths of the substrate.
pub fn field_profile(
    stack: &LayerStack,
    wavelength_um: f64,
    samples_per_layer: usize,
) -> Result<FieldProfile, OpticsError> {
    let (depths, fields, interfaces) = complex_field(stack, wavelength_um, samples_per_layer)?;
    let values: Vec<f64> = fields.iter().map(|e| e.norm()).collect();
    let max = values.iter().cloned().fold(0.0, f64::max);
    let amplitudes = if max > 0.0 {
        values.iter().map(|v| v / max).collect()
    } else {
        values
    };
    Ok(FieldProfile {
        depths,
        amplitudes,
        interfaces,
    })
}

type Sampled = (Vec<f64>, Vec<Complex64>, Vec<f64>);

/// Complex tangential `E` for a unit incident amplitude on the same depth
/// grid as [`field_profile`].
fn complex_field(stack: &LayerStack, wavelength_um: f64, samples_per_layer: usize) -> Result<Sampled, OpticsError> {
    if samples_per_layer < 2 {
        return Err(OpticsError::Samples(samples_per_layer));
    }
    PlaneWaveQuery::normal(wavelength_um).validate()?;
    stack.validate()?;
    let pol = Polarization::S;
    let lambda = wavelength_um;

    let mut indices = Vec::with_capacity(stack.layers.len());
    for layer in &stack.layers {
        let n = layer.material.index_at(lambda)?;
        let q = normal_component(n, 0.0);
        indices.push((q, admittance(n, q, pol)));
    }
    let ns = stack.substrate.index_at(lambda)?;
    let qs = normal_component(ns, 0.0);
    let eta_s = admittance(ns, qs, pol);
    let n0 = Complex64::new(stack.ambient_index, 0.0);
    let eta_0 = admittance(n0, normal_component(n0, 0.0), pol);

    // Tangential fields at the bottom of each layer, for a unit transmitted
    // amplitude, obtained by walking up from the substrate.
    let mut bottom = vec![(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)); stack.layers.len()];
    let mut field = (Complex64::new(1.0, 0.0), eta_s);
    for (j, layer) in stack.layers.iter().enumerate().rev() {
        bottom[j] = field;
        let (q, eta) = indices[j];
        field = layer_matrix(q, eta, layer.thickness_um, lambda).apply(field.0, field.1);
    }
    let incident = (eta_0 * field.0 + field.1) / (2.0 * eta_0);
    let scale = 1.0 / incident;

    let mut depths = Vec::new();
    let mut values = Vec::new();
    let mut interfaces = vec![0.0];
    let mut top = 0.0;
    for (j, layer) in stack.layers.iter().enumerate() {
        let (q, eta) = indices[j];
        let d = layer.thickness_um;
        for s in 0..samples_per_layer {
            let u = d * s as f64 / (samples_per_layer - 1) as f64;
            let remaining = d - u;
            let (e, _) = if remaining > 0.0 {
                layer_matrix(q, eta, remaining, lambda).apply(bottom[j].0, bottom[j].1)
            } else {
                bottom[j]
            };
            depths.push(top + u);
            values.push(e * scale);
        }
        top += d;
        interfaces.push(top);
    }

    let k0 = 2.0 * PI / lambda;
    let decay = k0 * qs.im;
    let extent = if decay > 0.0 { (3.0 / decay).min(lambda) } else { lambda };
    let e_sub = scale;
    for s in 0..samples_per_layer {
        let u = extent * s as f64 / (samples_per_layer - 1) as f64;
        let e = e_sub * (Complex64::new(0.0, k0 * u) * qs).exp();
        depths.push(top + u);
        values.push(e);
    }
    Ok((depths, values, interfaces))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optics::{Layer, Material};

    #[test]
    fn continuous_across_interfaces() {
        let stack = LayerStack::new(
            vec![Layer {
                material: Material::constant(2.3, 0.0),
                thickness_um: 0.41,
            }],
            Material::constant(3.0, 0.0),
        );
        let p = field_profile(&stack, 5.0, 16).unwrap();
        // layer bottom sample and first substrate sample share a depth
        let a = p.amplitudes[15];
        let b = p.amplitudes[16];
        assert_eq!(p.depths[15], p.depths[16]);
        assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        let max = p.amplitudes.iter().cloned().fold(0.0, f64::max);
        assert_eq!(max, 1.0);
        assert!(p.amplitudes.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn decays_in_lossy_substrate() {
        let stack = LayerStack::bare(Material::constant(3.0, 20.0));
        let p = field_profile(&stack, 5.0, 32).unwrap();
        assert_eq!(p.amplitudes[0], 1.0);
        assert!(p.amplitudes.windows(2).all(|w| w[1] < w[0]));
        // three decay lengths
        let last = *p.amplitudes.last().unwrap();
        assert!((last - (-3.0f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn surface_field_is_incident_plus_reflected() {
        let mut stack = LayerStack::bare(Material::constant(3.0, 1.0));
        stack.push(Material::constant(1.4, 0.0), 0.7);
        stack.push(Material::constant(4.0, 0.05), 0.3);
        let r = super::super::reflection_coefficient(&stack, &PlaneWaveQuery::normal(4.7)).unwrap();
        let (_, e, _) = complex_field(&stack, 4.7, 5).unwrap();
        assert!((e[0] - (Complex64::new(1.0, 0.0) + r)).norm() < 1e-12);
        // tangential E continuous between the two films
        assert!((e[4] - e[5]).norm() < 1e-12);
    }

    #[test]
    fn needs_two_samples() {
        let stack = LayerStack::bare(Material::constant(3.0, 1.0));
        assert!(matches!(field_profile(&stack, 5.0, 1), Err(OpticsError::Samples(1))));
    }
}
