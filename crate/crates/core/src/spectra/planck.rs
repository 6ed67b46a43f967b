use super::SpectrumError;

const PLANCK: f64 = 6.626_070_15e-34;
const LIGHT_SPEED: f64 = 299_792_458.0;
const BOLTZMANN: f64 = 1.380_649e-23;

/// `2hc²` in W·μm⁴·m⁻²·sr⁻¹.
pub const FIRST_RADIATION_CONSTANT: f64 = 2.0 * PLANCK * LIGHT_SPEED * LIGHT_SPEED * 1e24;
/// `hc/k` in μm·K.
pub const SECOND_RADIATION_CONSTANT: f64 = PLANCK * LIGHT_SPEED / BOLTZMANN * 1e6;

/// Blackbody spectral radiance in W·m⁻²·sr⁻¹·μm⁻¹.
pub fn planck_radiance(wavelength_um: f64, temperature_k: f64) -> Result<f64, SpectrumError> {
    if !(wavelength_um > 0.0 && temperature_k > 0.0) || !wavelength_um.is_finite() || !temperature_k.is_finite() {
        return Err(SpectrumError::Domain {
            wavelength_um,
            temperature_k,
        });
    }
    let x = SECOND_RADIATION_CONSTANT / (wavelength_um * temperature_k);
    Ok(FIRST_RADIATION_CONSTANT / (wavelength_um.powi(5) * x.exp_m1()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants() {
        assert!((FIRST_RADIATION_CONSTANT - 1.191_042_972e8).abs() < 1e-1);
        assert!((SECOND_RADIATION_CONSTANT - 14_387.768_77).abs() < 1e-4);
    }

    #[test]
    fn positive_and_monotone_in_temperature() {
        for w in [4.0, 5.5, 7.0] {
            let lo = planck_radiance(w, 500.0).unwrap();
            let hi = planck_radiance(w, 600.0).unwrap();
            assert!(lo > 0.0 && hi > lo);
        }
    }

    #[test]
    fn wien_peak() {
        // Wien displacement constant b = hc / (x k) with x the root of
        // x = 5 (1 - e^-x), solved by fixed-point iteration.
        let mut x: f64 = 5.0;
        for _ in 0..100 {
            x = 5.0 * (1.0 - (-x).exp());
        }
        let expected = SECOND_RADIATION_CONSTANT / x / 500.0;
        let step = 1e-4;
        let argmax = (0..60_000)
            .map(|i| 3.0 + step * i as f64)
            .max_by(|a, b| {
                planck_radiance(*a, 500.0)
                    .unwrap()
                    .total_cmp(&planck_radiance(*b, 500.0).unwrap())
            })
            .unwrap();
        assert!((argmax - expected).abs() <= step, "{argmax} vs {expected}");
        assert!((argmax - 2898.0 / 500.0).abs() < 0.01);
    }

    #[test]
    fn rejects_non_positive() {
        assert!(planck_radiance(0.0, 500.0).is_err());
        assert!(planck_radiance(5.0, -1.0).is_err());
    }
}
