use std::fmt;

use super::{count_peaks, planck_radiance, Spectrum, SpectrumError};

/// Parameters of the narrowband figure of merit. Wavelengths in μm.
#[derive(Debug, Clone, PartialEq)]
pub struct FomConfig {
    pub target_wavelength_um: f64,
    /// Half the target band width, `(λ₂ − λ₁)/2`.
    pub half_width_um: f64,
    pub band_min_um: f64,
    pub band_max_um: f64,
    pub temperature_k: f64,
    /// Penalty charged per detected peak.
    pub penalty_weight: f64,
    /// Minimum topographic prominence for a maximum to count as a peak.
    pub peak_prominence: f64,
    /// Spacing of the default evaluation grid.
    pub grid_resolution_um: f64,
}

impl Default for FomConfig {
    fn default() -> Self {
        Self::for_target(4.5)
    }
}

impl FomConfig {
    pub fn for_target(target_wavelength_um: f64) -> Self {
        Self {
            target_wavelength_um,
            half_width_um: 0.004,
            band_min_um: 4.0,
            band_max_um: 7.0,
            temperature_k: 500.0,
            penalty_weight: 0.1,
            peak_prominence: 0.05,
            grid_resolution_um: 0.002,
        }
    }

    /// Lower edge `λ₁` of the target band.
    pub fn lambda_1(&self) -> f64 {
        self.target_wavelength_um - self.half_width_um
    }

    /// Upper edge `λ₂` of the target band.
    pub fn lambda_2(&self) -> f64 {
        self.target_wavelength_um + self.half_width_um
    }

    pub fn validate(&self) -> Result<(), SpectrumError> {
        let err = |m: &str| Err(SpectrumError::Config(m.to_string()));
        let all = [
            self.target_wavelength_um,
            self.half_width_um,
            self.band_min_um,
            self.band_max_um,
            self.temperature_k,
            self.penalty_weight,
            self.peak_prominence,
            self.grid_resolution_um,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return err("all parameters must be finite");
        }
        if !(self.half_width_um > 0.0) {
            return err("half width must be positive");
        }
        if !(self.band_min_um < self.lambda_1() && self.lambda_2() < self.band_max_um) {
            return err("need band_min < target - half_width < target + half_width < band_max");
        }
        if !(self.temperature_k > 0.0) {
            return err("temperature must be positive");
        }
        if self.penalty_weight < 0.0 {
            return err("penalty weight must be non-negative");
        }
        if !(self.grid_resolution_um > 0.0) || self.grid_resolution_um > self.band_max_um - self.band_min_um {
            return err("grid resolution must be positive and smaller than the band");
        }
        Ok(())
    }

    /// Uniform grid over the working band at `grid_resolution_um`, with
    /// `λ₁` and `λ₂` placed exactly (replacing a grid point that coincides
    /// to within roundoff, inserted otherwise).
    pub fn evaluation_grid(&self) -> Vec<f64> {
        let span = self.band_max_um - self.band_min_um;
        let steps = (span / self.grid_resolution_um).round() as usize;
        let mut grid: Vec<f64> = (0..=steps)
            .map(|i| self.band_min_um + span * i as f64 / steps as f64)
            .collect();
        let tol = self.grid_resolution_um * 1e-6;
        for edge in [self.lambda_1(), self.lambda_2()] {
            let j = grid.partition_point(|&w| w < edge);
            if j < grid.len() && (grid[j] - edge).abs() < tol {
                grid[j] = edge;
            } else if j > 0 && (grid[j - 1] - edge).abs() < tol {
                grid[j - 1] = edge;
            } else {
                grid.insert(j, edge);
            }
        }
        grid
    }
}

/// The figure of merit and its parts.
///
/// `total = in_band − below_band − above_band − penalty` exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FomReport {
    /// Weighted emission fraction over `[λ₁, λ₂]`.
    pub in_band: f64,
    /// Weighted emission fraction over `[λ_min, λ₁]`.
    pub below_band: f64,
    /// Weighted emission fraction over `[λ₂, λ_max]`.
    pub above_band: f64,
    pub peak_count: usize,
    pub penalty: f64,
    pub total: f64,
}

impl FomReport {
    pub const CSV_HEADER: &'static str = "in_band,below_band,above_band,peak_count,penalty,total";

    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.in_band, self.below_band, self.above_band, self.peak_count, self.penalty, self.total
        )
    }

    pub fn to_key_values(&self) -> String {
        format!(
            "in_band={}\nbelow_band={}\nabove_band={}\npeak_count={}\npenalty={}\ntotal={}\n",
            self.in_band, self.below_band, self.above_band, self.peak_count, self.penalty, self.total
        )
    }

    pub fn parse_csv_row(row: &str) -> Option<Self> {
        let f: Vec<&str> = row.trim().split(',').collect();
        if f.len() != 6 {
            return None;
        }
        Some(Self {
            in_band: f[0].parse().ok()?,
            below_band: f[1].parse().ok()?,
            above_band: f[2].parse().ok()?,
            peak_count: f[3].parse().ok()?,
            penalty: f[4].parse().ok()?,
            total: f[5].parse().ok()?,
        })
    }
}

impl fmt::Display for FomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "FOM {:.4} (in {:.4}, below {:.4}, above {:.4}, {} peaks)",
            self.total, self.in_band, self.below_band, self.above_band, self.peak_count
        )
    }
}

/// Trapezoidal `∫ ε w dλ / ∫ w dλ` over `[a, b]`, with the end points
/// interpolated into the spectrum.
fn band_ratio(spectrum: &Spectrum, a: f64, b: f64, weight: &dyn Fn(f64) -> f64) -> f64 {
    let w = spectrum.wavelengths();
    let v = spectrum.values();
    let start = w.partition_point(|&x| x <= a);
    let end = w.partition_point(|&x| x < b);
    let mut points: Vec<(f64, f64)> = Vec::with_capacity(end.saturating_sub(start) + 2);
    points.push((a, spectrum.interpolate(a).expect("covered")));
    points.extend((start..end).map(|i| (w[i], v[i])));
    points.push((b, spectrum.interpolate(b).expect("covered")));

    let mut num = 0.0;
    let mut den = 0.0;
    let mut prev = (points[0].0, points[0].1, weight(points[0].0));
    for &(x, e) in &points[1..] {
        let wt = weight(x);
        let h = x - prev.0;
        num += 0.5 * h * (prev.1 * prev.2 + e * wt);
        den += 0.5 * h * (prev.2 + wt);
        prev = (x, e, wt);
    }
    num / den
}

/// Figure of merit with the blackbody radiance at `config.temperature_k` as
/// the spectral weight.
pub fn fom(spectrum: &Spectrum, config: &FomConfig) -> Result<FomReport, SpectrumError> {
    let t = config.temperature_k;
    config.validate()?;
    fom_weighted(spectrum, config, &|w| planck_radiance(w, t).expect("validated"))
}

/// Figure of merit with an arbitrary positive spectral weight.
pub fn fom_weighted(
    spectrum: &Spectrum,
    config: &FomConfig,
    weight: &dyn Fn(f64) -> f64,
) -> Result<FomReport, SpectrumError> {
    config.validate()?;
    if spectrum.first_wavelength() > config.band_min_um || spectrum.last_wavelength() < config.band_max_um {
        return Err(SpectrumError::Coverage {
            have_min: spectrum.first_wavelength(),
            have_max: spectrum.last_wavelength(),
            need_min: config.band_min_um,
            need_max: config.band_max_um,
        });
    }
    let (l1, l2) = (config.lambda_1(), config.lambda_2());
    let in_band = band_ratio(spectrum, l1, l2, weight);
    let below_band = band_ratio(spectrum, config.band_min_um, l1, weight);
    let above_band = band_ratio(spectrum, l2, config.band_max_um, weight);

    let w = spectrum.wavelengths();
    let lo = w.partition_point(|&x| x < config.band_min_um);
    let hi = w.partition_point(|&x| x <= config.band_max_um);
    let peak_count = count_peaks(&spectrum.values()[lo..hi], config.peak_prominence);
    let penalty = config.penalty_weight * peak_count as f64;
    Ok(FomReport {
        in_band,
        below_band,
        above_band,
        peak_count,
        penalty,
        total: in_band - below_band - above_band - penalty,
    })
}
