use std::fmt::Write as _;

use super::SpectrumError;

/// Emissivity sampled on a strictly increasing wavelength grid (μm).
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    wavelengths: Vec<f64>,
    values: Vec<f64>,
}

impl Spectrum {
    pub fn new(wavelengths: Vec<f64>, values: Vec<f64>) -> Result<Self, SpectrumError> {
        if wavelengths.len() != values.len() {
            return Err(SpectrumError::Invalid(format!(
                "{} wavelengths but {} values",
                wavelengths.len(),
                values.len()
            )));
        }
        if wavelengths.is_empty() {
            return Err(SpectrumError::Invalid("empty spectrum".into()));
        }
        if wavelengths.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(SpectrumError::Invalid("wavelengths must be strictly increasing".into()));
        }
        if let Some(v) = values.iter().find(|v| !(**v >= 0.0 && **v <= 1.0)) {
            return Err(SpectrumError::Invalid(format!("emissivity {v} outside [0, 1]")));
        }
        Ok(Self { wavelengths, values })
    }

    pub(crate) fn from_parts_unchecked(wavelengths: Vec<f64>, values: Vec<f64>) -> Self {
        debug_assert!(Self::new(wavelengths.clone(), values.clone()).is_ok());
        Self { wavelengths, values }
    }

    /// Spectrum of `f(λ)` on `grid`.
    pub fn from_fn(grid: &[f64], f: impl Fn(f64) -> f64) -> Result<Self, SpectrumError> {
        Self::new(grid.to_vec(), grid.iter().map(|&w| f(w)).collect())
    }

    pub fn wavelengths(&self) -> &[f64] {
        &self.wavelengths
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn first_wavelength(&self) -> f64 {
        self.wavelengths[0]
    }

    pub fn last_wavelength(&self) -> f64 {
        self.wavelengths[self.wavelengths.len() - 1]
    }

    /// Linear interpolation; `None` outside the grid.
    pub fn interpolate(&self, wavelength_um: f64) -> Option<f64> {
        let w = &self.wavelengths;
        if !(wavelength_um >= w[0] && wavelength_um <= w[w.len() - 1]) {
            return None;
        }
        let j = w.partition_point(|&x| x < wavelength_um);
        if w[j] == wavelength_um {
            return Some(self.values[j]);
        }
        let t = (wavelength_um - w[j - 1]) / (w[j] - w[j - 1]);
        Some(self.values[j - 1] + t * (self.values[j] - self.values[j - 1]))
    }

    /// Wavelength of the largest value (first on ties).
    pub fn peak_wavelength(&self) -> f64 {
        let mut best = 0;
        for (i, v) in self.values.iter().enumerate() {
            if *v > self.values[best] {
                best = i;
            }
        }
        self.wavelengths[best]
    }

    /// `wavelength_um,emissivity` lines with a header comment.
    pub fn to_text(&self) -> String {
        let mut out = String::from("# wavelength_um,emissivity\n");
        for (w, v) in self.wavelengths.iter().zip(&self.values) {
            let _ = writeln!(out, "{w},{v}");
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, SpectrumError> {
        let mut wavelengths = Vec::new();
        let mut values = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split(',');
            let parsed = match (parts.next(), parts.next(), parts.next()) {
                (Some(a), Some(b), None) => a.trim().parse::<f64>().ok().zip(b.trim().parse::<f64>().ok()),
                _ => None,
            };
            let (w, v) = parsed.ok_or_else(|| SpectrumError::Parse {
                line: i + 1,
                content: line.to_string(),
            })?;
            wavelengths.push(w);
            values.push(v);
        }
        Self::new(wavelengths, values)
    }
}
