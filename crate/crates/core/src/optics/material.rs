//! Tabulated optical constants and the material handles used by layer stacks.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;

use super::OpticsError;

const BUNDLED_GE: &str = include_str!("../../data/ge.csv");
const BUNDLED_SIO2: &str = include_str!("../../data/sio2.csv");
const BUNDLED_W: &str = include_str!("../../data/w.csv");

/// One row of a table: wavelength in μm, refractive index `n`, extinction `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpticalRow {
    pub wavelength_um: f64,
    pub n: f64,
    pub k: f64,
}

/// Tabulated `(λ, n, k)` data for one material, linearly interpolated.
#[derive(Debug, Clone, PartialEq)]
pub struct OpticalConstantsTable {
    name: String,
    rows: Vec<OpticalRow>,
}

impl OpticalConstantsTable {
    /// Validates and wraps the rows. Wavelengths must be strictly
    /// increasing, `n > 0` and `k ≥ 0`.
    pub fn new(name: impl Into<String>, rows: Vec<OpticalRow>) -> Result<Self, OpticsError> {
        let name = name.into();
        let bad = |reason: String| OpticsError::InvalidTable {
            material: name.clone(),
            reason,
        };
        if rows.len() < 2 {
            return Err(bad(format!("need at least 2 rows, got {}", rows.len())));
        }
        for (i, row) in rows.iter().enumerate() {
            if !(row.wavelength_um.is_finite() && row.n.is_finite() && row.k.is_finite()) {
                return Err(bad(format!("row {i} has a non-finite value")));
            }
            if row.wavelength_um <= 0.0 {
                return Err(bad(format!("row {i}: wavelength must be positive")));
            }
            if row.n <= 0.0 {
                return Err(bad(format!("row {i}: n must be positive")));
            }
            if row.k < 0.0 {
                return Err(bad(format!("row {i}: k must be non-negative")));
            }
            if i > 0 && row.wavelength_um <= rows[i - 1].wavelength_um {
                return Err(bad(format!("row {i}: wavelengths must be strictly increasing")));
            }
        }
        Ok(Self { name, rows })
    }

    /// Parses the `wavelength_um,n,k` text format; `#` starts a comment line
    /// and blank lines are skipped.
    pub fn parse(name: impl Into<String>, text: &str) -> Result<Self, OpticsError> {
        let name = name.into();
        let mut rows = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            let parsed: Option<Vec<f64>> = if fields.len() == 3 {
                fields.iter().map(|f| f.parse::<f64>().ok()).collect()
            } else {
                None
            };
            match parsed {
                Some(v) => rows.push(OpticalRow {
                    wavelength_um: v[0],
                    n: v[1],
                    k: v[2],
                }),
                None => {
                    return Err(OpticsError::Parse {
                        material: name,
                        line: lineno + 1,
                        content: line.to_string(),
                    })
                }
            }
        }
        Self::new(name, rows)
    }

    pub fn load(name: impl Into<String>, path: impl AsRef<Path>) -> Result<Self, OpticsError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| OpticsError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::parse(name, &text)
    }

    /// Bundled germanium table (3.5–7.5 μm).
    pub fn germanium() -> Self {
        Self::parse("Ge", BUNDLED_GE).expect("bundled Ge table is valid")
    }

    /// Bundled fused-silica table (3.5–7.5 μm).
    pub fn silica() -> Self {
        Self::parse("SiO2", BUNDLED_SIO2).expect("bundled SiO2 table is valid")
    }

    /// Bundled tungsten table (3.5–7.5 μm).
    pub fn tungsten() -> Self {
        Self::parse("W", BUNDLED_W).expect("bundled W table is valid")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rows(&self) -> &[OpticalRow] {
        &self.rows
    }

    /// `(first, last)` tabulated wavelength.
    pub fn span(&self) -> (f64, f64) {
        (self.rows[0].wavelength_um, self.rows[self.rows.len() - 1].wavelength_um)
    }

    /// Complex index `n + ik` at `wavelength_um`, interpolating `n` and `k`
    /// independently between the bracketing rows.
    pub fn refractive_index(&self, wavelength_um: f64) -> Result<Complex64, OpticsError> {
        let (lo, hi) = self.span();
        if !(wavelength_um >= lo && wavelength_um <= hi) {
            return Err(OpticsError::OutOfRange {
                material: self.name.clone(),
                wavelength_um,
                min: lo,
                max: hi,
            });
        }
        // first row with wavelength >= query
        let j = self.rows.partition_point(|r| r.wavelength_um < wavelength_um);
        let upper = self.rows[j];
        if upper.wavelength_um == wavelength_um {
            return Ok(Complex64::new(upper.n, upper.k));
        }
        let lower = self.rows[j - 1];
        let t = (wavelength_um - lower.wavelength_um) / (upper.wavelength_um - lower.wavelength_um);
        Ok(Complex64::new(
            lower.n + t * (upper.n - lower.n),
            lower.k + t * (upper.k - lower.k),
        ))
    }
}

/// The optical response of a layer or substrate: either a table or a
/// wavelength-independent index.
#[derive(Clone, PartialEq)]
pub enum Material {
    Tabulated(Arc<OpticalConstantsTable>),
    Constant { name: String, index: Complex64 },
}

impl Material {
    pub fn tabulated(table: OpticalConstantsTable) -> Self {
        Material::Tabulated(Arc::new(table))
    }

    /// Non-dispersive material with index `n + ik`.
    pub fn constant(n: f64, k: f64) -> Self {
        Material::Constant {
            name: format!("n={n}+{k}i"),
            index: Complex64::new(n, k),
        }
    }

    pub fn name(&self) -> &str {
        match self {
            Material::Tabulated(t) => t.name(),
            Material::Constant { name, .. } => name,
        }
    }

    pub fn index_at(&self, wavelength_um: f64) -> Result<Complex64, OpticsError> {
        match self {
            Material::Tabulated(t) => t.refractive_index(wavelength_um),
            Material::Constant { index, .. } => Ok(*index),
        }
    }
}

impl fmt::Debug for Material {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Material::Tabulated(t) => write!(f, "Tabulated({})", t.name()),
            Material::Constant { index, .. } => write!(f, "Constant({index})"),
        }
    }
}
