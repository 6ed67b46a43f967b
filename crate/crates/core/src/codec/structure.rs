use std::fmt;
use std::path::Path;

use rand::Rng;

use super::CodecError;
use crate::optics::{Layer, LayerStack, Material, OpticalConstantsTable};

/// Number of layers in the full design problem.
pub const DEFAULT_LAYERS: usize = 36;
/// Thickness of every unit layer in μm.
pub const UNIT_THICKNESS_UM: f64 = 0.11;

/// Binary material choice per layer, top layer first: `0` is Ge, `1` is SiO2.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StructureVector {
    bits: Vec<u8>,
}

impl StructureVector {
    pub fn new(bits: Vec<u8>) -> Result<Self, CodecError> {
        if bits.is_empty() || bits.len() > 64 {
            return Err(CodecError::Length {
                expected: DEFAULT_LAYERS,
                got: bits.len(),
            });
        }
        if let Some(b) = bits.iter().find(|b| **b > 1) {
            return Err(CodecError::NotBinary(*b as f64));
        }
        Ok(Self { bits })
    }

    /// Low bit of `mask` is layer 0.
    pub fn from_mask(mask: u64, len: usize) -> Self {
        assert!((1..=64).contains(&len));
        Self {
            bits: (0..len).map(|i| ((mask >> i) & 1) as u8).collect(),
        }
    }

    pub fn zeros(len: usize) -> Self {
        Self::from_mask(0, len)
    }

    pub fn mask(&self) -> u64 {
        self.bits
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, &b)| acc | ((b as u64) << i))
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// The bits as reals in `{0, 1}`.
    pub fn lift(&self) -> RelaxedVector {
        RelaxedVector {
            values: self.bits.iter().map(|&b| b as f64).collect(),
        }
    }

    /// Fraction of positions where `self` and `other` agree.
    pub fn agreement(&self, other: &StructureVector) -> f64 {
        assert_eq!(self.len(), other.len());
        let same = self.bits.iter().zip(&other.bits).filter(|(a, b)| a == b).count();
        same as f64 / self.len() as f64
    }

    /// Parses a string of `0`/`1` characters, ignoring `_`, `;` and spaces.
    pub fn parse(text: &str) -> Result<Self, CodecError> {
        let bits = text
            .chars()
            .filter(|c| !matches!(c, '_' | ';' | ' '))
            .map(|c| match c {
                '0' => Ok(0u8),
                '1' => Ok(1u8),
                other => Err(CodecError::Parse(format!("unexpected character {other:?} in bit string"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(bits)
    }
}

impl std::str::FromStr for StructureVector {
    type Err = CodecError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

impl fmt::Display for StructureVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.bits {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

/// A continuous relaxation of a design, one value in `[0, 1]` per layer.
#[derive(Debug, Clone, PartialEq)]
pub struct RelaxedVector {
    values: Vec<f64>,
}

impl RelaxedVector {
    /// Clamps every value into `[0, 1]`. Non-finite values are rejected.
    pub fn new(values: Vec<f64>) -> Result<Self, CodecError> {
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(CodecError::NotBinary(*v));
        }
        Ok(Self {
            values: values.into_iter().map(|v| v.clamp(0.0, 1.0)).collect(),
        })
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
}

/// `bit_i = 1` where `value_i ≥ tau`.
pub fn threshold(relaxed: &RelaxedVector, tau: f64) -> StructureVector {
    StructureVector {
        bits: relaxed.values.iter().map(|&v| u8::from(v >= tau)).collect(),
    }
}

/// Uniform random design of `len` fair bits.
pub fn random_structure<R: Rng + ?Sized>(rng: &mut R, len: usize) -> StructureVector {
    StructureVector {
        bits: (0..len).map(|_| u8::from(rng.random::<bool>())).collect(),
    }
}

/// How bits map to physical layers.
#[derive(Debug, Clone, PartialEq)]
pub struct MaterialMap {
    /// Material for bit `0`.
    pub zero: Material,
    /// Material for bit `1`.
    pub one: Material,
    pub substrate: Material,
    pub unit_thickness_um: f64,
}

impl Default for MaterialMap {
    /// Ge / SiO2 on W from the bundled tables, 0.11 μm unit layers.
    fn default() -> Self {
        Self {
            zero: Material::tabulated(OpticalConstantsTable::germanium()),
            one: Material::tabulated(OpticalConstantsTable::silica()),
            substrate: Material::tabulated(OpticalConstantsTable::tungsten()),
            unit_thickness_um: UNIT_THICKNESS_UM,
        }
    }
}

impl MaterialMap {
    /// Loads `ge.csv`, `sio2.csv` and `w.csv` from `dir`.
    pub fn load_dir(dir: impl AsRef<Path>) -> Result<Self, CodecError> {
        let dir = dir.as_ref();
        let load = |file: &str, name: &str| {
            let path = dir.join(file);
            if !path.exists() {
                return Err(CodecError::Config(format!(
                    "material {name} unresolved: {} not found",
                    path.display()
                )));
            }
            OpticalConstantsTable::load(name, &path)
                .map(Material::tabulated)
                .map_err(|e| CodecError::Config(e.to_string()))
        };
        Ok(Self {
            zero: load("ge.csv", "Ge")?,
            one: load("sio2.csv", "SiO2")?,
            substrate: load("w.csv", "W")?,
            unit_thickness_um: UNIT_THICKNESS_UM,
        })
    }
}

/// Physical stack for a design: one unit layer per bit on the substrate,
/// in air.
pub fn to_stack(structure: &StructureVector, map: &MaterialMap) -> LayerStack {
    let layers = structure
        .bits
        .iter()
        .map(|&b| Layer {
            material: if b == 0 { map.zero.clone() } else { map.one.clone() },
            thickness_um: map.unit_thickness_um,
        })
        .collect();
    LayerStack::new(layers, map.substrate.clone())
}
