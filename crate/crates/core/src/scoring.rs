//! Fast evaluation of binary designs.
//!
//! Every design is built from two unit layers, so their characteristic
//! matrices are computed once per wavelength and a design costs one 2×2
//! product per layer. The matrices, their multiplication order and the
//! final reflectance expression are the ones used by
//! [`optics::reflection_coefficient`](crate::optics::reflection_coefficient),
//! so results agree bit for bit with the general solver.

use num_complex::Complex64;

use crate::codec::{to_stack, MaterialMap, StructureVector};
use crate::optics::{self, admittance, layer_matrix, normal_component, CharMatrix, Polarization};
use crate::spectra::{fom, FomConfig, FomReport, Spectrum};
use crate::Result;

struct WavelengthTerms {
    eta_in: Complex64,
    eta_out: Complex64,
    unit: [CharMatrix; 2],
}

/// Precomputed evaluator for one material map, figure-of-merit
/// configuration and incidence condition.
pub struct Scorer {
    map: MaterialMap,
    config: FomConfig,
    grid: Vec<f64>,
    angle_deg: f64,
    polarization: Polarization,
    terms: Vec<WavelengthTerms>,
}

impl Scorer {
    /// Normal incidence, p-polarized, on the figure-of-merit grid.
    pub fn new(map: MaterialMap, config: FomConfig) -> Result<Self> {
        Self::with_incidence(map, config, 0.0, Polarization::P)
    }

    pub fn with_incidence(map: MaterialMap, config: FomConfig, angle_deg: f64, polarization: Polarization) -> Result<Self> {
        config.validate()?;
        let grid = config.evaluation_grid();
        let mut terms = Vec::with_capacity(grid.len());
        for &lambda in &grid {
            let query = optics::PlaneWaveQuery::new(lambda, angle_deg, polarization);
            query.validate()?;
            let xi = angle_deg.to_radians().sin();
            let n0 = Complex64::new(1.0, 0.0);
            let eta_in = admittance(n0, normal_component(n0, xi), polarization);
            let mut unit = [CharMatrix::IDENTITY; 2];
            for (slot, material) in [&map.zero, &map.one].into_iter().enumerate() {
                let n = material.index_at(lambda)?;
                let q = normal_component(n, xi);
                unit[slot] = layer_matrix(q, admittance(n, q, polarization), map.unit_thickness_um, lambda);
            }
            let ns = map.substrate.index_at(lambda)?;
            let eta_out = admittance(ns, normal_component(ns, xi), polarization);
            terms.push(WavelengthTerms { eta_in, eta_out, unit });
        }
        Ok(Self {
            map,
            config,
            grid,
            angle_deg,
            polarization,
            terms,
        })
    }

    pub fn config(&self) -> &FomConfig {
        &self.config
    }

    pub fn material_map(&self) -> &MaterialMap {
        &self.map
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn spectrum(&self, structure: &StructureVector) -> Spectrum {
        let values = self
            .terms
            .iter()
            .map(|t| {
                let mut total = CharMatrix::IDENTITY;
                for &b in structure.bits() {
                    total = total.mul(&t.unit[b as usize]);
                }
                1.0 - total.reflection(t.eta_in, t.eta_out).norm_sqr().clamp(0.0, 1.0)
            })
            .collect();
        Spectrum::from_parts_unchecked(self.grid.clone(), values)
    }

    pub fn score(&self, structure: &StructureVector) -> (Spectrum, FomReport) {
        let spectrum = self.spectrum(structure);
        let report = fom(&spectrum, &self.config).expect("grid covers the working band");
        (spectrum, report)
    }

    pub fn fom(&self, structure: &StructureVector) -> FomReport {
        self.score(structure).1
    }

    /// Re-scores through the general stack solver, for cross-checks.
    pub fn score_from_scratch(&self, structure: &StructureVector) -> Result<FomReport> {
        let stack = to_stack(structure, &self.map);
        let spectrum = optics::emission_spectrum(&stack, &self.grid, self.angle_deg, self.polarization)?;
        Ok(fom(&spectrum, &self.config)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::random_structure;
    use crate::rng;

    #[test]
    fn matches_general_solver_bitwise() {
        let scorer = Scorer::new(MaterialMap::default(), FomConfig::for_target(5.5)).unwrap();
        let mut r = rng::seeded(1);
        for _ in 0..5 {
            let s = random_structure(&mut r, 36);
            let fast = scorer.score(&s);
            let stack = to_stack(&s, scorer.material_map());
            let slow = optics::emission_spectrum(&stack, scorer.grid(), 0.0, Polarization::P).unwrap();
            assert_eq!(fast.0, slow);
            assert_eq!(fast.1, scorer.score_from_scratch(&s).unwrap());
        }
    }

    #[test]
    fn oblique_scorer_matches_too() {
        let scorer =
            Scorer::with_incidence(MaterialMap::default(), FomConfig::for_target(6.5), 40.0, Polarization::S).unwrap();
        let s = random_structure(&mut rng::seeded(2), 12);
        assert_eq!(scorer.fom(&s), scorer.score_from_scratch(&s).unwrap());
    }
}
