//! Experiment orchestration: latent-space and direct optimization rounds,
//! exhaustive enumeration and multi-round comparison.

mod brute;
mod compare;
mod optimize;
mod run;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::codec::DEFAULT_LAYERS;
use crate::gp::BoConfig;
use crate::spectra::FomConfig;

pub use brute::{brute_force, ExhaustiveTable, MAX_BRUTE_FORCE_LAYERS};
pub use compare::{compare, load_runs, ComparisonSummary, ModeSummary, HISTOGRAM_BIN_WIDTH};
pub use optimize::{direct_optimize, hybrid_optimize, run_file_name, run_round, run_rounds};
pub use run::{
    header_text, header_value, load_run, parse_run_file, OptimizationRun, RunEvaluation, RUN_CSV_HEADER,
    RUN_FORMAT_LINE,
};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid experiment configuration: {0}")]
    Config(String),
    #[error("malformed run data: {0}")]
    Parse(String),
    #[error("checkpoint {path} does not match this run: {message}")]
    Checkpoint { path: String, message: String },
    #[error("runs are not comparable: {0}")]
    Alignment(String),
    #[error("{dir} lacks {mode} run files for rounds {rounds:?}")]
    MissingRuns { mode: Mode, rounds: Vec<usize>, dir: String },
    #[error("round {round} aborted after {completed} proposals (state kept in {checkpoint}): {message}")]
    Aborted {
        round: usize,
        completed: usize,
        checkpoint: String,
        message: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    /// Optimization in the autoencoder's latent box.
    Hybrid,
    /// Optimization over the relaxed design cube.
    Direct,
    BruteForce,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Hybrid => "hybrid",
            Mode::Direct => "direct",
            Mode::BruteForce => "brute-force",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = PipelineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "hybrid" => Ok(Mode::Hybrid),
            "direct" => Ok(Mode::Direct),
            "brute-force" | "brute_force" => Ok(Mode::BruteForce),
            _ => Err(PipelineError::Config(format!(
                "unknown mode `{s}` (expected hybrid, direct or brute-force)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub fom: FomConfig,
    /// Search settings; `bounds` and `seed` are replaced per mode and round.
    pub bo: BoConfig,
    pub layers: usize,
    pub rounds: usize,
    /// Half-width of the latent box.
    pub latent_bound: f64,
    /// Threshold applied to decoded or relaxed designs.
    pub tau: f64,
    /// Round `r` uses seed `seed + r`.
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn new(mode: Mode, target_wavelength_um: f64) -> Self {
        Self {
            mode,
            fom: FomConfig::for_target(target_wavelength_um),
            bo: BoConfig::new(Vec::new()),
            layers: DEFAULT_LAYERS,
            rounds: 5,
            latent_bound: 10.0,
            tau: 0.5,
            seed: 0,
        }
    }

    /// Search settings of one round.
    pub fn bo_for_round(&self, round: usize, latent_dim: usize) -> BoConfig {
        let mut bo = self.bo.clone();
        bo.bounds = match self.mode {
            Mode::Hybrid => vec![(-self.latent_bound, self.latent_bound); latent_dim],
            Mode::Direct | Mode::BruteForce => vec![(0.0, 1.0); self.layers],
        };
        bo.seed = self.round_seed(round);
        bo
    }

    pub fn round_seed(&self, round: usize) -> u64 {
        self.seed.wrapping_add(round as u64)
    }

    pub fn validate(&self) -> Result<(), crate::Error> {
        let bad = |m: String| Err(PipelineError::Config(m).into());
        self.fom.validate()?;
        if self.layers == 0 {
            return bad("layers must be positive".into());
        }
        if self.rounds == 0 {
            return bad("rounds must be positive".into());
        }
        if !(self.latent_bound > 0.0 && self.latent_bound.is_finite()) {
            return bad(format!("latent_bound must be positive, got {}", self.latent_bound));
        }
        if !(self.tau > 0.0 && self.tau < 1.0) {
            return bad(format!("tau must lie in (0, 1), got {}", self.tau));
        }
        if self.mode == Mode::BruteForce && self.layers > MAX_BRUTE_FORCE_LAYERS {
            return bad(format!(
                "brute force supports at most {MAX_BRUTE_FORCE_LAYERS} layers, got {}",
                self.layers
            ));
        }
        Ok(())
    }

    /// Flat `key=value` snapshot used in run headers.
    pub fn snapshot(&self) -> Vec<(String, String)> {
        let f = &self.fom;
        let b = &self.bo;
        let list = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";");
        let e = |k: &str, v: String| (k.to_string(), v);
        vec![
            e("layers", self.layers.to_string()),
            e("tau", self.tau.to_string()),
            e("latent_bound", self.latent_bound.to_string()),
            e("fom.target_wavelength_um", f.target_wavelength_um.to_string()),
            e("fom.half_width_um", f.half_width_um.to_string()),
            e("fom.band_min_um", f.band_min_um.to_string()),
            e("fom.band_max_um", f.band_max_um.to_string()),
            e("fom.temperature_k", f.temperature_k.to_string()),
            e("fom.penalty_weight", f.penalty_weight.to_string()),
            e("fom.peak_prominence", f.peak_prominence.to_string()),
            e("fom.grid_resolution_um", f.grid_resolution_um.to_string()),
            e("bo.n_init", b.n_init.to_string()),
            e("bo.eval_budget", b.eval_budget.to_string()),
            e("bo.xi", b.xi.to_string()),
            e("bo.pool_size", b.pool_size.to_string()),
            e("bo.acquisition_restarts", b.acquisition_restarts.to_string()),
            e("bo.refine_evals", b.refine_evals.to_string()),
            e("bo.length_scales", list(&b.hyper.length_scales)),
            e("bo.noise_ratio", b.hyper.noise_ratio.to_string()),
            e("bo.full_refit_limit", b.full_refit_limit.to_string()),
            e("bo.refit_every", b.refit_every.to_string()),
            e("bo.proposal_factor", b.proposal_factor.to_string()),
            e("bo.surrogate_factor", b.surrogate_factor.to_string()),
        ]
    }
}

/// 64-bit FNV-1a, used to tie run files to the model they were made with.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_round_trip() {
        for m in [Mode::Hybrid, Mode::Direct, Mode::BruteForce] {
            assert_eq!(m.as_str().parse::<Mode>().unwrap(), m);
        }
        assert!("bo".parse::<Mode>().is_err());
    }

    #[test]
    fn round_settings() {
        let c = ExperimentConfig::new(Mode::Hybrid, 4.5);
        let bo = c.bo_for_round(3, 2);
        assert_eq!(bo.bounds, vec![(-10.0, 10.0); 2]);
        assert_eq!(bo.seed, 3);
        let d = ExperimentConfig { mode: Mode::Direct, ..c };
        assert_eq!(d.bo_for_round(0, 2).bounds.len(), 36);
    }

    #[test]
    fn validation() {
        let ok = ExperimentConfig::new(Mode::Direct, 4.5);
        assert!(ok.validate().is_ok());
        assert!(ExperimentConfig { tau: 1.0, ..ok.clone() }.validate().is_err());
        assert!(ExperimentConfig { rounds: 0, ..ok.clone() }.validate().is_err());
        assert!(ExperimentConfig { mode: Mode::BruteForce, ..ok }.validate().is_err());
    }

    #[test]
    fn fnv_reference() {
        assert_eq!(fnv1a64(b""), 0xcbf2_9ce4_8422_2325);
        assert_eq!(fnv1a64(b"a"), 0xaf63_dc4c_8601_ec8c);
    }
}
