//! Layered configuration: built-in defaults, an optional TOML file, then
//! command-line overrides addressed by dotted keys.

use std::path::{Path, PathBuf};

use emitter_core::aae::{Architecture, TrainConfig};
use emitter_core::codec::{AugmentConfig, GenerationConfig};
use emitter_core::gp::{BoConfig, HyperGrid};
use emitter_core::optics::Polarization;
use emitter_core::pipeline::{ExperimentConfig, Mode};
use emitter_core::spectra::FomConfig;
use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CliConfig {
    pub seed: u64,
    pub paths: Paths,
    pub fom: FomSection,
    pub data: DataSection,
    pub aae: AaeSection,
    pub bo: BoSection,
    pub experiment: ExperimentSection,
    pub analyze: AnalyzeSection,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    /// Directory with `ge.csv`, `sio2.csv` and `w.csv`; bundled tables when empty.
    pub materials: String,
    /// Defaults below are relative to the output directory.
    pub dataset: String,
    pub model: String,
    pub runs: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FomSection {
    pub target_um: f64,
    pub half_width_um: f64,
    pub band_min_um: f64,
    pub band_max_um: f64,
    pub temperature_k: f64,
    pub penalty_weight: f64,
    pub peak_prominence: f64,
    pub grid_resolution_um: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataSection {
    pub count: usize,
    pub min_fom: f64,
    pub max_attempts: usize,
    pub layers: usize,
    pub augment_factor: usize,
    pub jitter_sigma: f64,
    pub scale_min: f64,
    pub scale_max: f64,
    pub max_retries: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AaeSection {
    pub epochs: usize,
    pub batch_size: usize,
    pub lr_autoencoder: f64,
    pub lr_adversarial: f64,
    pub adversarial_beta1: f64,
    pub final_lr_fraction: f64,
    pub binary_targets: bool,
    pub latent: usize,
    pub encoder_hidden: Vec<usize>,
    pub decoder_hidden: Vec<usize>,
    pub discriminator_hidden: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoSection {
    pub budget: usize,
    pub n_init: usize,
    pub xi: f64,
    pub pool_size: usize,
    pub restarts: usize,
    pub refine_evals: usize,
    pub length_scale_min: f64,
    pub length_scale_max: f64,
    pub length_scale_count: usize,
    pub noise_ratio: f64,
    pub full_refit_limit: usize,
    pub refit_every: usize,
    pub proposal_factor: usize,
    pub surrogate_factor: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSection {
    pub mode: String,
    pub rounds: usize,
    pub latent_bound: f64,
    pub tau: f64,
    pub parallel_rounds: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalyzeSection {
    pub angle_deg: f64,
    pub polarization: String,
    pub angle_start_deg: f64,
    pub angle_stop_deg: f64,
    pub angle_step_deg: f64,
    pub wavelength_um: f64,
    pub samples_per_layer: usize,
}

impl Default for FomSection {
    fn default() -> Self {
        let f = FomConfig::default();
        Self {
            target_um: f.target_wavelength_um,
            half_width_um: f.half_width_um,
            band_min_um: f.band_min_um,
            band_max_um: f.band_max_um,
            temperature_k: f.temperature_k,
            penalty_weight: f.penalty_weight,
            peak_prominence: f.peak_prominence,
            grid_resolution_um: f.grid_resolution_um,
        }
    }
}

impl Default for DataSection {
    fn default() -> Self {
        let g = GenerationConfig::default();
        let a = AugmentConfig::default();
        Self {
            count: g.count,
            min_fom: g.min_fom,
            max_attempts: g.max_attempts,
            layers: g.layers,
            augment_factor: a.factor,
            jitter_sigma: a.jitter_sigma,
            scale_min: a.scale_range.0,
            scale_max: a.scale_range.1,
            max_retries: a.max_retries,
        }
    }
}

impl Default for AaeSection {
    fn default() -> Self {
        let t = TrainConfig::default();
        let a = &t.architecture;
        Self {
            epochs: t.epochs,
            batch_size: t.batch_size,
            lr_autoencoder: t.learning_rate_autoencoder,
            lr_adversarial: t.learning_rate_adversarial,
            adversarial_beta1: t.adversarial_beta1,
            final_lr_fraction: t.final_lr_fraction,
            binary_targets: t.binary_targets,
            latent: a.latent,
            encoder_hidden: a.encoder_hidden.clone(),
            decoder_hidden: a.decoder_hidden.clone(),
            discriminator_hidden: a.discriminator_hidden.clone(),
        }
    }
}

impl Default for BoSection {
    fn default() -> Self {
        let b = BoConfig::new(Vec::new());
        let ls = &b.hyper.length_scales;
        Self {
            budget: b.eval_budget,
            n_init: b.n_init,
            xi: b.xi,
            pool_size: b.pool_size,
            restarts: b.acquisition_restarts,
            refine_evals: b.refine_evals,
            length_scale_min: ls[0],
            length_scale_max: ls[ls.len() - 1],
            length_scale_count: ls.len(),
            noise_ratio: b.hyper.noise_ratio,
            full_refit_limit: b.full_refit_limit,
            refit_every: b.refit_every,
            proposal_factor: b.proposal_factor,
            surrogate_factor: b.surrogate_factor,
        }
    }
}

impl Default for ExperimentSection {
    fn default() -> Self {
        let e = ExperimentConfig::new(Mode::Hybrid, 4.5);
        Self {
            mode: e.mode.to_string(),
            rounds: e.rounds,
            latent_bound: e.latent_bound,
            tau: e.tau,
            parallel_rounds: 1,
        }
    }
}

impl Default for AnalyzeSection {
    fn default() -> Self {
        Self {
            angle_deg: 0.0,
            polarization: "p".into(),
            angle_start_deg: 0.0,
            angle_stop_deg: 80.0,
            angle_step_deg: 1.0,
            wavelength_um: 4.5,
            samples_per_layer: 20,
        }
    }
}

/// Parses the right-hand side of an override as a TOML value, falling back
/// to a plain string.
fn parse_value(text: &str) -> Value {
    toml::from_str::<Table>(&format!("v = {text}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(text.to_string()))
}

fn set_dotted(table: &mut Table, key: &str, value: Value) -> Result<(), CliError> {
    let mut parts: Vec<&str> = key.split('.').collect();
    let last = parts.pop().filter(|s| !s.is_empty()).ok_or_else(|| CliError::Usage(format!("bad key `{key}`")))?;
    let mut cur = table;
    for p in parts {
        let entry = cur.entry(p.to_string()).or_insert_with(|| Value::Table(Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| CliError::Data(format!("`{p}` in `{key}` is not a section")))?;
    }
    cur.insert(last.to_string(), value);
    Ok(())
}

impl CliConfig {
    /// Defaults, then `file`, then `overrides` as `(dotted key, value text)`.
    pub fn resolve(file: Option<&Path>, overrides: &[(String, String)]) -> Result<Self, CliError> {
        let mut table = match file {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Data(format!("cannot read config {}: {e}", path.display())))?;
                toml::from_str::<Table>(&text)
                    .map_err(|e| CliError::Data(format!("config {}: {e}", path.display())))?
            }
            None => Table::new(),
        };
        for (k, v) in overrides {
            set_dotted(&mut table, k, parse_value(v))?;
        }
        let config: CliConfig = Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| CliError::Data(format!("configuration: {e}")))?;
        Ok(config)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    pub fn fom_config(&self) -> FomConfig {
        let f = &self.fom;
        FomConfig {
            target_wavelength_um: f.target_um,
            half_width_um: f.half_width_um,
            band_min_um: f.band_min_um,
            band_max_um: f.band_max_um,
            temperature_k: f.temperature_k,
            penalty_weight: f.penalty_weight,
            peak_prominence: f.peak_prominence,
            grid_resolution_um: f.grid_resolution_um,
        }
    }

    pub fn generation_config(&self) -> GenerationConfig {
        GenerationConfig {
            count: self.data.count,
            min_fom: self.data.min_fom,
            max_attempts: self.data.max_attempts,
            layers: self.data.layers,
            seed: self.seed,
        }
    }

    pub fn augment_config(&self) -> AugmentConfig {
        AugmentConfig {
            factor: self.data.augment_factor,
            jitter_sigma: self.data.jitter_sigma,
            scale_range: (self.data.scale_min, self.data.scale_max),
            max_retries: self.data.max_retries,
            seed: self.seed,
        }
    }

    pub fn train_config(&self) -> TrainConfig {
        let a = &self.aae;
        TrainConfig {
            epochs: a.epochs,
            batch_size: a.batch_size,
            learning_rate_autoencoder: a.lr_autoencoder,
            learning_rate_adversarial: a.lr_adversarial,
            adversarial_beta1: a.adversarial_beta1,
            final_lr_fraction: a.final_lr_fraction,
            binary_targets: a.binary_targets,
            seed: self.seed,
            architecture: Architecture {
                latent: a.latent,
                encoder_hidden: a.encoder_hidden.clone(),
                decoder_hidden: a.decoder_hidden.clone(),
                discriminator_hidden: a.discriminator_hidden.clone(),
                ..Architecture::with_input(self.data.layers)
            },
            ..TrainConfig::default()
        }
    }

    pub fn mode(&self) -> Result<Mode, CliError> {
        self.experiment.mode.parse().map_err(|e: emitter_core::pipeline::PipelineError| CliError::Data(e.to_string()))
    }

    pub fn experiment_config(&self) -> Result<ExperimentConfig, CliError> {
        let b = &self.bo;
        if b.length_scale_count == 0 {
            return Err(CliError::Data("bo.length_scale_count must be positive".into()));
        }
        let mut bo = BoConfig::new(Vec::new());
        bo.eval_budget = b.budget;
        bo.n_init = b.n_init;
        bo.xi = b.xi;
        bo.pool_size = b.pool_size;
        bo.acquisition_restarts = b.restarts;
        bo.refine_evals = b.refine_evals;
        bo.hyper = HyperGrid::log_spaced(b.length_scale_min, b.length_scale_max, b.length_scale_count, b.noise_ratio);
        bo.full_refit_limit = b.full_refit_limit;
        bo.refit_every = b.refit_every;
        bo.proposal_factor = b.proposal_factor;
        bo.surrogate_factor = b.surrogate_factor;
        Ok(ExperimentConfig {
            mode: self.mode()?,
            fom: self.fom_config(),
            bo,
            layers: self.data.layers,
            rounds: self.experiment.rounds,
            latent_bound: self.experiment.latent_bound,
            tau: self.experiment.tau,
            seed: self.seed,
        })
    }

    pub fn polarization(&self) -> Result<Polarization, CliError> {
        self.analyze.polarization.parse().map_err(CliError::Data)
    }

    fn under_out(&self, out: &Path, value: &str, default: &str) -> PathBuf {
        if value.is_empty() {
            out.join(default)
        } else {
            PathBuf::from(value)
        }
    }

    pub fn dataset_dir(&self, out: &Path) -> PathBuf {
        self.under_out(out, &self.paths.dataset, "dataset")
    }

    pub fn model_path(&self, out: &Path) -> PathBuf {
        self.under_out(out, &self.paths.model, "model.aae")
    }

    pub fn runs_dir(&self, out: &Path) -> PathBuf {
        self.under_out(out, &self.paths.runs, "runs")
    }
}
