use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::{random_structure, threshold, CodecError, Dataset, Design, Provenance, Record, RelaxedVector};
use crate::rng;
use crate::scoring::Scorer;

/// Settings for building a seed set by filtered random search.
#[derive(Debug, Clone, PartialEq)]
pub struct GenerationConfig {
    pub count: usize,
    pub min_fom: f64,
    pub max_attempts: usize,
    pub layers: usize,
    pub seed: u64,
}

impl Default for GenerationConfig {
    fn default() -> Self {
        Self {
            count: 120,
            min_fom: 0.25,
            max_attempts: 2_000_000,
            layers: super::DEFAULT_LAYERS,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenerationStatus {
    pub attempts: usize,
    /// False when the attempt budget ran out before `count` records.
    pub complete: bool,
}

/// Draws random designs, scores them and keeps the distinct ones with
/// `fom ≥ min_fom` until `count` are found or `max_attempts` are spent.
///
/// Attempt `i` draws from its own random stream, so the result does not
/// depend on evaluation order.
pub fn generate_training_set(scorer: &Scorer, config: &GenerationConfig) -> (Dataset, GenerationStatus) {
    let mut records = Vec::new();
    let mut seen = std::collections::HashSet::new();
    let mut attempts = 0;
    while records.len() < config.count && attempts < config.max_attempts {
        let mut r = rng::stream(config.seed, attempts as u64);
        attempts += 1;
        let s = random_structure(&mut r, config.layers);
        if seen.contains(&s) {
            continue;
        }
        let (spectrum, report) = scorer.score(&s);
        if report.total >= config.min_fom {
            seen.insert(s.clone());
            records.push(Record {
                id: records.len(),
                provenance: Provenance::Seed,
                design: Design::Binary(s),
                fom: Some(report.total),
                spectrum: Some(spectrum),
            });
        }
    }
    let complete = records.len() >= config.count;
    (Dataset { records }, GenerationStatus { attempts, complete })
}

/// Jitter-and-scale augmentation settings.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentConfig {
    /// Variants per seed record.
    pub factor: usize,
    pub jitter_sigma: f64,
    pub scale_range: (f64, f64),
    /// Resampling attempts per variant before giving up.
    pub max_retries: usize,
    pub seed: u64,
}

impl Default for AugmentConfig {
    fn default() -> Self {
        Self {
            factor: 170,
            jitter_sigma: 0.15,
            scale_range: (0.8, 1.1),
            max_retries: 1000,
            seed: 0,
        }
    }
}

/// Spawns `factor` relaxed variants of every seed record.
///
/// A variant multiplies the lifted bits by a scale drawn from
/// `scale_range`, adds zero-mean Gaussian jitter and clamps to `[0, 1]`.
/// Variants that no longer threshold back to their seed are resampled.
/// Variant ids continue after the largest id in `dataset`; they inherit the
/// seed's figure of merit but not its spectrum.
pub fn augment(dataset: &Dataset, config: &AugmentConfig) -> Result<Dataset, CodecError> {
    let (lo, hi) = config.scale_range;
    if !(lo > 0.0 && lo <= hi) || !(config.jitter_sigma >= 0.0) {
        return Err(CodecError::Config(format!(
            "augmentation needs 0 < lo <= hi and sigma >= 0 (got ({lo}, {hi}), {})",
            config.jitter_sigma
        )));
    }
    let seeds: Vec<&Record> = dataset.records.iter().filter(|r| r.provenance == Provenance::Seed).collect();
    if seeds.is_empty() {
        return Err(CodecError::Dataset("augmentation needs at least one seed record".into()));
    }
    let noise = Normal::new(0.0, config.jitter_sigma).expect("sigma validated");
    let mut next_id = dataset.records.iter().map(|r| r.id + 1).max().unwrap_or(0);
    let mut out = Vec::with_capacity(seeds.len() * config.factor);
    for seed in seeds {
        let Design::Binary(bits) = &seed.design else {
            return Err(CodecError::Dataset(format!("seed record {} is not binary", seed.id)));
        };
        let mut r = rng::stream(config.seed, seed.id as u64);
        for _ in 0..config.factor {
            let mut accepted = None;
            for _ in 0..config.max_retries.max(1) {
                let scale = if hi > lo { r.random_range(lo..=hi) } else { lo };
                let values: Vec<f64> = bits
                    .bits()
                    .iter()
                    .map(|&b| b as f64 * scale + if config.jitter_sigma > 0.0 { noise.sample(&mut r) } else { 0.0 })
                    .collect();
                let v = RelaxedVector::new(values)?;
                if threshold(&v, 0.5) == *bits {
                    accepted = Some(v);
                    break;
                }
            }
            let Some(v) = accepted else {
                return Err(CodecError::Augmentation { seed_id: seed.id });
            };
            out.push(Record {
                id: next_id,
                provenance: Provenance::Augmented { seed_id: seed.id },
                design: Design::Relaxed(v),
                fom: seed.fom,
                spectrum: None,
            });
            next_id += 1;
        }
    }
    Ok(Dataset { records: out })
}
