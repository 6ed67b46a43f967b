//! Alternating reconstruction / adversarial training.

use rand::seq::SliceRandom;
use rand_distr::{Distribution, StandardNormal};

use super::adam::Adam;
use super::loss::{discriminator_loss, generator_loss, reconstruction_loss};
use super::mlp::{Batch, Mlp};
use super::model::{AaeModel, Architecture};
use super::stats::energy_distance;
use super::AaeError;
use crate::codec::Dataset;
use crate::rng::{self, ChaCha8Rng};

const DIAGNOSTIC_POINTS: usize = 512;

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate_autoencoder: f64,
    pub learning_rate_adversarial: f64,
    /// First-moment decay of the discriminator and generator optimizers.
    pub adversarial_beta1: f64,
    /// Both learning rates follow a cosine from their initial value down to
    /// this fraction of it at the last epoch; 1 keeps them constant.
    pub final_lr_fraction: f64,
    /// Reconstruct inputs thresholded at one half instead of the inputs
    /// themselves, so relaxed variants are mapped back to their seed.
    pub binary_targets: bool,
    pub seed: u64,
    /// The input width is taken from the dataset.
    pub architecture: Architecture,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 200,
            batch_size: 64,
            learning_rate_autoencoder: 1e-3,
            learning_rate_adversarial: 1e-3,
            adversarial_beta1: 0.5,
            final_lr_fraction: 0.05,
            binary_targets: true,
            seed: 0,
            architecture: Architecture::default(),
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), AaeError> {
        if self.epochs == 0 || self.batch_size == 0 {
            return Err(AaeError::Config("epochs and batch_size must be positive".into()));
        }
        for (name, lr) in [
            ("learning_rate_autoencoder", self.learning_rate_autoencoder),
            ("learning_rate_adversarial", self.learning_rate_adversarial),
        ] {
            if !(lr > 0.0 && lr.is_finite()) {
                return Err(AaeError::Config(format!("{name} must be positive, got {lr}")));
            }
        }
        if !(0.0..1.0).contains(&self.adversarial_beta1) {
            return Err(AaeError::Config(format!("adversarial_beta1 must lie in [0, 1), got {}", self.adversarial_beta1)));
        }
        if !(self.final_lr_fraction > 0.0 && self.final_lr_fraction <= 1.0) {
            return Err(AaeError::Config(format!("final_lr_fraction must lie in (0, 1], got {}", self.final_lr_fraction)));
        }
        self.architecture.validate()
    }

    /// Learning-rate multiplier for `epoch` (1-based).
    pub fn lr_factor(&self, epoch: usize) -> f64 {
        let t = (epoch - 1) as f64 / self.epochs as f64;
        let f = self.final_lr_fraction;
        f + (1.0 - f) * 0.5 * (1.0 + (std::f64::consts::PI * t).cos())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochStats {
    pub epoch: usize,
    pub reconstruction_loss: f64,
    pub discriminator_loss: f64,
    pub generator_loss: f64,
    /// Mean of `|z|²` over the diagnostic subsample; 2 under the prior.
    pub latent_sq_norm: f64,
    /// Energy distance between encoded diagnostics and a prior sample.
    pub energy_distance: f64,
}

pub const HISTORY_HEADER: &str =
    "epoch,reconstruction_loss,discriminator_loss,generator_loss,latent_sq_norm,energy_distance";

#[derive(Debug, Clone, PartialEq)]
pub struct TrainHistory {
    /// Diagnostics of the untrained model, labelled epoch 0.
    pub initial: EpochStats,
    pub epochs: Vec<EpochStats>,
}

impl TrainHistory {
    /// One row per trained epoch.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(HISTORY_HEADER);
        out.push('\n');
        for e in &self.epochs {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                e.epoch, e.reconstruction_loss, e.discriminator_loss, e.generator_loss, e.latent_sq_norm, e.energy_distance
            ));
        }
        out
    }
}

fn flat(grads: &super::mlp::Gradients) -> Vec<f64> {
    grads.flat()
}

impl AaeModel {
    /// Mean reconstruction loss over the batch and its gradients with
    /// respect to the encoder and decoder parameters.
    pub fn reconstruction_gradients(&self, x: &Batch) -> (f64, Vec<f64>, Vec<f64>) {
        self.reconstruction_gradients_to(x, x)
    }

    /// As [`reconstruction_gradients`](Self::reconstruction_gradients) with
    /// separate reconstruction targets.
    pub fn reconstruction_gradients_to(&self, x: &Batch, targets: &Batch) -> (f64, Vec<f64>, Vec<f64>) {
        let et = self.encoder.forward_trace(x);
        let dt = self.decoder.forward_trace(&et.output);
        let n = x.rows as f64;
        let width = x.cols as f64;
        let mut loss = 0.0;
        let mut d_pre = Batch::zeros(x.rows, x.cols);
        for s in 0..x.rows {
            let target = targets.row(s);
            let out = dt.output.row(s);
            loss += reconstruction_loss(target, out);
            for (g, (&p, &t)) in d_pre.row_mut(s).iter_mut().zip(out.iter().zip(target)) {
                *g = (p - t) / (width * n);
            }
        }
        let mut gd = self.decoder.zero_gradients();
        let dz = self.decoder.backward(&dt, &d_pre, &mut gd);
        let mut ge = self.encoder.zero_gradients();
        self.encoder.backward(&et, &dz, &mut ge);
        (loss / n, flat(&ge), flat(&gd))
    }

    /// Discriminator loss on prior (`real`) and encoded (`fake`) latent
    /// points, with its gradient with respect to the discriminator.
    pub fn discriminator_gradients(&self, real: &Batch, fake: &Batch) -> (f64, Vec<f64>) {
        discriminator_gradients(&self.discriminator, real, fake)
    }

    /// Non-saturating generator loss of the encoder against the current
    /// discriminator, with its gradient with respect to the encoder.
    pub fn generator_gradients(&self, x: &Batch) -> (f64, Vec<f64>) {
        let et = self.encoder.forward_trace(x);
        let dt = self.discriminator.forward_trace(&et.output);
        let n = x.rows as f64;
        let p = &dt.output.data;
        let loss = generator_loss(p);
        let d_pre = Batch {
            rows: x.rows,
            cols: 1,
            data: p.iter().map(|&v| (v - 1.0) / n).collect(),
        };
        let mut scratch = self.discriminator.zero_gradients();
        let dz = self.discriminator.backward(&dt, &d_pre, &mut scratch);
        let mut ge = self.encoder.zero_gradients();
        self.encoder.backward(&et, &dz, &mut ge);
        (loss, flat(&ge))
    }
}

fn discriminator_gradients(disc: &Mlp, real: &Batch, fake: &Batch) -> (f64, Vec<f64>) {
    let rt = disc.forward_trace(real);
    let ft = disc.forward_trace(fake);
    let loss = discriminator_loss(&rt.output.data, &ft.output.data);
    let nr = real.rows as f64;
    let nf = fake.rows as f64;
    let d_real = Batch {
        rows: real.rows,
        cols: 1,
        data: rt.output.data.iter().map(|&p| (p - 1.0) / nr).collect(),
    };
    let d_fake = Batch {
        rows: fake.rows,
        cols: 1,
        data: ft.output.data.iter().map(|&p| p / nf).collect(),
    };
    let mut g = disc.zero_gradients();
    disc.backward(&rt, &d_real, &mut g);
    disc.backward(&ft, &d_fake, &mut g);
    (loss, flat(&g))
}

fn apply(net: &mut Mlp, opt: &mut Adam, grads: &[f64]) {
    let mut p = net.flat_params();
    opt.step(&mut p, grads);
    net.set_flat_params(&p);
}

fn prior_batch(rng: &mut ChaCha8Rng, rows: usize, dim: usize) -> Batch {
    Batch {
        rows,
        cols: dim,
        data: (0..rows * dim).map(|_| StandardNormal.sample(rng)).collect(),
    }
}

/// Model plus optimizer state.
pub struct Trainer {
    pub model: AaeModel,
    encoder_opt: Adam,
    decoder_opt: Adam,
    generator_opt: Adam,
    discriminator_opt: Adam,
    rng: ChaCha8Rng,
}

impl Trainer {
    pub fn new(model: AaeModel, config: &TrainConfig) -> Self {
        let mut t = Self {
            encoder_opt: Adam::new(model.encoder.param_count(), config.learning_rate_autoencoder),
            decoder_opt: Adam::new(model.decoder.param_count(), config.learning_rate_autoencoder),
            generator_opt: Adam::new(model.encoder.param_count(), config.learning_rate_adversarial),
            discriminator_opt: Adam::new(model.discriminator.param_count(), config.learning_rate_adversarial),
            rng: rng::stream(config.seed, 0),
            model,
        };
        t.set_adversarial_beta1(config.adversarial_beta1);
        t
    }

    pub fn set_learning_rates(&mut self, autoencoder: f64, adversarial: f64) {
        self.encoder_opt.learning_rate = autoencoder;
        self.decoder_opt.learning_rate = autoencoder;
        self.generator_opt.learning_rate = adversarial;
        self.discriminator_opt.learning_rate = adversarial;
    }

    pub fn set_adversarial_beta1(&mut self, beta1: f64) {
        self.generator_opt.beta1 = beta1;
        self.discriminator_opt.beta1 = beta1;
    }

    /// One autoencoder update; returns the pre-update loss.
    pub fn reconstruction_step(&mut self, x: &Batch, targets: &Batch) -> f64 {
        let (loss, ge, gd) = self.model.reconstruction_gradients_to(x, targets);
        apply(&mut self.model.encoder, &mut self.encoder_opt, &ge);
        apply(&mut self.model.decoder, &mut self.decoder_opt, &gd);
        loss
    }

    /// One discriminator update on the given latent samples.
    pub fn discriminator_step(&mut self, real: &Batch, fake: &Batch) -> f64 {
        let (loss, g) = self.model.discriminator_gradients(real, fake);
        apply(&mut self.model.discriminator, &mut self.discriminator_opt, &g);
        loss
    }

    /// One encoder update against the discriminator.
    pub fn generator_step(&mut self, x: &Batch) -> f64 {
        let (loss, g) = self.model.generator_gradients(x);
        apply(&mut self.model.encoder, &mut self.generator_opt, &g);
        loss
    }

    /// Discriminator phase on prior samples against `E(x)`, then the
    /// generator phase. Returns both losses.
    pub fn adversarial_step(&mut self, x: &Batch) -> (f64, f64) {
        let real = prior_batch(&mut self.rng, x.rows, self.model.latent_dim());
        let fake = self.model.encoder.forward(x);
        let d = self.discriminator_step(&real, &fake);
        let g = self.generator_step(x);
        (d, g)
    }
}

struct Diagnostics {
    inputs: Batch,
    prior: Batch,
    prior_rows: Vec<Vec<f64>>,
}

impl Diagnostics {
    fn new(data: &[Vec<f64>], seed: u64, latent: usize) -> Self {
        let stride = data.len().div_ceil(DIAGNOSTIC_POINTS).max(1);
        let rows: Vec<Vec<f64>> = data.iter().step_by(stride).cloned().collect();
        let prior = prior_batch(&mut rng::stream(seed, 1), DIAGNOSTIC_POINTS, latent);
        Self {
            inputs: Batch::from_rows(&rows),
            prior_rows: prior.to_rows(),
            prior,
        }
    }

    fn measure(&self, model: &AaeModel, epoch: usize, losses: (f64, f64, f64)) -> EpochStats {
        let z = model.encoder.forward(&self.inputs);
        let rows = z.to_rows();
        let latent_sq_norm = rows.iter().map(|r| r.iter().map(|v| v * v).sum::<f64>()).sum::<f64>() / rows.len() as f64;
        let energy = if rows.len() >= 2 {
            energy_distance(&rows, &self.prior_rows)
        } else {
            f64::NAN
        };
        EpochStats {
            epoch,
            reconstruction_loss: losses.0,
            discriminator_loss: losses.1,
            generator_loss: losses.2,
            latent_sq_norm,
            energy_distance: energy,
        }
    }

    fn initial(&self, model: &AaeModel) -> EpochStats {
        let (r, _, _) = model.reconstruction_gradients(&self.inputs);
        let fake = model.encoder.forward(&self.inputs);
        let d_fake = model.discriminator.forward(&fake).data;
        let d_real = model.discriminator.forward(&self.prior).data;
        let d = discriminator_loss(&d_real, &d_fake);
        let g = generator_loss(&d_fake);
        self.measure(model, 0, (r, d, g))
    }
}

/// Trains a fresh model on every record of `dataset`.
///
/// Each batch takes a reconstruction step followed by an adversarial step.
/// Batches are reshuffled every epoch; a trailing partial batch is used.
pub fn train(dataset: &Dataset, config: &TrainConfig) -> Result<(AaeModel, TrainHistory), AaeError> {
    config.validate()?;
    if dataset.len() < config.batch_size {
        return Err(AaeError::Dataset(format!(
            "{} records is fewer than the batch size {}",
            dataset.len(),
            config.batch_size
        )));
    }
    let data: Vec<Vec<f64>> = dataset.records.iter().map(|r| r.design.to_values()).collect();
    let width = data[0].len();
    if let Some(bad) = data.iter().find(|d| d.len() != width) {
        return Err(AaeError::Shape {
            expected: width,
            got: bad.len(),
        });
    }
    let arch = Architecture {
        input: width,
        ..config.architecture.clone()
    };
    let model = AaeModel::new(&arch, &mut rng::stream(config.seed, 2))?;
    let diagnostics = Diagnostics::new(&data, config.seed, arch.latent);
    let initial = diagnostics.initial(&model);
    let mut trainer = Trainer::new(model, config);
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut shuffle_rng = rng::stream(config.seed, 3);
    let targets: Vec<Vec<f64>> = if config.binary_targets {
        data.iter().map(|d| d.iter().map(|&v| if v >= 0.5 { 1.0 } else { 0.0 }).collect()).collect()
    } else {
        data.clone()
    };
    let mut epochs = Vec::with_capacity(config.epochs);
    for epoch in 1..=config.epochs {
        order.shuffle(&mut shuffle_rng);
        let f = config.lr_factor(epoch);
        trainer.set_learning_rates(config.learning_rate_autoencoder * f, config.learning_rate_adversarial * f);
        let (mut rec, mut dis, mut gen) = (0.0, 0.0, 0.0);
        for (b, chunk) in order.chunks(config.batch_size).enumerate() {
            let mut batch = Batch::zeros(chunk.len(), width);
            let mut wanted = Batch::zeros(chunk.len(), width);
            for (row, &i) in chunk.iter().enumerate() {
                batch.row_mut(row).copy_from_slice(&data[i]);
                wanted.row_mut(row).copy_from_slice(&targets[i]);
            }
            let r = trainer.reconstruction_step(&batch, &wanted);
            if !r.is_finite() {
                return Err(AaeError::NonFinite {
                    epoch,
                    batch: b,
                    what: "reconstruction",
                });
            }
            let (d, g) = trainer.adversarial_step(&batch);
            for (v, what) in [(d, "discriminator"), (g, "generator")] {
                if !v.is_finite() {
                    return Err(AaeError::NonFinite { epoch, batch: b, what });
                }
            }
            let w = chunk.len() as f64;
            rec += r * w;
            dis += d * w;
            gen += g * w;
        }
        let n = data.len() as f64;
        epochs.push(diagnostics.measure(&trainer.model, epoch, (rec / n, dis / n, gen / n)));
    }
    Ok((trainer.model, TrainHistory { initial, epochs }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::{Design, Provenance, Record, StructureVector};
    use std::f64::consts::LN_2;

    fn seed_dataset(structures: &[&str]) -> Dataset {
        Dataset {
            records: structures
                .iter()
                .enumerate()
                .map(|(id, s)| Record {
                    id,
                    provenance: Provenance::Seed,
                    design: Design::Binary(s.parse::<StructureVector>().unwrap()),
                    fom: Some(0.3),
                    spectrum: None,
                })
                .collect(),
        }
    }

    fn small_arch() -> Architecture {
        Architecture {
            input: 8,
            latent: 2,
            encoder_hidden: vec![8],
            decoder_hidden: vec![8],
            discriminator_hidden: vec![8],
        }
    }

    #[test]
    fn single_record_overfits() {
        let ds = seed_dataset(&["10110010"]);
        let config = TrainConfig {
            epochs: 1500,
            batch_size: 1,
            learning_rate_autoencoder: 1e-2,
            architecture: small_arch(),
            ..TrainConfig::default()
        };
        let (model, history) = train(&ds, &config).unwrap();
        assert_eq!(history.epochs.len(), 1500);
        let last = history.epochs.last().unwrap();
        assert!(last.reconstruction_loss < 0.01, "{}", last.reconstruction_loss);
        let x = ds.records[0].design.to_values();
        let z = model.encode(&x).unwrap();
        let back = crate::codec::threshold(&model.decode(&z).unwrap(), 0.5);
        assert_eq!(back.to_string(), "10110010");
    }

    #[test]
    fn training_is_reproducible() {
        let ds = seed_dataset(&["10110010", "00001111", "11110000", "01010101"]);
        let config = TrainConfig {
            epochs: 5,
            batch_size: 2,
            seed: 9,
            architecture: small_arch(),
            ..TrainConfig::default()
        };
        let a = train(&ds, &config).unwrap();
        let b = train(&ds, &config).unwrap();
        assert_eq!(a.0.to_bytes(), b.0.to_bytes());
        assert_eq!(a.1.to_csv(), b.1.to_csv());
        let other = train(&ds, &TrainConfig { seed: 10, ..config }).unwrap();
        assert_ne!(a.0.to_bytes(), other.0.to_bytes());
    }

    #[test]
    fn rejects_small_datasets_and_bad_config() {
        let ds = seed_dataset(&["1010"]);
        assert!(matches!(train(&ds, &TrainConfig::default()), Err(AaeError::Dataset(_))));
        let bad = TrainConfig {
            learning_rate_adversarial: 0.0,
            batch_size: 1,
            ..TrainConfig::default()
        };
        assert!(matches!(train(&ds, &bad), Err(AaeError::Config(_))));
    }

    #[test]
    fn indistinguishable_samples_sit_at_equilibrium() {
        let mut model = AaeModel::new(&small_arch(), &mut rng::seeded(0)).unwrap();
        // constant discriminator output of one half
        let params = vec![0.0; model.discriminator.param_count()];
        model.discriminator.set_flat_params(&params);
        let z = prior_batch(&mut rng::seeded(1), 16, 2);
        let (loss, grads) = model.discriminator_gradients(&z, &z);
        assert!((loss - 2.0 * LN_2).abs() < 1e-15);
        assert!(grads.iter().all(|g| g.abs() < 1e-15));
    }

    #[test]
    fn discriminator_learns_separable_samples() {
        let model = AaeModel::new(&small_arch(), &mut rng::seeded(3)).unwrap();
        let config = TrainConfig {
            learning_rate_adversarial: 1e-2,
            ..TrainConfig::default()
        };
        let mut trainer = Trainer::new(model, &config);
        let mut r = rng::seeded(4);
        let real = prior_batch(&mut r, 64, 2);
        let mut fake = prior_batch(&mut r, 64, 2);
        fake.data.iter_mut().for_each(|v| *v = *v * 0.3 + 6.0);
        let losses: Vec<f64> = (0..100).map(|_| trainer.discriminator_step(&real, &fake)).collect();
        assert!(losses[99] < losses[0]);
        let first: f64 = losses[..10].iter().sum();
        let last: f64 = losses[90..].iter().sum();
        assert!(last < 0.5 * first, "{first} {last}");
    }

    #[test]
    fn history_csv_rows() {
        let ds = seed_dataset(&["1010", "0110"]);
        let config = TrainConfig {
            epochs: 1,
            batch_size: 2,
            architecture: small_arch(),
            ..TrainConfig::default()
        };
        let (_, h) = train(&ds, &config).unwrap();
        let csv = h.to_csv();
        assert_eq!(csv.lines().count(), 2);
        assert_eq!(csv.lines().next().unwrap(), HISTORY_HEADER);
    }
}
