//! Single optimization rounds with an evaluation cache and checkpointing.

use std::collections::{HashMap, VecDeque};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use super::run::{header_text, parse_run_file, OptimizationRun, RunEvaluation};
use super::{fnv1a64, ExperimentConfig, Mode, PipelineError};
use crate::aae::AaeModel;
use crate::codec::{threshold, RelaxedVector, StructureVector};
use crate::gp::{bo_loop, EvalKind, GpError, Objective, Outcome};
use crate::scoring::Scorer;
use crate::spectra::FomReport;
use crate::{Error, Result};

pub fn run_file_name(mode: Mode, round: usize) -> String {
    format!("{mode}_round{round}.csv")
}

struct Checkpoint {
    path: PathBuf,
    out: BufWriter<File>,
}

struct RunObjective<'a> {
    mode: Mode,
    scorer: &'a Scorer,
    model: Option<&'a AaeModel>,
    tau: f64,
    cache: HashMap<StructureVector, FomReport>,
    replay: VecDeque<RunEvaluation>,
    records: Vec<RunEvaluation>,
    checkpoint: Option<Checkpoint>,
    error: Option<Error>,
}

impl RunObjective<'_> {
    fn structure_at(&self, x: &[f64]) -> Result<Option<StructureVector>> {
        let relaxed = match self.mode {
            Mode::Hybrid => self.model.expect("hybrid runs carry a model").decode(x)?,
            _ => match RelaxedVector::new(x.to_vec()) {
                Ok(r) => r,
                Err(_) => return Ok(None),
            },
        };
        Ok(Some(threshold(&relaxed, self.tau)))
    }

    fn mismatch(&self, message: String) -> Error {
        let path = self.checkpoint.as_ref().map(|c| c.path.display().to_string()).unwrap_or_default();
        PipelineError::Checkpoint { path, message }.into()
    }

    fn step(&mut self, x: &[f64]) -> Result<Outcome> {
        let iter = self.records.len();
        let structure = self.structure_at(x)?;
        if let Some(rec) = self.replay.pop_front() {
            if rec.point != x || rec.structure != structure {
                return Err(self.mismatch(format!("record {iter} disagrees with the replayed proposal")));
            }
            let outcome = match (rec.kind, &rec.structure, rec.report) {
                (EvalKind::New, Some(s), Some(r)) => {
                    if self.cache.insert(s.clone(), r).is_some() {
                        return Err(self.mismatch(format!("record {iter} re-evaluates a cached structure")));
                    }
                    Outcome::New(r.total)
                }
                (EvalKind::Cached, Some(s), Some(r)) => {
                    if self.cache.get(s) != Some(&r) {
                        return Err(self.mismatch(format!("record {iter} cites an unknown structure")));
                    }
                    Outcome::Cached(r.total)
                }
                _ => Outcome::Failed("recorded failure".into()),
            };
            self.records.push(rec);
            return Ok(outcome);
        }
        let (kind, report, outcome) = match &structure {
            None => (EvalKind::Failed, None, Outcome::Failed("design outside the unit cube".into())),
            Some(s) => match self.cache.get(s) {
                Some(r) => (EvalKind::Cached, Some(*r), Outcome::Cached(r.total)),
                None => {
                    let r = self.scorer.fom(s);
                    if r.total.is_finite() {
                        self.cache.insert(s.clone(), r);
                        (EvalKind::New, Some(r), Outcome::New(r.total))
                    } else {
                        (EvalKind::Failed, None, Outcome::Failed("non-finite figure of merit".into()))
                    }
                }
            },
        };
        let rec = RunEvaluation {
            iter,
            kind,
            point: x.to_vec(),
            structure: if report.is_some() { structure } else { None },
            report,
        };
        if let Some(c) = self.checkpoint.as_mut() {
            writeln!(c.out, "{}", rec.to_line())
                .and_then(|_| c.out.flush())
                .map_err(|e| Error::io(&c.path, e))?;
        }
        self.records.push(rec);
        Ok(outcome)
    }
}

impl Objective for RunObjective<'_> {
    fn evaluate(&mut self, x: &[f64]) -> Outcome {
        match self.step(x) {
            Ok(o) => o,
            Err(e) => {
                let msg = e.to_string();
                self.error = Some(e);
                Outcome::Abort(msg)
            }
        }
    }
}

fn run_header(config: &ExperimentConfig, round: usize, model: Option<&AaeModel>) -> Vec<(String, String)> {
    let mut h = vec![
        ("mode".to_string(), config.mode.to_string()),
        ("round".to_string(), round.to_string()),
        ("seed".to_string(), config.round_seed(round).to_string()),
        ("version".to_string(), env!("CARGO_PKG_VERSION").to_string()),
    ];
    h.extend(config.snapshot());
    let hash = model.map_or("none".to_string(), |m| format!("{:016x}", fnv1a64(&m.to_bytes())));
    h.push(("model_fnv1a64".to_string(), hash));
    h
}

fn open_checkpoint(path: &Path, header: &[(String, String)]) -> Result<(Checkpoint, Vec<RunEvaluation>)> {
    let replay = if path.exists() {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let (found, records) = parse_run_file(&text)?;
        if found != header {
            let differing = header
                .iter()
                .find(|kv| !found.contains(kv))
                .map_or("header length".to_string(), |(k, _)| format!("`{k}`"));
            return Err(PipelineError::Checkpoint {
                path: path.display().to_string(),
                message: format!("configuration differs in {differing}"),
            }
            .into());
        }
        records
    } else {
        Vec::new()
    };
    // rewrite so that a torn final line is dropped before appending
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    let mut text = header_text(header);
    for r in &replay {
        text.push_str(&r.to_line());
        text.push('\n');
    }
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| Error::io(path, e))?;
    Ok((
        Checkpoint {
            path: path.to_path_buf(),
            out,
        },
        replay,
    ))
}

/// Runs one round. With a checkpoint path, every proposal is appended as
/// it happens and an existing file for the same configuration is replayed,
/// so an interrupted round resumes where it stopped and finishes exactly
/// as an uninterrupted one would.
pub fn run_round(
    config: &ExperimentConfig,
    scorer: &Scorer,
    model: Option<&AaeModel>,
    round: usize,
    checkpoint: Option<&Path>,
) -> Result<OptimizationRun> {
    config.validate()?;
    if scorer.config() != &config.fom {
        return Err(PipelineError::Config("scorer was built for a different figure of merit".into()).into());
    }
    let latent_dim = match (config.mode, model) {
        (Mode::Hybrid, Some(m)) => {
            if m.input_dim() != config.layers {
                return Err(PipelineError::Config(format!(
                    "model expects {} layers, experiment has {}",
                    m.input_dim(),
                    config.layers
                ))
                .into());
            }
            m.latent_dim()
        }
        (Mode::Hybrid, None) => return Err(PipelineError::Config("hybrid mode needs a trained model".into()).into()),
        (Mode::Direct, _) => 0,
        (Mode::BruteForce, _) => {
            return Err(PipelineError::Config("brute force is not an optimization round".into()).into())
        }
    };
    let model = if config.mode == Mode::Hybrid { model } else { None };
    let bo = config.bo_for_round(round, latent_dim);
    let header = run_header(config, round, model);
    let (checkpoint, replay) = match checkpoint {
        Some(path) => {
            let (c, r) = open_checkpoint(path, &header)?;
            (Some(c), r)
        }
        None => (None, Vec::new()),
    };
    let mut objective = RunObjective {
        mode: config.mode,
        scorer,
        model,
        tau: config.tau,
        cache: HashMap::new(),
        replay: replay.into(),
        records: Vec::new(),
        checkpoint,
        error: None,
    };
    match bo_loop(&mut objective, &bo) {
        Ok(_) => {}
        Err(GpError::Objective(message)) => {
            let inner = objective.error.take();
            return Err(match inner {
                Some(e @ Error::Pipeline(PipelineError::Checkpoint { .. })) => e,
                _ => PipelineError::Aborted {
                    round,
                    completed: objective.records.len(),
                    checkpoint: objective
                        .checkpoint
                        .as_ref()
                        .map_or("no checkpoint".to_string(), |c| c.path.display().to_string()),
                    message,
                }
                .into(),
            });
        }
        Err(e) => return Err(e.into()),
    }
    if !objective.replay.is_empty() {
        return Err(objective.mismatch("checkpoint holds more proposals than the run makes".into()));
    }
    Ok(OptimizationRun {
        mode: config.mode,
        round,
        seed: bo.seed,
        budget: bo.eval_budget,
        evaluations: objective.records,
    })
}

/// Latent-box search through the decoder.
pub fn hybrid_optimize(config: &ExperimentConfig, scorer: &Scorer, model: &AaeModel, round: usize) -> Result<OptimizationRun> {
    let config = ExperimentConfig {
        mode: Mode::Hybrid,
        ..config.clone()
    };
    run_round(&config, scorer, Some(model), round, None)
}

/// Search over the relaxed design cube.
pub fn direct_optimize(config: &ExperimentConfig, scorer: &Scorer, round: usize) -> Result<OptimizationRun> {
    let config = ExperimentConfig {
        mode: Mode::Direct,
        ..config.clone()
    };
    run_round(&config, scorer, None, round, None)
}

/// All rounds of `config`, checkpointed into `dir` when given. Up to
/// `parallel` rounds run at once; results come back in round order.
pub fn run_rounds(
    config: &ExperimentConfig,
    scorer: &Scorer,
    model: Option<&AaeModel>,
    dir: Option<&Path>,
    parallel: usize,
) -> Result<Vec<OptimizationRun>> {
    config.validate()?;
    if let Some(d) = dir {
        std::fs::create_dir_all(d).map_err(|e| Error::io(d, e))?;
    }
    let path = |r: usize| dir.map(|d| d.join(run_file_name(config.mode, r)));
    let one = |r: usize| run_round(config, scorer, model, r, path(r).as_deref());
    let workers = parallel.clamp(1, config.rounds);
    if workers == 1 {
        return (0..config.rounds).map(one).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Result<OptimizationRun>>>> = Mutex::new((0..config.rounds).map(|_| None).collect());
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let r = next.fetch_add(1, Ordering::Relaxed);
                if r >= config.rounds {
                    break;
                }
                let out = one(r);
                slots.lock().expect("no poisoned rounds")[r] = Some(out);
            });
        }
    });
    slots
        .into_inner()
        .expect("no poisoned rounds")
        .into_iter()
        .map(|r| r.expect("every round ran"))
        .collect()
}
