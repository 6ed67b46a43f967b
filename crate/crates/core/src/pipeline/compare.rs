//! Aggregation of optimization rounds into figure-ready tables.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::optimize::run_file_name;
use super::run::{load_run, OptimizationRun};
use super::{Mode, PipelineError};
use crate::{Error, Result};

pub const HISTOGRAM_BIN_WIDTH: f64 = 0.05;
const BINS_PER_UNIT: f64 = 20.0;

#[derive(Debug, Clone, PartialEq)]
pub struct RoundSummary {
    pub round: usize,
    pub seed: u64,
    pub unique: usize,
    pub proposals: usize,
    pub best_fom: f64,
    pub best_structure: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeSummary {
    pub mode: Mode,
    pub rounds: Vec<RoundSummary>,
    /// Running maximum per round, indexed by new evaluation; a round that
    /// stopped short of the budget holds its last value.
    pub traces: Vec<Vec<f64>>,
    /// Per-evaluation mean of `traces` across rounds.
    pub mean_trace: Vec<f64>,
    /// Figures of merit of every distinct structure, per round.
    pub foms: Vec<Vec<f64>>,
    /// Pooled counts over the summary's bins.
    pub histogram: Vec<usize>,
}

impl ModeSummary {
    pub fn round_max(&self) -> Vec<f64> {
        self.rounds.iter().map(|r| r.best_fom).collect()
    }

    pub fn final_mean_max(&self) -> f64 {
        *self.mean_trace.last().expect("traces are non-empty")
    }

    pub fn best_fom(&self) -> f64 {
        self.round_max().into_iter().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn pooled_count(&self) -> usize {
        self.foms.iter().map(Vec::len).sum()
    }

    /// Share of pooled figures of merit strictly below `level`.
    pub fn fraction_below(&self, level: f64) -> f64 {
        let below = self.foms.iter().flatten().filter(|&&f| f < level).count();
        below as f64 / self.pooled_count() as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonSummary {
    pub budget: usize,
    /// Index `k` of the first bin `[k·w, (k+1)·w)`.
    pub first_bin: i64,
    pub modes: Vec<ModeSummary>,
}

fn bin_index(f: f64) -> i64 {
    (f * BINS_PER_UNIT).floor() as i64
}

fn bin_edge(k: i64) -> f64 {
    k as f64 / BINS_PER_UNIT
}

/// Groups runs by mode (ordered by round within a mode) and derives the
/// traces, means and histograms. All runs must share one budget.
pub fn compare(runs: &[OptimizationRun]) -> Result<ComparisonSummary> {
    let first = runs
        .first()
        .ok_or_else(|| PipelineError::Alignment("no runs to compare".into()))?;
    let budget = first.budget;
    if budget == 0 {
        return Err(PipelineError::Alignment("runs have a zero budget".into()).into());
    }
    for r in runs {
        if r.budget != budget {
            return Err(PipelineError::Alignment(format!(
                "{} round {} has budget {}, expected {budget}",
                r.mode, r.round, r.budget
            ))
            .into());
        }
        if r.unique_count() == 0 {
            return Err(
                PipelineError::Alignment(format!("{} round {} has no evaluated structures", r.mode, r.round)).into(),
            );
        }
    }
    let mut sorted: Vec<&OptimizationRun> = runs.iter().collect();
    sorted.sort_by_key(|r| (r.mode, r.round));
    if let Some(w) = sorted.windows(2).find(|w| (w[0].mode, w[0].round) == (w[1].mode, w[1].round)) {
        return Err(PipelineError::Alignment(format!("{} round {} appears twice", w[0].mode, w[0].round)).into());
    }

    let all = sorted.iter().flat_map(|r| r.unique_foms());
    let (lo, hi) = all.fold((i64::MAX, i64::MIN), |(lo, hi), f| (lo.min(bin_index(f)), hi.max(bin_index(f))));
    let bins = (hi - lo + 1) as usize;

    let mut modes: Vec<ModeSummary> = Vec::new();
    for run in sorted {
        if modes.last().map(|m| m.mode) != Some(run.mode) {
            modes.push(ModeSummary {
                mode: run.mode,
                rounds: Vec::new(),
                traces: Vec::new(),
                mean_trace: Vec::new(),
                foms: Vec::new(),
                histogram: vec![0; bins],
            });
        }
        let m = modes.last_mut().expect("just pushed");
        let best = run.best().expect("run has evaluations");
        m.rounds.push(RoundSummary {
            round: run.round,
            seed: run.seed,
            unique: run.unique_count(),
            proposals: run.proposals(),
            best_fom: best.fom().expect("best carries a report"),
            best_structure: best.structure.as_ref().map(|s| s.to_string()).unwrap_or_default(),
        });
        let mut trace = run.best_so_far_by_unique();
        trace.truncate(budget);
        let last = *trace.last().expect("non-empty");
        trace.resize(budget, last);
        m.traces.push(trace);
        let foms = run.unique_foms();
        for &f in &foms {
            m.histogram[(bin_index(f) - lo) as usize] += 1;
        }
        m.foms.push(foms);
    }
    for m in &mut modes {
        let n = m.traces.len() as f64;
        m.mean_trace = (0..budget).map(|i| m.traces.iter().map(|t| t[i]).sum::<f64>() / n).collect();
    }
    Ok(ComparisonSummary {
        budget,
        first_bin: lo,
        modes,
    })
}

impl ComparisonSummary {
    pub fn mode(&self, mode: Mode) -> Option<&ModeSummary> {
        self.modes.iter().find(|m| m.mode == mode)
    }

    /// `(file name, contents)` of every summary table.
    pub fn tables(&self) -> Vec<(&'static str, String)> {
        let mut fig2a = String::from("mode,round,evaluation,best_so_far\n");
        let mut fig3b = String::from("mode,round,evaluation,fom\n");
        let mut hist = String::from("mode,bin_lo,bin_hi,count,fraction\n");
        let mut summary = String::from("mode,round,seed,unique,proposals,best_fom,best_structure\n");
        for m in &self.modes {
            for (r, trace) in m.rounds.iter().zip(&m.traces) {
                for (i, v) in trace.iter().enumerate() {
                    let _ = writeln!(fig2a, "{},{},{},{v}", m.mode, r.round, i + 1);
                }
            }
            for (r, foms) in m.rounds.iter().zip(&m.foms) {
                for (i, f) in foms.iter().enumerate() {
                    let _ = writeln!(fig3b, "{},{},{},{f}", m.mode, r.round, i + 1);
                }
            }
            let total = m.pooled_count() as f64;
            for (i, &c) in m.histogram.iter().enumerate() {
                let k = self.first_bin + i as i64;
                let _ = writeln!(hist, "{},{},{},{c},{}", m.mode, bin_edge(k), bin_edge(k + 1), c as f64 / total);
            }
            for r in &m.rounds {
                let _ = writeln!(
                    summary,
                    "{},{},{},{},{},{},{}",
                    m.mode, r.round, r.seed, r.unique, r.proposals, r.best_fom, r.best_structure
                );
            }
        }
        let mut fig2b = String::from("evaluation");
        for m in &self.modes {
            let _ = write!(fig2b, ",{}_mean_max", m.mode);
        }
        fig2b.push('\n');
        for i in 0..self.budget {
            let _ = write!(fig2b, "{}", i + 1);
            for m in &self.modes {
                let _ = write!(fig2b, ",{}", m.mean_trace[i]);
            }
            fig2b.push('\n');
        }
        vec![
            ("fig2a.csv", fig2a),
            ("fig2b.csv", fig2b),
            ("fig2cd_hist.csv", hist),
            ("fig3b_raw.csv", fig3b),
            ("summary.csv", summary),
        ]
    }

    pub fn write_tables(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        self.tables()
            .into_iter()
            .map(|(name, text)| {
                let path = dir.join(name);
                std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
                Ok(path)
            })
            .collect()
    }
}

/// Reads rounds `0..rounds` of `mode` from run files in `dir`; every
/// absent round is named in the error.
pub fn load_runs(dir: &Path, mode: Mode, rounds: usize) -> Result<Vec<OptimizationRun>> {
    let paths: Vec<PathBuf> = (0..rounds).map(|r| dir.join(run_file_name(mode, r))).collect();
    let missing: Vec<usize> = (0..rounds).filter(|&r| !paths[r].exists()).collect();
    if !missing.is_empty() {
        return Err(PipelineError::MissingRuns {
            mode,
            rounds: missing,
            dir: dir.display().to_string(),
        }
        .into());
    }
    paths
        .iter()
        .map(|path| {
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            Ok(load_run(&text)?)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::StructureVector;
    use crate::gp::EvalKind;
    use crate::pipeline::RunEvaluation;
    use crate::spectra::FomReport;

    fn run(mode: Mode, round: usize, budget: usize, foms: &[f64]) -> OptimizationRun {
        let evaluations = foms
            .iter()
            .enumerate()
            .map(|(i, &f)| RunEvaluation {
                iter: i,
                kind: EvalKind::New,
                point: vec![i as f64],
                structure: Some(StructureVector::from_mask(i as u64, 4)),
                report: Some(FomReport {
                    in_band: f,
                    below_band: 0.0,
                    above_band: 0.0,
                    peak_count: 0,
                    penalty: 0.0,
                    total: f,
                }),
            })
            .collect();
        OptimizationRun {
            mode,
            round,
            seed: round as u64,
            budget,
            evaluations,
        }
    }

    #[test]
    fn single_run_means_equal_the_run() {
        let s = compare(&[run(Mode::Hybrid, 0, 3, &[0.1, 0.3, 0.2])]).unwrap();
        let m = s.mode(Mode::Hybrid).unwrap();
        assert_eq!(m.mean_trace, vec![0.1, 0.3, 0.3]);
        assert_eq!(m.round_max(), vec![0.3]);
    }

    #[test]
    fn means_histograms_and_padding() {
        let runs = [
            run(Mode::Direct, 1, 3, &[0.0, 0.5]),
            run(Mode::Direct, 0, 3, &[0.25, 0.125, 0.75]),
            run(Mode::Hybrid, 0, 3, &[0.52, 0.53, 0.01]),
        ];
        let s = compare(&runs).unwrap();
        assert_eq!(s.modes[0].mode, Mode::Hybrid);
        let d = s.mode(Mode::Direct).unwrap();
        assert_eq!(d.rounds[0].round, 0);
        assert_eq!(d.traces[1], vec![0.0, 0.5, 0.5]);
        assert_eq!(d.mean_trace, vec![0.125, 0.375, 0.625]);
        assert_eq!(s.first_bin, 0);
        assert_eq!(d.histogram.iter().sum::<usize>(), 5);
        assert_eq!(d.fraction_below(0.3), 0.6);
        let h = s.mode(Mode::Hybrid).unwrap();
        assert_eq!(h.histogram[10], 2);
        let tables = s.tables();
        assert_eq!(tables[1].1.lines().nth(3), Some("3,0.53,0.625"));
        assert!(tables[2].1.contains("hybrid,0.5,0.55,2,"));
    }

    #[test]
    fn misaligned_budgets_are_rejected() {
        let runs = [run(Mode::Hybrid, 0, 3, &[0.1]), run(Mode::Direct, 0, 4, &[0.1])];
        assert!(matches!(compare(&runs), Err(Error::Pipeline(PipelineError::Alignment(_)))));
        assert!(compare(&[]).is_err());
        let dup = [run(Mode::Hybrid, 0, 3, &[0.1]), run(Mode::Hybrid, 0, 3, &[0.2])];
        assert!(compare(&dup).is_err());
    }

    #[test]
    fn missing_round_files_are_reported() {
        let dir = tempfile::tempdir().unwrap();
        let err = load_runs(dir.path(), Mode::Hybrid, 2).unwrap_err();
        match err {
            Error::Pipeline(PipelineError::MissingRuns { rounds, .. }) => assert_eq!(rounds, vec![0, 1]),
            other => panic!("unexpected {other}"),
        }
    }
}
