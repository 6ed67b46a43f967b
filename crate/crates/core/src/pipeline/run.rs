//! Optimization runs and their checkpoint files.
//!
//! A run file starts with `#` header lines: a format line, then
//! `key=value` pairs describing the configuration. A CSV header follows,
//! then one line per proposal:
//! `iter,kind,point,bits,in_band,below_band,above_band,peak_count,penalty,total`
//! with `point` semicolon-separated. Failed proposals leave the structure
//! and report fields empty.

use std::fmt::Write as _;

use super::{Mode, PipelineError};
use crate::codec::StructureVector;
use crate::gp::EvalKind;
use crate::spectra::FomReport;

pub const RUN_FORMAT_LINE: &str = "# emitter optimization run v1";
pub const RUN_CSV_HEADER: &str = "iter,kind,point,bits,in_band,below_band,above_band,peak_count,penalty,total";

#[derive(Debug, Clone, PartialEq)]
pub struct RunEvaluation {
    pub iter: usize,
    pub kind: EvalKind,
    /// Latent point (hybrid) or relaxed design (direct).
    pub point: Vec<f64>,
    pub structure: Option<StructureVector>,
    pub report: Option<FomReport>,
}

impl RunEvaluation {
    pub fn fom(&self) -> Option<f64> {
        self.report.map(|r| r.total)
    }

    pub fn to_line(&self) -> String {
        let kind = match self.kind {
            EvalKind::New => "new",
            EvalKind::Cached => "cached",
            EvalKind::Failed => "failed",
        };
        let point = self.point.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(";");
        let bits = self.structure.as_ref().map(|s| s.to_string()).unwrap_or_default();
        let report = self.report.map(|r| r.to_csv_row()).unwrap_or_else(|| ",,,,,".to_string());
        format!("{},{kind},{point},{bits},{report}", self.iter)
    }

    pub fn parse_line(line: &str) -> Result<Self, PipelineError> {
        let bad = |m: &str| PipelineError::Parse(format!("run record `{line}`: {m}"));
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 10 {
            return Err(bad("expected 10 fields"));
        }
        let iter = f[0].parse().map_err(|_| bad("bad iter"))?;
        let kind = match f[1] {
            "new" => EvalKind::New,
            "cached" => EvalKind::Cached,
            "failed" => EvalKind::Failed,
            _ => return Err(bad("bad kind")),
        };
        let point = f[2]
            .split(';')
            .map(|v| v.parse::<f64>().map_err(|_| bad("bad point")))
            .collect::<Result<Vec<_>, _>>()?;
        let structure = if f[3].is_empty() {
            None
        } else {
            Some(StructureVector::parse(f[3]).map_err(|_| bad("bad bits"))?)
        };
        let report_text = f[4..].join(",");
        let report = if f[4..].iter().all(|s| s.is_empty()) {
            None
        } else {
            Some(FomReport::parse_csv_row(&report_text).ok_or_else(|| bad("bad report"))?)
        };
        if (kind == EvalKind::Failed) != report.is_none() || structure.is_none() != report.is_none() {
            return Err(bad("kind inconsistent with fields"));
        }
        Ok(Self {
            iter,
            kind,
            point,
            structure,
            report,
        })
    }
}

/// A finished (or partially replayed) optimization round.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationRun {
    pub mode: Mode,
    pub round: usize,
    pub seed: u64,
    /// Configured number of new evaluations.
    pub budget: usize,
    pub evaluations: Vec<RunEvaluation>,
}

impl OptimizationRun {
    pub fn unique_count(&self) -> usize {
        self.evaluations.iter().filter(|e| e.kind == EvalKind::New).count()
    }

    pub fn proposals(&self) -> usize {
        self.evaluations.len()
    }

    pub fn best(&self) -> Option<&RunEvaluation> {
        self.evaluations
            .iter()
            .filter(|e| e.report.is_some())
            .fold(None, |acc: Option<&RunEvaluation>, e| match acc {
                Some(b) if b.fom() >= e.fom() => Some(b),
                _ => Some(e),
            })
    }

    pub fn best_fom(&self) -> Option<f64> {
        self.best().and_then(|e| e.fom())
    }

    pub fn best_structure(&self) -> Option<&StructureVector> {
        self.best().and_then(|e| e.structure.as_ref())
    }

    /// Running maximum after each new (solver-evaluated) structure.
    pub fn best_so_far_by_unique(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.unique_count());
        let mut best = f64::NEG_INFINITY;
        for e in self.evaluations.iter().filter(|e| e.kind == EvalKind::New) {
            best = best.max(e.fom().expect("new evaluations carry a report"));
            out.push(best);
        }
        out
    }

    /// Figures of merit of the distinct evaluated structures, in order.
    pub fn unique_foms(&self) -> Vec<f64> {
        self.evaluations
            .iter()
            .filter(|e| e.kind == EvalKind::New)
            .filter_map(|e| e.fom())
            .collect()
    }

    pub fn records_csv(&self) -> String {
        let mut out = String::new();
        for e in &self.evaluations {
            let _ = writeln!(out, "{}", e.to_line());
        }
        out
    }
}

/// Header of a run file as `key=value` pairs, in order.
pub fn header_text(entries: &[(String, String)]) -> String {
    let mut out = String::from(RUN_FORMAT_LINE);
    out.push('\n');
    for (k, v) in entries {
        let _ = writeln!(out, "# {k}={v}");
    }
    out.push_str(RUN_CSV_HEADER);
    out.push('\n');
    out
}

/// Parsed run file: header entries and complete records. A trailing line
/// without a newline (an interrupted write) is dropped.
pub fn parse_run_file(text: &str) -> Result<(Vec<(String, String)>, Vec<RunEvaluation>), PipelineError> {
    let complete = match text.rfind('\n') {
        Some(i) => &text[..=i],
        None => "",
    };
    let mut lines = complete.lines();
    if lines.next() != Some(RUN_FORMAT_LINE) {
        return Err(PipelineError::Parse("not a run file (format line missing)".into()));
    }
    let mut header = Vec::new();
    let mut records = Vec::new();
    let mut in_body = false;
    for line in lines {
        if !in_body {
            if let Some(kv) = line.strip_prefix("# ") {
                let (k, v) = kv
                    .split_once('=')
                    .ok_or_else(|| PipelineError::Parse(format!("bad header line `{line}`")))?;
                header.push((k.to_string(), v.to_string()));
                continue;
            }
            if line != RUN_CSV_HEADER {
                return Err(PipelineError::Parse(format!("unexpected line `{line}` before records")));
            }
            in_body = true;
            continue;
        }
        let e = RunEvaluation::parse_line(line)?;
        if e.iter != records.len() {
            return Err(PipelineError::Parse(format!("record {} out of sequence", e.iter)));
        }
        records.push(e);
    }
    Ok((header, records))
}

pub fn header_value<'a>(header: &'a [(String, String)], key: &str) -> Option<&'a str> {
    header.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
}

/// Reads a run file into an [`OptimizationRun`].
pub fn load_run(text: &str) -> Result<OptimizationRun, PipelineError> {
    let (header, evaluations) = parse_run_file(text)?;
    fn field<T: std::str::FromStr>(header: &[(String, String)], key: &str) -> Result<T, PipelineError> {
        header_value(header, key)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| PipelineError::Parse(format!("run header lacks a valid `{key}`")))
    }
    Ok(OptimizationRun {
        mode: field(&header, "mode")?,
        round: field(&header, "round")?,
        seed: field(&header, "seed")?,
        budget: field(&header, "bo.eval_budget")?,
        evaluations,
    })
}
