//! Exhaustive enumeration of short designs.

use std::fmt::Write as _;

use super::PipelineError;
use crate::codec::StructureVector;
use crate::scoring::Scorer;
use crate::spectra::FomReport;
use crate::Result;

pub const MAX_BRUTE_FORCE_LAYERS: usize = 20;

/// Reports of every design of a given length, indexed by
/// [`StructureVector::mask`] (bit 0 is layer 0).
#[derive(Debug, Clone, PartialEq)]
pub struct ExhaustiveTable {
    layers: usize,
    reports: Vec<FomReport>,
}

impl ExhaustiveTable {
    pub fn layers(&self) -> usize {
        self.layers
    }

    pub fn len(&self) -> usize {
        self.reports.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reports.is_empty()
    }

    pub fn reports(&self) -> &[FomReport] {
        &self.reports
    }

    pub fn get(&self, structure: &StructureVector) -> Option<&FomReport> {
        if structure.len() != self.layers {
            return None;
        }
        self.reports.get(structure.mask() as usize)
    }

    /// Global optimum; the lowest mask wins ties.
    pub fn best(&self) -> (StructureVector, FomReport) {
        let (mask, report) = self
            .reports
            .iter()
            .enumerate()
            .fold((0, self.reports[0]), |acc, (i, r)| if r.total > acc.1.total { (i, *r) } else { acc });
        (StructureVector::from_mask(mask as u64, self.layers), report)
    }

    /// Smallest total among the best `ceil(fraction · len)` designs.
    pub fn top_fraction_threshold(&self, fraction: f64) -> f64 {
        let mut totals: Vec<f64> = self.reports.iter().map(|r| r.total).collect();
        totals.sort_by(|a, b| b.total_cmp(a));
        let k = ((fraction * totals.len() as f64).ceil() as usize).clamp(1, totals.len());
        totals[k - 1]
    }

    /// Number of designs scoring strictly better than `total`.
    pub fn rank_of(&self, total: f64) -> usize {
        self.reports.iter().filter(|r| r.total > total).count()
    }

    /// `mask,bits,<report columns>`.
    pub fn to_csv(&self) -> String {
        let mut out = format!("mask,bits,{}\n", FomReport::CSV_HEADER);
        for (mask, r) in self.reports.iter().enumerate() {
            let s = StructureVector::from_mask(mask as u64, self.layers);
            let _ = writeln!(out, "{mask},{s},{}", r.to_csv_row());
        }
        out
    }
}

/// Scores all `2^layers` designs, split over `threads` workers.
pub fn brute_force(scorer: &Scorer, layers: usize, threads: usize) -> Result<ExhaustiveTable> {
    if layers == 0 || layers > MAX_BRUTE_FORCE_LAYERS {
        return Err(PipelineError::Config(format!(
            "brute force needs 1..={MAX_BRUTE_FORCE_LAYERS} layers, got {layers}"
        ))
        .into());
    }
    let count = 1usize << layers;
    let threads = threads.clamp(1, count);
    let chunk = count.div_ceil(threads);
    let mut reports = Vec::with_capacity(count);
    std::thread::scope(|s| {
        let handles: Vec<_> = (0..threads)
            .map(|t| {
                s.spawn(move || {
                    (t * chunk..((t + 1) * chunk).min(count))
                        .map(|m| scorer.fom(&StructureVector::from_mask(m as u64, layers)))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            reports.extend(h.join().expect("enumeration thread panicked"));
        }
    });
    Ok(ExhaustiveTable { layers, reports })
}
