//! Training records and their on-disk form.
//!
//! `dataset.csv` holds one record per line,
//! `id,provenance,values,fom`, where `values` is semicolon-separated and
//! `provenance` is `seed` or `aug:<seed id>`. Seed records are binary;
//! augmented records are relaxed. Spectra live beside it in
//! `spectra/<id>.csv`.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{CodecError, RelaxedVector, StructureVector};
use crate::spectra::Spectrum;

pub const DATASET_FILE: &str = "dataset.csv";
pub const SPECTRA_DIR: &str = "spectra";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Seed,
    Augmented { seed_id: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Design {
    Binary(StructureVector),
    Relaxed(RelaxedVector),
}

impl Design {
    pub fn len(&self) -> usize {
        match self {
            Design::Binary(s) => s.len(),
            Design::Relaxed(r) => r.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Values as reals, binary designs lifted to `{0, 1}`.
    pub fn to_values(&self) -> Vec<f64> {
        match self {
            Design::Binary(s) => s.lift().values().to_vec(),
            Design::Relaxed(r) => r.values().to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub id: usize,
    pub provenance: Provenance,
    pub design: Design,
    pub fom: Option<f64>,
    pub spectrum: Option<Spectrum>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Dataset {
    pub records: Vec<Record>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, id: usize) -> Option<&Record> {
        self.records.iter().find(|r| r.id == id)
    }

    /// Binary seed structures in record order.
    pub fn seed_structures(&self) -> Vec<StructureVector> {
        self.records
            .iter()
            .filter_map(|r| match (&r.provenance, &r.design) {
                (Provenance::Seed, Design::Binary(s)) => Some(s.clone()),
                _ => None,
            })
            .collect()
    }

    /// Smallest recorded figure of merit among seed records.
    pub fn min_seed_fom(&self) -> Option<f64> {
        self.records
            .iter()
            .filter(|r| r.provenance == Provenance::Seed)
            .filter_map(|r| r.fom)
            .reduce(f64::min)
    }

    /// Appends `other`, which must use disjoint ids.
    pub fn extend(&mut self, other: Dataset) {
        self.records.extend(other.records);
    }

    /// Checks the record invariants: unique ids, augmented records pointing
    /// at an existing seed, a figure of merit wherever a spectrum is present
    /// and a common design length.
    pub fn validate(&self) -> Result<(), CodecError> {
        let mut ids: Vec<usize> = self.records.iter().map(|r| r.id).collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(CodecError::Dataset("duplicate record id".into()));
        }
        let len = self.records.first().map(|r| r.design.len());
        let seeds: HashMap<usize, Provenance> = self.records.iter().map(|r| (r.id, r.provenance)).collect();
        for r in &self.records {
            if Some(r.design.len()) != len {
                return Err(CodecError::Dataset(format!("record {} has a different design length", r.id)));
            }
            if r.spectrum.is_some() && r.fom.is_none() {
                return Err(CodecError::Dataset(format!("record {} has a spectrum but no fom", r.id)));
            }
            match (r.provenance, &r.design) {
                (Provenance::Seed, Design::Relaxed(_)) => {
                    return Err(CodecError::Dataset(format!("seed record {} must be binary", r.id)))
                }
                (Provenance::Augmented { seed_id }, _) => {
                    if seeds.get(&seed_id) != Some(&Provenance::Seed) {
                        return Err(CodecError::Dataset(format!(
                            "record {} references missing seed {seed_id}",
                            r.id
                        )));
                    }
                }
                _ => {}
            }
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("# id,provenance,values,fom\n");
        for r in &self.records {
            let prov = match r.provenance {
                Provenance::Seed => "seed".to_string(),
                Provenance::Augmented { seed_id } => format!("aug:{seed_id}"),
            };
            let values = match &r.design {
                Design::Binary(s) => s.bits().iter().map(|b| b.to_string()).collect::<Vec<_>>().join(";"),
                Design::Relaxed(v) => v.values().iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";"),
            };
            let fom = r.fom.map(|f| f.to_string()).unwrap_or_default();
            let _ = writeln!(out, "{},{prov},{values},{fom}", r.id);
        }
        out
    }

    /// Parses `dataset.csv` content; spectra are left empty.
    pub fn parse_csv(text: &str) -> Result<Self, CodecError> {
        let mut records = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |what: &str| CodecError::Parse(format!("dataset line {}: {what}", i + 1));
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 4 {
                return Err(bad("expected 4 comma-separated fields"));
            }
            let id: usize = fields[0].parse().map_err(|_| bad("bad id"))?;
            let provenance = match fields[1] {
                "seed" => Provenance::Seed,
                p => match p.strip_prefix("aug:").and_then(|s| s.parse().ok()) {
                    Some(seed_id) => Provenance::Augmented { seed_id },
                    None => return Err(bad("bad provenance")),
                },
            };
            let design = match provenance {
                Provenance::Seed => {
                    let bits = fields[2]
                        .split(';')
                        .map(|b| match b {
                            "0" => Ok(0u8),
                            "1" => Ok(1u8),
                            _ => Err(bad("seed values must be 0 or 1")),
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    Design::Binary(StructureVector::new(bits)?)
                }
                Provenance::Augmented { .. } => {
                    let values = fields[2]
                        .split(';')
                        .map(|v| v.parse::<f64>().map_err(|_| bad("bad value")))
                        .collect::<Result<Vec<_>, _>>()?;
                    Design::Relaxed(RelaxedVector::new(values)?)
                }
            };
            let fom = if fields[3].is_empty() {
                None
            } else {
                Some(fields[3].parse().map_err(|_| bad("bad fom"))?)
            };
            records.push(Record {
                id,
                provenance,
                design,
                fom,
                spectrum: None,
            });
        }
        Ok(Self { records })
    }

    /// Writes `dataset.csv` and one spectrum file per record that has one.
    pub fn save(&self, dir: impl AsRef<Path>) -> Result<(), CodecError> {
        let dir = dir.as_ref();
        let io = |e: std::io::Error| CodecError::Io(format!("{}: {e}", dir.display()));
        fs::create_dir_all(dir).map_err(io)?;
        fs::write(dir.join(DATASET_FILE), self.to_csv()).map_err(io)?;
        if self.records.iter().any(|r| r.spectrum.is_some()) {
            let sdir = dir.join(SPECTRA_DIR);
            fs::create_dir_all(&sdir).map_err(io)?;
            for r in &self.records {
                if let Some(s) = &r.spectrum {
                    fs::write(sdir.join(format!("{}.csv", r.id)), s.to_text()).map_err(io)?;
                }
            }
        }
        Ok(())
    }

    pub fn load(dir: impl AsRef<Path>) -> Result<Self, CodecError> {
        let dir = dir.as_ref();
        let path = dir.join(DATASET_FILE);
        let text = fs::read_to_string(&path).map_err(|e| CodecError::Io(format!("{}: {e}", path.display())))?;
        let mut ds = Self::parse_csv(&text)?;
        let sdir = dir.join(SPECTRA_DIR);
        for r in &mut ds.records {
            let p = sdir.join(format!("{}.csv", r.id));
            if p.exists() {
                let text = fs::read_to_string(&p).map_err(|e| CodecError::Io(format!("{}: {e}", p.display())))?;
                r.spectrum = Some(Spectrum::parse(&text).map_err(|e| CodecError::Parse(e.to_string()))?);
            }
        }
        ds.validate()?;
        Ok(ds)
    }
}
