//! Imprecise dataset CSV files and their sidecar manifests.
//!
//! The header lists variable names in network declaration order. Each cell
//! holds one state label, or several labels joined by `|` for an imprecise
//! observation. The writer lists labels in domain order; the reader accepts
//! any order but rejects unknown, duplicate and empty labels.

use std::fs;
use std::path::{Path, PathBuf};

use pnet_core::dataset::DatasetMetadata;
use pnet_core::domain::{Event, StateDomain};
use pnet_core::sampler::SamplingMode;
use pnet_core::{ImpreciseDataset, ImpreciseObservation, TOLERANCE};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network_file::SET_SEPARATOR;

/// Encodes one cell as `|`-joined labels in domain order.
pub fn encode_cell(domain: &StateDomain, cell: Event) -> String {
    let mut out = String::new();
    for (i, s) in cell.iter().enumerate() {
        if i > 0 {
            out.push(SET_SEPARATOR);
        }
        out.push_str(domain.label(s));
    }
    out
}

/// Decodes one cell; the error string names the offending label.
pub fn decode_cell(domain: &StateDomain, text: &str) -> std::result::Result<Event, String> {
    if text.is_empty() {
        return Err("empty cell".into());
    }
    let mut cell = Event::empty(domain.cardinality());
    for label in text.split(SET_SEPARATOR) {
        if label.is_empty() {
            return Err(format!("empty label in {text:?}"));
        }
        let k = domain
            .index_of(label)
            .ok_or_else(|| format!("unknown label {label:?} for {}", domain.name()))?;
        if cell.contains(k) {
            return Err(format!("duplicate label {label:?}"));
        }
        cell = cell.with(k);
    }
    Ok(cell)
}

pub fn dataset_to_string(data: &ImpreciseDataset) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let schema = data.schema();
    w.write_record(schema.iter().map(StateDomain::name)).expect("in-memory write");
    for r in data.records() {
        w.write_record(schema.iter().zip(r.cells()).map(|(d, &c)| encode_cell(d, c)))
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("labels are UTF-8")
}

pub fn write_dataset(path: &Path, data: &ImpreciseDataset) -> Result<()> {
    fs::write(path, dataset_to_string(data)).map_err(|e| Error::write(path, e))
}

/// Parses CSV text against `schema`.
pub fn parse_dataset_str(text: &str, file: &str, schema: &[StateDomain]) -> Result<ImpreciseDataset> {
    let header_err = |reason: String| Error::DatasetHeader { file: file.to_string(), reason };
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| header_err(e.to_string()))?.clone();
    if header.is_empty() && !schema.is_empty() {
        return Err(header_err("missing header".into()));
    }
    let names: Vec<&str> = schema.iter().map(StateDomain::name).collect();
    if header.iter().collect::<Vec<_>>() != names {
        return Err(header_err(format!(
            "header {:?} does not match variables {:?}",
            header.iter().collect::<Vec<_>>(),
            names
        )));
    }
    let mut data = ImpreciseDataset::new(schema.to_vec());
    for (i, row) in reader.records().enumerate() {
        let record = i + 1;
        let row = row.map_err(|e| Error::Dataset {
            file: file.to_string(),
            record,
            column: "*".into(),
            reason: e.to_string(),
        })?;
        let mut cells = Vec::with_capacity(schema.len());
        for (dom, text) in schema.iter().zip(row.iter()) {
            let cell = decode_cell(dom, text).map_err(|reason| Error::Dataset {
                file: file.to_string(),
                record,
                column: dom.name().to_string(),
                reason,
            })?;
            cells.push(cell);
        }
        data.push(ImpreciseObservation::new(cells))?;
    }
    Ok(data)
}

pub fn parse_dataset(path: &Path, schema: &[StateDomain]) -> Result<ImpreciseDataset> {
    let text = fs::read_to_string(path).map_err(|e| Error::read(path, e))?;
    parse_dataset_str(&text, &path.display().to_string(), schema)
}

/// Generation metadata written next to a sampled dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub mode: String,
    pub n: usize,
    pub seed: u64,
    pub theta_imp: f64,
    /// Absolute tolerance used for normalization checks.
    pub tolerance: f64,
}

impl Manifest {
    pub fn new(mode: SamplingMode, n: usize, seed: u64, theta_imp: f64) -> Self {
        Self { mode: mode.as_str().into(), n, seed, theta_imp, tolerance: TOLERANCE }
    }

    pub fn from_metadata(meta: &DatasetMetadata, n: usize) -> Option<Self> {
        Some(Self::new(meta.mode?, n, meta.seed?, meta.theta_imp?))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }
}

/// `data.csv` → `data.csv.manifest.json`.
pub fn manifest_path(dataset: &Path) -> PathBuf {
    let mut name = dataset.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

pub fn write_manifest(dataset: &Path, manifest: &Manifest) -> Result<()> {
    let path = manifest_path(dataset);
    fs::write(&path, manifest.to_json()).map_err(|e| Error::write(&path, e))
}

pub fn read_manifest(dataset: &Path) -> Result<Manifest> {
    let path = manifest_path(dataset);
    let text = fs::read_to_string(&path).map_err(|e| Error::read(&path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::DatasetHeader {
        file: path.display().to_string(),
        reason: e.to_string(),
    })
}
