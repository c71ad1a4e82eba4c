//! Imprecise (set-valued) datasets.

use alloc::format;
use alloc::vec::Vec;

use crate::domain::{Event, StateDomain};
use crate::error::{Error, Result};
use crate::network::NetworkStructure;
use crate::sampler::SamplingMode;

/// One record: a nonempty subset of each variable's domain.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ImpreciseObservation {
    cells: Vec<Event>,
}

impl ImpreciseObservation {
    pub fn new(cells: Vec<Event>) -> Self {
        Self { cells }
    }

    pub fn cells(&self) -> &[Event] {
        &self.cells
    }

    pub fn cell(&self, variable: usize) -> Event {
        self.cells[variable]
    }

    pub fn is_precise(&self) -> bool {
        self.cells.iter().all(|c| c.len() == 1)
    }
}

/// How a dataset was generated, when it came from the sampler.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DatasetMetadata {
    pub seed: Option<u64>,
    pub theta_imp: Option<f64>,
    pub mode: Option<SamplingMode>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImpreciseDataset {
    schema: Vec<StateDomain>,
    records: Vec<ImpreciseObservation>,
    metadata: DatasetMetadata,
}

impl ImpreciseDataset {
    pub fn new(schema: Vec<StateDomain>) -> Self {
        Self { schema, records: Vec::new(), metadata: DatasetMetadata::default() }
    }

    pub fn from_records(schema: Vec<StateDomain>, records: Vec<ImpreciseObservation>) -> Result<Self> {
        let mut data = Self::new(schema);
        data.records.reserve(records.len());
        for r in records {
            data.push(r)?;
        }
        Ok(data)
    }

    pub fn with_metadata(mut self, metadata: DatasetMetadata) -> Self {
        self.metadata = metadata;
        self
    }

    /// Appends a record after checking it against the schema.
    pub fn push(&mut self, record: ImpreciseObservation) -> Result<()> {
        if record.cells.len() != self.schema.len() {
            return Err(Error::Schema(format!(
                "record {} has {} cells, schema has {} variables",
                self.records.len(),
                record.cells.len(),
                self.schema.len()
            )));
        }
        for (cell, dom) in record.cells.iter().zip(&self.schema) {
            if cell.cardinality() != dom.cardinality() {
                return Err(Error::Schema(format!(
                    "record {}: cell of {} spans {} states, domain has {}",
                    self.records.len(),
                    dom.name(),
                    cell.cardinality(),
                    dom.cardinality()
                )));
            }
            if cell.is_empty() {
                return Err(Error::Schema(format!(
                    "record {}: empty cell for {}",
                    self.records.len(),
                    dom.name()
                )));
            }
        }
        self.records.push(record);
        Ok(())
    }

    pub fn schema(&self) -> &[StateDomain] {
        &self.schema
    }

    pub fn records(&self) -> &[ImpreciseObservation] {
        &self.records
    }

    pub fn metadata(&self) -> &DatasetMetadata {
        &self.metadata
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn is_precise(&self) -> bool {
        self.records.iter().all(ImpreciseObservation::is_precise)
    }

    /// Splits off the records from `at` onwards; both halves keep the schema
    /// and metadata.
    pub fn split_at(&self, at: usize) -> (Self, Self) {
        let at = at.min(self.records.len());
        let head = Self {
            schema: self.schema.clone(),
            records: self.records[..at].to_vec(),
            metadata: self.metadata,
        };
        let tail = Self {
            schema: self.schema.clone(),
            records: self.records[at..].to_vec(),
            metadata: self.metadata,
        };
        (head, tail)
    }

    /// Mean number of states per cell of `variable`, `None` when empty.
    pub fn mean_cell_cardinality(&self, variable: usize) -> Option<f64> {
        if self.records.is_empty() {
            return None;
        }
        let total: usize = self.records.iter().map(|r| r.cells[variable].len()).sum();
        Some(total as f64 / self.records.len() as f64)
    }

    /// Checks that the dataset's variables are exactly those of `structure`,
    /// in the same order and with the same state labels.
    pub fn check_schema(&self, structure: &NetworkStructure) -> Result<()> {
        if self.schema.len() != structure.len() {
            return Err(Error::Schema(format!(
                "dataset has {} variables, structure has {}",
                self.schema.len(),
                structure.len()
            )));
        }
        for (d, s) in self.schema.iter().zip(structure.variables()) {
            if d != s {
                return Err(Error::Schema(format!(
                    "dataset variable {} does not match structure variable {}",
                    d.name(),
                    s.name()
                )));
            }
        }
        Ok(())
    }
}
