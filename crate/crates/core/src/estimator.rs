//! Parameter learning from imprecise data.
//!
//! Two counting schemes are supported. *Possibilistic* counting increments
//! `N_ijk` for every state `x_k` contained in the record's cell for `X_i`
//! (so one imprecise record touches several states). *Random-set* counting
//! increments the entry of the cell itself, keyed by exact set equality.
//! In both schemes a record matches every parent configuration `j` whose
//! parent states all belong to the record's parent cells.
//!
//! On top of the counts:
//!
//! - [`histogram_estimate`]: `N_ijk / N_ij`, a sub-normalized distribution;
//! - [`random_set_mle`]: `m_ijk = N_ijk / Σ_k N_ijk`, maximizing
//!   `Σ N_ijk log m_ijk`;
//! - [`possibilistic_mle`]: `π_ijk = N_ijk / Σ_k N_ijk · S_i`, the maximizer
//!   of `Σ N_ijk log π_ijk` under `Σ_k π_ijk = S_i`, then divided by its
//!   maximum. A cell with no counts at all is smoothed by setting every
//!   count to 1.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::dataset::{ImpreciseDataset, ImpreciseObservation};
use crate::distribution::{PossibilityDistribution, Semantics};
use crate::domain::Event;
use crate::error::{Error, Result};
use crate::mass::MassFunction;
use crate::network::{Assignments, NetworkStructure, PossibilisticNetwork};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountMode {
    Possibilistic,
    RandomSet,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CellCounts {
    /// One count per state (membership counting).
    States(Vec<u64>),
    /// One count per observed subset (exact-match counting).
    FocalSets(BTreeMap<Event, u64>),
}

/// Counts of one `(variable, parent configuration)` cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountCell {
    matched: u64,
    counts: CellCounts,
}

impl CountCell {
    pub fn states(matched: u64, counts: Vec<u64>) -> Self {
        Self { matched, counts: CellCounts::States(counts) }
    }

    pub fn focal_sets(matched: u64, counts: BTreeMap<Event, u64>) -> Self {
        Self { matched, counts: CellCounts::FocalSets(counts) }
    }

    /// Number of records matching the parent configuration (`N_ij`).
    pub fn matched(&self) -> u64 {
        self.matched
    }

    pub fn counts(&self) -> &CellCounts {
        &self.counts
    }

    pub fn state_counts(&self) -> Option<&[u64]> {
        match &self.counts {
            CellCounts::States(c) => Some(c),
            CellCounts::FocalSets(_) => None,
        }
    }

    pub fn focal_counts(&self) -> Option<&BTreeMap<Event, u64>> {
        match &self.counts {
            CellCounts::FocalSets(c) => Some(c),
            CellCounts::States(_) => None,
        }
    }

    /// `Σ_k N_ijk`.
    pub fn total(&self) -> u64 {
        match &self.counts {
            CellCounts::States(c) => c.iter().sum(),
            CellCounts::FocalSets(c) => c.values().sum(),
        }
    }
}

/// `N_ijk` for every variable `i`, parent configuration `j` and key `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountTensor {
    mode: CountMode,
    cells: Vec<Vec<CountCell>>,
}

impl CountTensor {
    /// All-zero counts shaped after `structure`.
    pub fn empty(structure: &NetworkStructure, mode: CountMode) -> Self {
        let cells = (0..structure.len())
            .map(|v| {
                let card = structure.variable(v).cardinality();
                (0..structure.config_count(v))
                    .map(|_| match mode {
                        CountMode::Possibilistic => CountCell::states(0, vec![0; card]),
                        CountMode::RandomSet => CountCell::focal_sets(0, BTreeMap::new()),
                    })
                    .collect()
            })
            .collect();
        Self { mode, cells }
    }

    /// Assembles a tensor from explicit cells; every cell must match `mode`.
    pub fn from_cells(mode: CountMode, cells: Vec<Vec<CountCell>>) -> Result<Self> {
        let ok = cells.iter().flatten().all(|c| {
            matches!(
                (mode, &c.counts),
                (CountMode::Possibilistic, CellCounts::States(_))
                    | (CountMode::RandomSet, CellCounts::FocalSets(_))
            )
        });
        if !ok {
            return Err(Error::InvalidConfig("count cells do not match the counting mode".into()));
        }
        Ok(Self { mode, cells })
    }

    pub fn mode(&self) -> CountMode {
        self.mode
    }

    pub fn variable_count(&self) -> usize {
        self.cells.len()
    }

    /// Cells of variable `i`, one per parent configuration.
    pub fn variable(&self, i: usize) -> &[CountCell] {
        &self.cells[i]
    }

    pub fn cell(&self, i: usize, j: usize) -> &CountCell {
        &self.cells[i][j]
    }

    /// Adds one record. The record must conform to `structure`.
    pub fn add_record(&mut self, structure: &NetworkStructure, record: &ImpreciseObservation) {
        let mut config = Vec::new();
        for v in 0..structure.len() {
            let parents = structure.parents(v);
            let members: Vec<Vec<usize>> =
                parents.iter().map(|&p| record.cell(p).iter().collect()).collect();
            let child = record.cell(v);
            config.resize(parents.len(), 0);
            for pick in Assignments::new(members.iter().map(Vec::len).collect()) {
                for (k, &i) in pick.iter().enumerate() {
                    config[k] = members[k][i];
                }
                let cell = &mut self.cells[v][structure.config_index(v, &config)];
                cell.matched += 1;
                match &mut cell.counts {
                    CellCounts::States(c) => {
                        for s in child.iter() {
                            c[s] += 1;
                        }
                    }
                    CellCounts::FocalSets(c) => *c.entry(child).or_insert(0) += 1,
                }
            }
        }
    }

    /// Adds another tensor of the same shape and mode into this one.
    pub fn merge(&mut self, other: &Self) -> Result<()> {
        let same_shape = self.mode == other.mode
            && self.cells.len() == other.cells.len()
            && self.cells.iter().zip(&other.cells).all(|(a, b)| a.len() == b.len());
        if !same_shape {
            return Err(Error::InvalidConfig("cannot merge count tensors of different shapes".into()));
        }
        for (a, b) in self.cells.iter_mut().flatten().zip(other.cells.iter().flatten()) {
            a.matched += b.matched;
            match (&mut a.counts, &b.counts) {
                (CellCounts::States(x), CellCounts::States(y)) if x.len() == y.len() => {
                    for (x, y) in x.iter_mut().zip(y) {
                        *x += y;
                    }
                }
                (CellCounts::FocalSets(x), CellCounts::FocalSets(y)) => {
                    for (k, n) in y {
                        *x.entry(*k).or_insert(0) += n;
                    }
                }
                _ => return Err(Error::InvalidConfig("mismatched count cells".into())),
            }
        }
        Ok(())
    }
}

fn count(data: &ImpreciseDataset, structure: &NetworkStructure, mode: CountMode) -> Result<CountTensor> {
    data.check_schema(structure)?;
    let mut t = CountTensor::empty(structure, mode);
    for r in data.records() {
        t.add_record(structure, r);
    }
    Ok(t)
}

/// Membership counts: `N_ijk` = records whose cell for `X_i` contains `x_k`.
pub fn count_possibilistic(data: &ImpreciseDataset, structure: &NetworkStructure) -> Result<CountTensor> {
    count(data, structure, CountMode::Possibilistic)
}

/// Exact-set counts: `N_ijk` = records whose cell for `X_i` equals `A_k`.
pub fn count_random_set(data: &ImpreciseDataset, structure: &NetworkStructure) -> Result<CountTensor> {
    count(data, structure, CountMode::RandomSet)
}

fn require_mode(counts: &CountTensor, mode: CountMode) -> Result<()> {
    if counts.mode != mode {
        return Err(Error::InvalidConfig(format!(
            "expected {mode:?} counts, got {:?}",
            counts.mode
        )));
    }
    Ok(())
}

/// Sub-normalized histogram `N_ijk / N_ij`; `None` marks an unseen
/// configuration.
pub fn histogram_estimate(counts: &CountTensor) -> Result<Vec<Vec<Option<PossibilityDistribution>>>> {
    require_mode(counts, CountMode::Possibilistic)?;
    counts
        .cells
        .iter()
        .map(|var| {
            var.iter()
                .map(|cell| {
                    if cell.matched == 0 {
                        return Ok(None);
                    }
                    let n = cell.matched as f64;
                    let c = cell.state_counts().expect("mode checked");
                    PossibilityDistribution::new(c.iter().map(|&k| k as f64 / n).collect()).map(Some)
                })
                .collect()
        })
        .collect()
}

/// Closed-form random-set maximum likelihood; `None` marks an unseen cell.
pub fn random_set_mle(counts: &CountTensor) -> Result<Vec<Vec<Option<MassFunction>>>> {
    require_mode(counts, CountMode::RandomSet)?;
    counts
        .cells
        .iter()
        .map(|var| {
            var.iter()
                .map(|cell| {
                    let focal = cell.focal_counts().expect("mode checked");
                    let total: u64 = focal.values().sum();
                    if total == 0 {
                        return Ok(None);
                    }
                    let Some((first, _)) = focal.iter().next() else { return Ok(None) };
                    let card = first.cardinality();
                    let t = total as f64;
                    MassFunction::new(card, focal.iter().map(|(s, &n)| (*s, n as f64 / t))).map(Some)
                })
                .collect()
        })
        .collect()
}

fn term(n: u64, p: f64) -> f64 {
    if n == 0 {
        0.0
    } else if p <= 0.0 {
        f64::NEG_INFINITY
    } else {
        n as f64 * libm::log(p)
    }
}

/// `Σ N_ijk log m_ijk` over random-set counts. Unlisted focal sets have
/// mass 0, so observing one yields −∞.
pub fn random_set_loglik_counts(masses: &[Vec<MassFunction>], counts: &CountTensor) -> Result<f64> {
    require_mode(counts, CountMode::RandomSet)?;
    check_shape(masses.iter().map(Vec::len), counts)?;
    let mut ll = 0.0;
    for (var, ms) in counts.cells.iter().zip(masses) {
        for (cell, m) in var.iter().zip(ms) {
            for (set, &n) in cell.focal_counts().expect("mode checked") {
                ll += term(n, m.mass_of(set));
            }
        }
    }
    Ok(ll)
}

/// `Σ N_ijk log π_ijk` over membership counts. Rows may be any non-negative
/// degree vectors (raw maximizers are allowed to exceed 1).
pub fn possibilistic_loglik_counts<R: AsRef<[f64]>>(rows: &[Vec<R>], counts: &CountTensor) -> Result<f64> {
    require_mode(counts, CountMode::Possibilistic)?;
    check_shape(rows.iter().map(Vec::len), counts)?;
    let mut ll = 0.0;
    for (var, rs) in counts.cells.iter().zip(rows) {
        for (cell, row) in var.iter().zip(rs) {
            let c = cell.state_counts().expect("mode checked");
            let row = row.as_ref();
            if row.len() != c.len() {
                return Err(Error::DomainMismatch { expected: c.len(), found: row.len() });
            }
            for (&n, &p) in c.iter().zip(row) {
                ll += term(n, p);
            }
        }
    }
    Ok(ll)
}

fn check_shape(rows: impl ExactSizeIterator<Item = usize>, counts: &CountTensor) -> Result<()> {
    if rows.len() != counts.cells.len() {
        return Err(Error::Structure(format!(
            "{} parameter tables for {} variables",
            rows.len(),
            counts.cells.len()
        )));
    }
    for (i, (n, var)) in rows.zip(&counts.cells).enumerate() {
        if n != var.len() {
            return Err(Error::Structure(format!(
                "variable {i}: {n} parameter rows for {} configurations",
                var.len()
            )));
        }
    }
    Ok(())
}

/// Possibilistic log-likelihood of `data` under the tables of `net`.
pub fn possibilistic_loglik(net: &PossibilisticNetwork, data: &ImpreciseDataset) -> Result<f64> {
    let counts = count_possibilistic(data, net.structure())?;
    let rows: Vec<Vec<&PossibilityDistribution>> =
        net.tables().iter().map(|t| t.rows().iter().collect()).collect();
    possibilistic_loglik_counts(&rows, &counts)
}

impl AsRef<[f64]> for PossibilityDistribution {
    fn as_ref(&self) -> &[f64] {
        self.degrees()
    }
}

/// Per-variable row sums `S_i` for the constrained maximizer.
#[derive(Debug, Clone, PartialEq)]
pub struct ImprecisionBudget {
    values: Vec<f64>,
}

impl ImprecisionBudget {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(bad) = values.iter().find(|s| !(s.is_finite() && **s > 0.0)) {
            return Err(Error::InvalidConfig(format!("imprecision budget {bad} must be positive")));
        }
        Ok(Self { values })
    }

    /// `S_i = s` for every variable.
    pub fn uniform(variables: usize, s: f64) -> Result<Self> {
        Self::new(vec![s; variables])
    }

    /// `S_i = 1` for every variable.
    pub fn unit(variables: usize) -> Self {
        Self { values: vec![1.0; variables] }
    }

    /// `S_i` = mean observed cell cardinality of `X_i` (1 without records).
    pub fn mean_cardinality(data: &ImpreciseDataset) -> Self {
        let values = (0..data.schema().len())
            .map(|v| data.mean_cell_cardinality(v).unwrap_or(1.0))
            .collect();
        Self { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, variable: usize) -> f64 {
        self.values[variable]
    }
}

/// Raw maximizer `π_ijk = N_ijk / Σ_k N_ijk · S_i` with add-one smoothing of
/// empty cells. Rows sum to `S_i` and are not normalized.
pub fn possibilistic_mle_raw(counts: &CountTensor, budget: &ImprecisionBudget) -> Result<Vec<Vec<Vec<f64>>>> {
    require_mode(counts, CountMode::Possibilistic)?;
    if budget.values.len() != counts.cells.len() {
        return Err(Error::InvalidConfig(format!(
            "budget covers {} variables, counts cover {}",
            budget.values.len(),
            counts.cells.len()
        )));
    }
    Ok(counts
        .cells
        .iter()
        .zip(&budget.values)
        .map(|(var, &s)| {
            var.iter()
                .map(|cell| {
                    let c = cell.state_counts().expect("mode checked");
                    let total: u64 = c.iter().sum();
                    if total == 0 {
                        vec![s / c.len() as f64; c.len()]
                    } else {
                        c.iter().map(|&n| n as f64 / total as f64 * s).collect()
                    }
                })
                .collect()
        })
        .collect())
}

/// Maximum possibilistic likelihood estimate, max-normalized per row.
pub fn possibilistic_mle(counts: &CountTensor, budget: &ImprecisionBudget) -> Result<Vec<Vec<PossibilityDistribution>>> {
    possibilistic_mle_raw(counts, budget)?
        .into_iter()
        .map(|var| var.into_iter().map(normalize_raw).collect())
        .collect()
}

fn normalize_raw(row: Vec<f64>) -> Result<PossibilityDistribution> {
    let max = row.iter().copied().fold(0.0, f64::max);
    if max <= 0.0 {
        return Err(Error::DegenerateDistribution);
    }
    PossibilityDistribution::new(row.into_iter().map(|d| (d / max).min(1.0)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Estimator {
    /// Maximum possibilistic likelihood.
    PossibilisticMle,
    /// Max-normalized histogram.
    Histogram,
    /// Random-set maximum likelihood (mass functions per cell).
    RandomSetMle,
}

impl Estimator {
    pub fn as_str(self) -> &'static str {
        match self {
            Estimator::PossibilisticMle => "pml",
            Estimator::Histogram => "histogram",
            Estimator::RandomSetMle => "rset",
        }
    }
}

/// One mass function per `(variable, parent configuration)` cell.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomSetModel {
    structure: NetworkStructure,
    masses: Vec<Vec<MassFunction>>,
}

impl RandomSetModel {
    pub fn new(structure: NetworkStructure, masses: Vec<Vec<MassFunction>>) -> Result<Self> {
        if masses.len() != structure.len() {
            return Err(Error::Structure("one mass table per variable is required".into()));
        }
        for (v, ms) in masses.iter().enumerate() {
            if ms.len() != structure.config_count(v) {
                return Err(Error::Structure(format!(
                    "{} mass functions for {} configurations of {}",
                    ms.len(),
                    structure.config_count(v),
                    structure.variable(v).name()
                )));
            }
            let card = structure.variable(v).cardinality();
            if let Some(m) = ms.iter().find(|m| m.cardinality() != card) {
                return Err(Error::DomainMismatch { expected: card, found: m.cardinality() });
            }
        }
        Ok(Self { structure, masses })
    }

    pub fn structure(&self) -> &NetworkStructure {
        &self.structure
    }

    pub fn masses(&self) -> &[Vec<MassFunction>] {
        &self.masses
    }

    /// Network whose rows are the max-normalized counter functions.
    pub fn to_network(&self, semantics: Semantics) -> Result<PossibilisticNetwork> {
        let rows = self
            .masses
            .iter()
            .map(|ms| ms.iter().map(|m| m.to_possibility().normalize()).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        PossibilisticNetwork::new(self.structure.clone(), rows, semantics)
    }
}

/// Random-set log-likelihood of `data` under `model`.
pub fn random_set_loglik(model: &RandomSetModel, data: &ImpreciseDataset) -> Result<f64> {
    let counts = count_random_set(data, &model.structure)?;
    random_set_loglik_counts(&model.masses, &counts)
}

#[derive(Debug, Clone, PartialEq)]
pub enum LearnedModel {
    Network(PossibilisticNetwork),
    RandomSet(RandomSetModel),
}

impl LearnedModel {
    /// The learned possibilistic network, tagged with `semantics`.
    pub fn into_network(self, semantics: Semantics) -> Result<PossibilisticNetwork> {
        match self {
            LearnedModel::Network(n) => Ok(n.with_semantics(semantics)),
            LearnedModel::RandomSet(m) => m.to_network(semantics),
        }
    }
}

/// Fills every table of `structure` from `data` with the chosen estimator.
///
/// Networks are tagged product-based. Unseen parent configurations become
/// total ignorance (vacuous mass functions for the random-set estimator).
pub fn learn_parameters(
    data: &ImpreciseDataset,
    structure: &NetworkStructure,
    budget: &ImprecisionBudget,
    estimator: Estimator,
) -> Result<LearnedModel> {
    match estimator {
        Estimator::PossibilisticMle => {
            let counts = count_possibilistic(data, structure)?;
            let rows = possibilistic_mle(&counts, budget)?;
            PossibilisticNetwork::new(structure.clone(), rows, Semantics::Product).map(LearnedModel::Network)
        }
        Estimator::Histogram => {
            let counts = count_possibilistic(data, structure)?;
            let rows = histogram_estimate(&counts)?
                .into_iter()
                .enumerate()
                .map(|(v, var)| {
                    let card = structure.variable(v).cardinality();
                    var.into_iter()
                        .map(|row| match row {
                            Some(r) => r.normalize(),
                            None => Ok(PossibilityDistribution::total_ignorance(card)),
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            PossibilisticNetwork::new(structure.clone(), rows, Semantics::Product).map(LearnedModel::Network)
        }
        Estimator::RandomSetMle => {
            let counts = count_random_set(data, structure)?;
            let masses = random_set_mle(&counts)?
                .into_iter()
                .enumerate()
                .map(|(v, var)| {
                    let card = structure.variable(v).cardinality();
                    var.into_iter()
                        .map(|m| m.unwrap_or_else(|| MassFunction::vacuous(card)))
                        .collect()
                })
                .collect();
            RandomSetModel::new(structure.clone(), masses).map(LearnedModel::RandomSet)
        }
    }
}
