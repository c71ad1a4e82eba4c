//! Forward sampling of imprecise datasets from a possibilistic network.
//!
//! Variables are visited in topological order. A root is instantiated from
//! its marginal row; a child from the envelope
//!
//! ```text
//! Π(X | Pa = A)(x) = max_{a ∈ A} π(x | a) · π(a)
//! ```
//!
//! where `A` is the Cartesian product of the parent cells already sampled
//! in the record and `π(a)` is the ⊗-combination of the parents' envelope
//! degrees. The envelope is max-normalized, α is drawn uniformly from
//! (0, 1], and the α-cut is either blurred (imprecise mode) or collapsed to
//! one uniformly chosen member (precise mode).
//!
//! Every record draws from its own ChaCha8 stream selected by the record
//! index, so the output depends only on the seed and never on the order in
//! which records are produced.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::{DatasetMetadata, ImpreciseDataset, ImpreciseObservation};
use crate::distribution::PossibilityDistribution;
use crate::domain::Event;
use crate::error::{Error, Result};
use crate::network::{Assignments, PossibilisticNetwork};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SamplingMode {
    /// Emit a blurred α-cut (set-valued cells).
    ImpreciseCut,
    /// Emit one state drawn uniformly from the α-cut.
    PreciseUniform,
}

impl SamplingMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SamplingMode::ImpreciseCut => "imprecise",
            SamplingMode::PreciseUniform => "precise",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplerConfig {
    theta_imp: f64,
    mode: SamplingMode,
    seed: u64,
    record_count: usize,
}

impl SamplerConfig {
    pub fn new(theta_imp: f64, mode: SamplingMode, seed: u64, record_count: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&theta_imp) {
            return Err(Error::InvalidConfig(alloc::format!(
                "imprecision degree {theta_imp} outside [0,1]"
            )));
        }
        if record_count == 0 {
            return Err(Error::InvalidConfig("record count must be positive".into()));
        }
        Ok(Self { theta_imp, mode, seed, record_count })
    }

    pub fn theta_imp(&self) -> f64 {
        self.theta_imp
    }

    pub fn mode(&self) -> SamplingMode {
        self.mode
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn record_count(&self) -> usize {
        self.record_count
    }
}

/// The random stream used for record `index` under `seed`.
pub fn record_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Cells and envelopes of the variables instantiated so far in one record.
#[derive(Debug, Clone)]
pub struct RecordState {
    cells: Vec<Option<Event>>,
    envelopes: Vec<Option<PossibilityDistribution>>,
}

impl RecordState {
    pub fn new(variables: usize) -> Self {
        Self { cells: vec![None; variables], envelopes: vec![None; variables] }
    }

    pub fn set(&mut self, variable: usize, cell: Event, envelope: PossibilityDistribution) {
        self.cells[variable] = Some(cell);
        self.envelopes[variable] = Some(envelope);
    }

    pub fn cell(&self, variable: usize) -> Option<Event> {
        self.cells[variable]
    }

    pub fn envelope(&self, variable: usize) -> Option<&PossibilityDistribution> {
        self.envelopes[variable].as_ref()
    }
}

/// The max-normalized envelope from which `child` is instantiated.
pub fn conditional_envelope(
    net: &PossibilisticNetwork,
    child: usize,
    state: &RecordState,
) -> Result<PossibilityDistribution> {
    let s = net.structure();
    let parents = s.parents(child);
    let table = net.table(child);
    if parents.is_empty() {
        return table.row(0).normalize();
    }

    let mut members = Vec::with_capacity(parents.len());
    let mut envelopes = Vec::with_capacity(parents.len());
    for &p in parents {
        match (state.cell(p), state.envelope(p)) {
            (Some(cell), Some(env)) => {
                members.push(cell.iter().collect::<Vec<_>>());
                envelopes.push(env);
            }
            _ => {
                return Err(Error::Sequencing {
                    child: s.variable(child).name().into(),
                    parent: s.variable(p).name().into(),
                })
            }
        }
    }

    let semantics = net.semantics();
    let mut out = vec![0.0f64; s.variable(child).cardinality()];
    let mut config = vec![0; parents.len()];
    for pick in Assignments::new(members.iter().map(Vec::len).collect()) {
        let mut weight = semantics.identity();
        for (k, &i) in pick.iter().enumerate() {
            config[k] = members[k][i];
            weight = semantics.combine(weight, envelopes[k].degree(config[k]));
        }
        let row = table.row(s.config_index(child, &config));
        for (o, &d) in out.iter_mut().zip(row.degrees()) {
            *o = o.max(d * weight);
        }
    }
    PossibilityDistribution::new(out)?.normalize()
}

/// Keeps the best state and each other member of `cut` independently with
/// probability `theta`.
///
/// A subset `S ∋ best` is therefore returned with probability
/// `θ^(|S|-1) (1-θ)^(|cut|-|S|)`.
pub fn imprecision_blur<R: Rng + ?Sized>(cut: Event, best: usize, theta: f64, rng: &mut R) -> Event {
    debug_assert!(cut.contains(best));
    let mut out = Event::singleton(cut.cardinality(), best);
    for s in cut.iter().filter(|&s| s != best) {
        if rng.random::<f64>() < theta {
            out = out.with(s);
        }
    }
    out
}

/// Draws α uniformly from (0, 1] and instantiates from `envelope`.
pub fn instantiate_variable<R: Rng + ?Sized>(
    envelope: &PossibilityDistribution,
    config: &SamplerConfig,
    rng: &mut R,
) -> Event {
    let alpha = 1.0 - rng.random::<f64>();
    instantiate_at(envelope, alpha, config, rng)
}

/// Instantiation for a given α. `envelope` must be normalized.
pub fn instantiate_at<R: Rng + ?Sized>(
    envelope: &PossibilityDistribution,
    alpha: f64,
    config: &SamplerConfig,
    rng: &mut R,
) -> Event {
    debug_assert!(envelope.is_normalized());
    let best = envelope.best_state();
    let cut = envelope.cut_unchecked(alpha).with(best);
    match config.mode {
        SamplingMode::ImpreciseCut => imprecision_blur(cut, best, config.theta_imp, rng),
        SamplingMode::PreciseUniform => {
            let k = rng.random_range(0..cut.len());
            Event::singleton(cut.cardinality(), cut.nth(k).expect("k < |cut|"))
        }
    }
}

/// Samples record number `index` of the dataset described by `config`.
pub fn sample_record(
    net: &PossibilisticNetwork,
    config: &SamplerConfig,
    index: u64,
) -> Result<ImpreciseObservation> {
    let n = net.structure().len();
    let mut rng = record_rng(config.seed, index);
    let mut state = RecordState::new(n);
    for &v in net.topological_order() {
        let envelope = conditional_envelope(net, v, &state)?;
        let cell = instantiate_variable(&envelope, config, &mut rng);
        state.set(v, cell, envelope);
    }
    let cells = state.cells.into_iter().map(|c| c.expect("all variables visited")).collect();
    Ok(ImpreciseObservation::new(cells))
}

pub fn sample_dataset(net: &PossibilisticNetwork, config: &SamplerConfig) -> Result<ImpreciseDataset> {
    let mut data = ImpreciseDataset::new(net.variables().to_vec()).with_metadata(DatasetMetadata {
        seed: Some(config.seed),
        theta_imp: Some(config.theta_imp),
        mode: Some(config.mode),
    });
    for i in 0..config.record_count {
        data.push(sample_record(net, config, i as u64)?)?;
    }
    Ok(data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::Semantics;
    use crate::domain::StateDomain;
    use crate::network::NetworkStructure;
    use alloc::format;

    fn binary(name: &str) -> StateDomain {
        let l = name.to_lowercase();
        StateDomain::new(name, [format!("{l}1"), format!("{l}2")]).unwrap()
    }

    fn pi(d: &[f64]) -> PossibilityDistribution {
        PossibilityDistribution::new(d.to_vec()).unwrap()
    }

    fn xy() -> PossibilisticNetwork {
        let s = NetworkStructure::from_named_edges(vec![binary("X"), binary("Y")], &[("X", "Y")]).unwrap();
        PossibilisticNetwork::from_degrees(
            s,
            vec![vec![vec![1.0, 0.5]], vec![vec![1.0, 0.2], vec![0.7, 1.0]]],
            Semantics::Product,
        )
        .unwrap()
    }

    #[test]
    fn envelope_over_imprecise_parent() {
        // Hand enumeration over a ∈ {x1, x2}:
        //   y1: max(1·1, 0.7·0.5) = 1, y2: max(0.2·1, 1·0.5) = 0.5
        let net = xy();
        let mut st = RecordState::new(2);
        st.set(0, Event::full(2), pi(&[1.0, 0.5]));
        let env = conditional_envelope(&net, 1, &st).unwrap();
        assert_eq!(env.degrees(), &[1.0, 0.5]);
    }

    #[test]
    fn envelope_over_singleton_parent_is_the_row() {
        let net = xy();
        let mut st = RecordState::new(2);
        st.set(0, Event::singleton(2, 0), pi(&[1.0, 0.5]));
        assert_eq!(conditional_envelope(&net, 1, &st).unwrap().degrees(), &[1.0, 0.2]);
    }

    #[test]
    fn envelope_of_root_is_its_marginal() {
        let net = xy();
        let st = RecordState::new(2);
        assert_eq!(conditional_envelope(&net, 0, &st).unwrap().degrees(), &[1.0, 0.5]);
    }

    #[test]
    fn envelope_requires_instantiated_parents() {
        let net = xy();
        let st = RecordState::new(2);
        assert!(matches!(
            conditional_envelope(&net, 1, &st),
            Err(Error::Sequencing { .. })
        ));
    }

    #[test]
    fn envelope_is_renormalized() {
        // Parent fixed at x2 (envelope degree 0.5): row [0.7, 1.0] scaled
        // by 0.5 is [0.35, 0.5], normalized back to [0.7, 1.0].
        let net = xy();
        let mut st = RecordState::new(2);
        st.set(0, Event::singleton(2, 1), pi(&[0.6, 0.5]));
        let env = conditional_envelope(&net, 1, &st).unwrap();
        assert!((env.degree(0) - 0.7).abs() < 1e-12);
        assert_eq!(env.degree(1), 1.0);
    }

    #[test]
    fn instantiation_examples() {
        let mut rng = record_rng(1, 0);
        let imprecise = SamplerConfig::new(1.0, SamplingMode::ImpreciseCut, 1, 1).unwrap();
        assert_eq!(instantiate_at(&pi(&[1.0, 0.4]), 0.7, &imprecise, &mut rng), Event::singleton(2, 0));

        let sharp = SamplerConfig::new(0.0, SamplingMode::ImpreciseCut, 1, 1).unwrap();
        for _ in 0..100 {
            assert_eq!(
                instantiate_at(&pi(&[1.0, 0.4, 0.2]), 0.1, &sharp, &mut rng),
                Event::singleton(3, 0)
            );
        }

        let precise = SamplerConfig::new(0.5, SamplingMode::PreciseUniform, 1, 1).unwrap();
        let mut hits = [0usize; 2];
        for _ in 0..20_000 {
            let e = instantiate_at(&pi(&[1.0, 1.0]), 0.5, &precise, &mut rng);
            assert_eq!(e.len(), 1);
            hits[e.first().unwrap()] += 1;
        }
        assert!((hits[0] as f64 / 20_000.0 - 0.5).abs() < 0.02, "{hits:?}");
    }

    #[test]
    fn blur_extremes() {
        let mut rng = record_rng(3, 0);
        let cut = Event::full(3);
        for _ in 0..50 {
            assert_eq!(imprecision_blur(cut, 0, 0.0, &mut rng), Event::singleton(3, 0));
            assert_eq!(imprecision_blur(cut, 0, 1.0, &mut rng), cut);
        }
    }

    #[test]
    fn config_validation() {
        assert!(SamplerConfig::new(1.5, SamplingMode::ImpreciseCut, 0, 1).is_err());
        assert!(SamplerConfig::new(-0.1, SamplingMode::ImpreciseCut, 0, 1).is_err());
        assert!(SamplerConfig::new(0.5, SamplingMode::ImpreciseCut, 0, 0).is_err());
    }

    #[test]
    fn records_are_independent_of_generation_order() {
        let net = xy();
        let cfg = SamplerConfig::new(0.5, SamplingMode::ImpreciseCut, 42, 50).unwrap();
        let data = sample_dataset(&net, &cfg).unwrap();
        for i in (0..50).rev() {
            assert_eq!(&sample_record(&net, &cfg, i).unwrap(), &data.records()[i as usize]);
        }
        assert_eq!(data.metadata().seed, Some(42));
    }
}
