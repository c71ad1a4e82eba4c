//! Possibilistic networks over finite domains.
//!
//! The crate covers the full parameter-learning loop for possibilistic
//! networks:
//!
//! - possibility distributions, possibility/necessity measures, min- and
//!   product-based conditioning, α-cuts ([`distribution`]);
//! - mass functions (random sets) and their counter functions ([`mass`]);
//! - DAG structures, conditional possibility tables and the chain rule
//!   ([`network`]);
//! - forward sampling of imprecise, set-valued datasets with a tunable
//!   imprecision degree ([`sampler`]);
//! - occurrence counting, the histogram estimator, random-set and
//!   possibilistic likelihoods and their closed-form maximizers
//!   ([`estimator`]);
//! - gold-network comparison metrics and the sample → learn → score
//!   experiment ([`evaluation`]).
//!
//! Everything is `no_std` with `alloc`. File formats and the command-line
//! front end live in the `pnet` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod dataset;
pub mod distribution;
pub mod domain;
pub mod error;
pub mod estimator;
pub mod evaluation;
pub mod mass;
pub mod network;
pub mod sampler;

pub use dataset::{ImpreciseDataset, ImpreciseObservation};
pub use distribution::{PossibilityDistribution, Semantics};
pub use domain::{Event, StateDomain};
pub use error::{Error, Result};
pub use estimator::{
    CountTensor, Estimator, ImprecisionBudget, LearnedModel, RandomSetModel,
};
pub use evaluation::{EvaluationReport, ExperimentConfig};
pub use mass::MassFunction;
pub use network::{ConditionalPossibilityTable, NetworkStructure, PossibilisticNetwork};
pub use sampler::{SamplerConfig, SamplingMode};

/// Absolute tolerance used for normalization and equality checks on degrees.
pub const TOLERANCE: f64 = 1e-9;

/// Default cap on the number of joint configurations that may be enumerated.
pub const DEFAULT_OMEGA_CAP: usize = 1 << 20;
