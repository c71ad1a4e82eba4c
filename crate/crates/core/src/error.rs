use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("domain mismatch: expected {expected} states, found {found}")]
    DomainMismatch { expected: usize, found: usize },

    #[error("degree {0} out of range [0,1]")]
    DegreeOutOfRange(f64),

    #[error("alpha {0} outside [0,1]")]
    AlphaOutOfRange(f64),

    #[error("conditioning on impossible evidence")]
    ImpossibleEvidence,

    #[error("degenerate distribution: every degree is zero")]
    DegenerateDistribution,

    #[error("invalid mass function: {0}")]
    InvalidMass(String),

    #[error("cycle detected through edge {parent} -> {child}")]
    Cycle { parent: String, child: String },

    #[error("structural error: {0}")]
    Structure(String),

    #[error("variable {child} instantiated before its parent {parent}")]
    Sequencing { child: String, parent: String },

    #[error("joint enumeration needs {size} configurations, cap is {cap}")]
    OmegaCapExceeded { size: u128, cap: usize },

    #[error("semantics mismatch: {0} vs {1}")]
    SemanticsMismatch(&'static str, &'static str),

    #[error("schema mismatch: {0}")]
    Schema(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
