//! Error type shared across the core modules.

use core::fmt;

/// Alias for results produced by this crate.
pub type Result<T> = core::result::Result<T, Error>;

/// Everything that can go wrong when constructing states or invoking an
/// operation outside its hypotheses.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A population must contain at least one agent.
    AgentCountZero,
    /// A model parameter fell outside its admissible interval.
    ParamOutOfRange { name: &'static str, value: f64 },
    /// Two coupled containers disagree on length.
    DimensionMismatch { expected: usize, found: usize },
    /// A state vector entry left the unit interval.
    ValueOutOfRange {
        name: &'static str,
        index: usize,
        value: f64,
    },
    /// The augmented representation is only defined from time index 1 on.
    TimeIndexZero,
    /// An augmented vector must have even length (opinion half, action half).
    OddAugmentedLength { found: usize },
    /// The requested check requires a decision weight strictly inside (0, 1).
    DegenerateDecisionWeight { phi: f64 },
    /// The norm-conformity analysis applies only to decision weight 0.
    DecisionWeightNotZero { phi: f64 },
    /// Simulations need at least two steps.
    HorizonTooShort { horizon: usize },
    /// The exhaustive cut-balance oracle enumerates all node subsets and is
    /// capped; larger graphs should rely on the strong-connectivity
    /// sufficient condition instead.
    GraphTooLarge { nodes: usize, limit: usize },
    /// A windowed operation received no matrices.
    EmptyWindow,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::AgentCountZero => write!(f, "population must contain at least one agent"),
            Error::ParamOutOfRange { name, value } => {
                write!(f, "parameter {name} = {value} outside [0, 1]")
            }
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::ValueOutOfRange { name, index, value } => {
                write!(f, "{name}[{index}] = {value} outside [0, 1]")
            }
            Error::TimeIndexZero => {
                write!(f, "augmented state is only defined for time index t >= 1")
            }
            Error::OddAugmentedLength { found } => {
                write!(f, "augmented vector length {found} is not even")
            }
            Error::DegenerateDecisionWeight { phi } => {
                write!(f, "decision weight {phi} must lie strictly inside (0, 1)")
            }
            Error::DecisionWeightNotZero { phi } => {
                write!(f, "norm-conformity checks require decision weight 0, got {phi}")
            }
            Error::HorizonTooShort { horizon } => {
                write!(f, "horizon {horizon} too short, need at least 2")
            }
            Error::GraphTooLarge { nodes, limit } => write!(
                f,
                "exhaustive cut-balance limited to {limit} nodes, graph has {nodes}; \
                 use strong connectivity as the sufficient condition instead"
            ),
            Error::EmptyWindow => write!(f, "window of matrices is empty"),
        }
    }
}

impl core::error::Error for Error {}
