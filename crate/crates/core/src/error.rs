use alloc::string::String;

/// Errors reported by analysis routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("negative target coefficient for species {species} in reaction {reaction}")]
    NegativeTargetCoefficient { reaction: usize, species: String },
    #[error("reaction {0} does not change anything")]
    EmptyReaction(usize),
    #[error("invalid network: {0}")]
    InvalidNetwork(String),
    #[error("rate constants must be positive (reaction {0})")]
    NonPositiveRate(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("source complexes are collinear")]
    SourcesCollinear,
    #[error("no positive equilibrium")]
    NoPositiveEquilibrium,
    #[error("exact arithmetic requires rational rate constants")]
    InexactRates,
    #[error("network does not match family {0}")]
    FamilyMismatch(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = core::result::Result<T, Error>;
