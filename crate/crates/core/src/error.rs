use thiserror::Error;

use crate::state::Statistics;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("could not parse {0:?} as an element of Q(√2)")]
    Parse(String),

    #[error("matrix is not square: {rows} rows, {cols} columns")]
    NotSquare { rows: usize, cols: usize },

    #[error("permanent of a {dim}×{dim} matrix exceeds the configured bound of {bound}")]
    PermanentTooLarge { dim: usize, bound: usize },

    #[error("length mismatch: {left} vs {right} particles")]
    LengthMismatch { left: usize, right: usize },

    #[error("statistics mismatch: {left:?} vs {right:?}")]
    StatisticsMismatch { left: Statistics, right: Statistics },

    #[error("single-particle state has no nonzero amplitude")]
    EmptySingleParticleState,

    #[error("cannot normalize a state of zero norm")]
    ZeroNorm,

    #[error("count configuration holds {found} particles but the state has {expected}")]
    CountMismatch { expected: usize, found: usize },

    #[error("operation requires a state expanded on localized modes")]
    NotLocalized,

    #[error("Bell target {target} must hold {expected} particles in every term, found {found}")]
    TargetOccupancy {
        target: String,
        expected: String,
        found: String,
    },

    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("particle number must be even and at least 4, got {0}")]
    InvalidParticleNumber(usize),

    #[error("unknown node {0:?}")]
    UnknownNode(String),

    #[error("measurement leaf is not a Bell state on the end nodes")]
    NotABellState,
}
