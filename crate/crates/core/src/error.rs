//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("invalid parameter `{name}`: {message}")]
    InvalidParameter { name: &'static str, message: String },

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("state validation failed: {0}")]
    InvalidState(String),

    #[error("POVM validation failed: {0}")]
    InvalidPovm(String),

    #[error("square root of an operator that is not positive semidefinite: {0}")]
    SqrtOfIndefinite(String),

    #[error("eigensolver did not converge within {0} sweeps")]
    NoConvergence(usize),

    #[error("generator is not informationally complete: coefficient at ({x}, {y}) vanishes")]
    NotInformationallyComplete { x: usize, y: usize },

    #[error("noise pair is not in the interior of the joint-measurability region: {0}")]
    OutOfInterior(String),

    #[error("no informationally complete joint observable exists: {0}")]
    IcImpossible(String),

    #[error("preparation observable must be sharp with rank-one effects: {0}")]
    NotSharp(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
