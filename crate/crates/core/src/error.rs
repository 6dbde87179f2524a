//! Error type shared by every module of the toolkit.

use thiserror::Error;

/// Everything that can go wrong while building rings, matrices and reports.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed ring specification `{0}`")]
    MalformedSpec(String),
    #[error("malformed element `{value}` for ring {ring}")]
    MalformedElement { ring: String, value: String },
    #[error("ring {0} is not local")]
    NotLocal(String),
    #[error("element {value} is not a unit in {ring}")]
    NonUnit { ring: String, value: String },
    #[error("unsupported root system {0}")]
    UnsupportedSystem(String),
    #[error("entry ({row}, {col}) of M^{k} is not divisible by {k}!")]
    DivisibilityViolation { k: usize, row: usize, col: usize },
    #[error("transition matrix is not invertible")]
    SingularTransition,
    #[error("matrix is not invertible over {0}")]
    Singular(String),
    #[error("matrix does not satisfy a^3 = 1")]
    Order3Violation,
    #[error("matrices are not congruent modulo the radical")]
    NotCongruent,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("ring {0} is not a finite field")]
    NotAField(String),
    #[error("unknown relation `{0}`")]
    UnknownRelation(String),
    #[error("unknown pipeline stage `{0}`")]
    UnknownStage(String),
    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),
    #[error("fixture error: {0}")]
    Fixture(String),
    #[error("malformed condition: {0}")]
    MalformedCondition(String),
    #[error("block context is not of the second type: {0}")]
    NotSecondType(String),
    #[error("assertion failed: {0}")]
    Assertion(String),
}

pub type Result<T> = std::result::Result<T, Error>;
