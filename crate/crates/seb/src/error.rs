use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or empty input data (CSV parse failures, ragged rows, ...).
    #[error("input error: {0}")]
    Input(String),

    /// A parameter outside its documented domain (zero tolerance, empty set, ...).
    #[error("invalid argument: {0}")]
    Invalid(String),

    /// The points are not affinely independent, so the equidistant system
    /// has no unique solution.
    #[error("rank condition failed: {n} points span an affine subspace of dimension {rank} (need {})", n.saturating_sub(1))]
    RankCondition { n: usize, rank: usize },

    /// A linear-algebra kernel failed to produce a usable result.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// The drop heuristic reduced the active set past the point of recovery.
    #[error("degenerate reduction: {0}")]
    DegenerateReduction(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
