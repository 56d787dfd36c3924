use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("row and column sums disagree: sum(r) = {rows}, sum(c) = {cols}")]
    SumMismatch { rows: usize, cols: usize },

    #[error("margin out of range: {0}")]
    MarginRange(String),

    #[error("empty support: margins are Gale-Ryser infeasible")]
    Infeasible,

    #[error("degenerate weight matrix: {0}")]
    DegenerateWeights(String),

    #[error("invalid weight matrix: {0}")]
    InvalidWeights(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("pattern unsupported, fall back to general-zeros path: {0}")]
    UnsupportedPattern(String),

    #[error("not a permutation matrix")]
    NotPermutation,

    #[error("instance too large for exhaustive computation: {0}")]
    TooLarge(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
