use thiserror::Error;

/// Errors surfaced by the simulation library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    /// The resonance index is undefined when the atom-cavity coupling vanishes.
    #[error("degenerate coupling: resonance index undefined for g = 0")]
    DegenerateCoupling,

    #[error("selectivity requires integer N0, got {0}")]
    NonIntegerN0(f64),

    #[error("under-resolved oscillation: dt * fastest rate = {0:.3e} exceeds 0.05")]
    UnderResolved(f64),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("state not normalized: |sum(p) - 1| = {0:.3e}")]
    NotNormalized(f64),

    #[error("normalization drift {drift:.3e} exceeds 1e-8 at collision {collision}")]
    NormalizationDrift { drift: f64, collision: usize },

    #[error("negative probability {value:.3e} at index {index}")]
    NegativeProbability { value: f64, index: usize },

    #[error("non-diagonal state: off-diagonal weight {0:.3e} above tolerance")]
    NonDiagonalState(f64),

    #[error("eigensolver failed to converge after {0} sweeps")]
    EigenNoConvergence(usize),

    #[error("unknown preset: {0}")]
    UnknownPreset(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
