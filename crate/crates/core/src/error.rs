use thiserror::Error;

/// Every failure the laboratory can report.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("Fock truncation too small: |alpha|^2 = {alpha_sq:.4} exceeds the guard {limit:.4}")]
    Truncation { alpha_sq: f64, limit: f64 },

    #[error("coherent-state renormalization correction {correction:.3e} exceeds 1e-8 at dim {dim}")]
    TruncationTail { correction: f64, dim: usize },

    #[error("index {index} out of range for dimension {dim}")]
    Index { index: usize, dim: usize },

    #[error("invalid dimension {0}: need at least 2")]
    Dimension(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("superposition vanishes: normalization {norm:.3e} below 1e-6")]
    DegenerateState { norm: f64 },

    #[error("invalid mixture weights: {0}")]
    Weight(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("integration failed: {0}")]
    Integration(String),

    #[error("state leaves the {{0,1}} photon subspace: population {population:.3e} above n = 1")]
    Subspace { population: f64 },

    #[error("detection branch has probability {probability:.3e} and cannot be normalized")]
    DegenerateBranch { probability: f64 },

    #[error("Wigner value has imaginary residue {0:.3e}")]
    NonHermitian(f64),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("sampling failed: {0}")]
    Sampling(String),

    #[error("insufficient tomographic coverage: {0}")]
    Coverage(String),

    #[error("no atom was detected in {shots} shots")]
    NoDetection { shots: u64 },
}

pub type Result<T> = std::result::Result<T, Error>;
