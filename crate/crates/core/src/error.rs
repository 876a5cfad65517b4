//! Error type shared by all modules.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not Hermitian (residual {0:e})")]
    NotHermitian(f64),

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("state is singular (min eigenvalue {0:e})")]
    SingularState(f64),

    #[error("jump operator does not strictly lower energy (entry residual {0:e})")]
    NotLowering(f64),

    #[error("superoperator is non-diagonalizable or near an exceptional point (cond {0:e})")]
    NonDiagonalizable(f64),

    #[error("degenerate stationary space: {0} eigenvalues within the zero threshold")]
    DegenerateStationarySpace(usize),

    #[error("decay mode is not Hermitian within tolerance (residual {0:e})")]
    NonHermitianDecayMode(f64),

    #[error("eigensolver failed to converge after {0} iterations")]
    EigNoConvergence(usize),

    #[error("integration step size underflowed (h = {0:e})")]
    StepUnderflow(f64),

    #[error("entropy production diverges: generator has support outside the state's range")]
    DivergentEntropyProduction,

    #[error("numerical consistency failure: {0}")]
    NumericalConsistency(String),

    #[error("protocol error: {0}")]
    Protocol(String),

    #[error("dimension cap exceeded: d = {got} > {cap}")]
    DimensionCap { got: usize, cap: usize },

    #[error("config error: {0}")]
    Config(String),
}
