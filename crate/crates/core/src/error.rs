use thiserror::Error;

/// Errors raised by validation, the numerical kernels and the file formats.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("Pauli index {0} out of range (expected 0..=3)")]
    PauliIndex(usize),

    #[error("matrix is not Hermitian: max |H_ij - conj(H_ji)| = {violation:e}")]
    NotHermitian { violation: f64 },

    #[error("trace must be 1, got {trace}")]
    Trace { trace: f64 },

    #[error("matrix is not PSD: minimum eigenvalue {min_eigenvalue:e}")]
    NotPsd { min_eigenvalue: f64 },

    #[error("Bloch vector norm {norm} exceeds 1")]
    BlochNorm { norm: f64 },

    #[error("eigenvalue iteration did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("eigenvalue expected to be real has imaginary part {imag:e}")]
    ComplexEigenvalue { imag: f64 },

    #[error("eigenvalue expected to be non-negative is {value:e}")]
    NegativeEigenvalue { value: f64 },

    #[error("invalid filter: {0}")]
    InvalidFilter(String),

    #[error("not a valid filtering operation: operator norm of F^dagger F is {norm}")]
    NotFilterOperation { norm: f64 },

    #[error("vanishing success probability {probability:e}")]
    VanishingProbability { probability: f64 },

    #[error("bound diverges at pure marginal (|a| = {norm})")]
    PureMarginal { norm: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed input: {0}")]
    Format(String),

    #[error("{0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
