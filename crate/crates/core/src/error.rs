use thiserror::Error;

use crate::cache::CacheError;
use crate::state::spec::ParseError;

/// Errors raised across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("index {index} out of range for {n}-qubit Pauli basis (size {size})")]
    PauliIndexOutOfRange { n: usize, index: usize, size: usize },

    #[error("qubit count mismatch: {left} vs {right}")]
    QubitMismatch { left: usize, right: usize },

    #[error("qubit {qubit} out of range for a {n}-qubit register")]
    InvalidQubit { qubit: usize, n: usize },

    #[error("unsupported qubit count {n} (supported range {min}..={max})")]
    UnsupportedQubitCount { n: usize, min: usize, max: usize },

    #[error("operator is not Hermitian: {0}")]
    NotHermitian(String),

    #[error("invalid density operator: {0}")]
    InvalidDensity(String),

    #[error("invalid stabilizer generators: {0}")]
    InvalidGenerators(String),

    #[error("Bloch vector outside the unit ball (norm {norm})")]
    BlochOutOfRange { norm: f64 },

    #[error("n = {n} basis needs about {bytes} bytes; {reason}")]
    BasisTooLarge { n: usize, bytes: u64, reason: String },

    #[error("linear program failed: {0}")]
    Solver(String),

    #[error("unsupported gate: {0}")]
    UnsupportedGate(String),

    #[error("invalid circuit at line {line}: {message}")]
    Circuit { line: usize, message: String },

    #[error("missing pseudomixture for ancilla slot {slot}")]
    MissingMixture { slot: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error(transparent)]
    Cache(#[from] CacheError),
}

pub type Result<T> = std::result::Result<T, Error>;
