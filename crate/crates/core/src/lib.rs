//! Robustness of magic for multiqubit states: stabilizer enumeration, exact
//! L1 minimisation with dual certificates, quasiprobability simulation of
//! magic-state circuits and T-count lower bounds.

pub mod bounds;
pub mod cache;
pub mod error;
pub mod pauli;
pub mod robustness;
pub mod sampler;
pub mod stabilizer;
pub mod state;
pub mod synthesis;

pub use error::{Error, Result};
pub use pauli::{PauliLetter, PauliString, PauliVector};
pub use robustness::{BasisMatrix, Pseudomixture, RobustnessResult};
pub use stabilizer::{CliffordGate, StabilizerTableau};
pub use state::{DensityOperator, PhasePolynomialGate};
