//! The st-norm `D(ρ) = 2^{-n} Σ_P |Tr(Pρ)|` and the lower bounds it gives.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::pauli::pauli_vector_of;
use crate::state::DensityOperator;

/// Threshold above 1 for [`is_magic_witnessed`].
pub const WITNESS_MARGIN: f64 = 1e-10;

/// `D(ρ)`; always at least `2^{-n}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StNormValue {
    pub n: usize,
    pub value: f64,
}

pub fn st_norm(rho: &DensityOperator) -> Result<StNormValue> {
    let b = pauli_vector_of(rho)?;
    let sum: f64 = b.entries().iter().map(|v| v.abs()).sum();
    let n = rho.num_qubits();
    Ok(StNormValue { n, value: sum / (1u64 << n) as f64 })
}

/// `max(1, (D - 2^{-n}) / (1 - 2^{-n}))`.
pub fn rom_lower_bound(rho: &DensityOperator) -> Result<f64> {
    let d = st_norm(rho)?;
    Ok(tighter(d.value, d.n))
}

fn tighter(d: f64, qubits: usize) -> f64 {
    let floor = 0.5f64.powi(qubits as i32);
    ((d - floor) / (1.0 - floor)).max(1.0)
}

/// Lower bounds on `R(ρ^{⊗t})` that need no enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProductBound {
    pub copies: usize,
    /// `max(1, (D^t - 2^{-tm}) / (1 - 2^{-tm}))`.
    pub tighter: f64,
    /// `max(1, D^t)`.
    pub plain: f64,
    /// Per-copy growth rate `D(ρ)`.
    pub rate: f64,
}

pub fn product_lower_bound(rho: &DensityOperator, copies: usize) -> Result<ProductBound> {
    if copies == 0 {
        return Err(Error::InvalidArgument("number of copies must be at least 1".into()));
    }
    let d = st_norm(rho)?;
    let dt = d.value.powi(copies as i32);
    Ok(ProductBound {
        copies,
        tighter: tighter(dt, d.n * copies),
        plain: dt.max(1.0),
        rate: d.value,
    })
}

/// True when `D(ρ) > 1`, which proves `ρ` is not a stabilizer mixture.
/// False is inconclusive.
pub fn is_magic_witnessed(rho: &DensityOperator) -> Result<bool> {
    Ok(st_norm(rho)?.value > 1.0 + WITNESS_MARGIN)
}

/// `R(ρ) = max(1, ‖r‖₁)` for a single-qubit state with Bloch vector `r`.
pub fn single_qubit_robustness(r: [f64; 3]) -> f64 {
    (r[0].abs() + r[1].abs() + r[2].abs()).max(1.0)
}
