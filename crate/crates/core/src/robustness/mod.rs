//! Robustness of magic as an L1 minimisation over stabilizer states, with
//! dual certificates.

mod basis;
mod blocked;
mod ipm;

pub use basis::{basis_memory_estimate, BasisMatrix, DEFAULT_MAX_QUBITS};
pub use blocked::{
    blocked_rom, h_robustness_reference, rom_bracket, BlockedRobustness, Bracket, H_ROBUSTNESS_5,
};
pub use ipm::SolverOptions;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::pauli::{pauli_vector_of, PauliVector};
use crate::stabilizer::{StabilizerEnumeration, StabilizerStateId};
use crate::state::DensityOperator;

/// Primal residual accepted by certificates.
pub const PRIMAL_TOLERANCE: f64 = 1e-7;
/// Slack allowed on `‖Aᵀy‖∞ ≤ 1`.
pub const DUAL_TOLERANCE: f64 = 1e-8;
/// Largest certified duality gap.
pub const GAP_TOLERANCE: f64 = 1e-6;

/// Sparse affine combination `Σ x_i σ_i` of stabilizer states.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Pseudomixture {
    n: usize,
    terms: Vec<(usize, f64)>,
}

impl Pseudomixture {
    /// Terms are `(state index, coefficient)` in the canonical enumeration.
    pub fn new(n: usize, terms: Vec<(usize, f64)>) -> Self {
        Pseudomixture { n, terms }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[(usize, f64)] {
        &self.terms
    }

    pub fn ids(&self) -> impl Iterator<Item = (StabilizerStateId, f64)> + '_ {
        self.terms.iter().map(move |&(index, x)| (StabilizerStateId { n: self.n, index }, x))
    }

    pub fn l1_norm(&self) -> f64 {
        self.terms.iter().map(|(_, x)| x.abs()).sum()
    }

    pub fn sum(&self) -> f64 {
        self.terms.iter().map(|(_, x)| x).sum()
    }

    /// Dense coefficient vector over all columns of `basis`.
    pub fn to_dense_vector(&self, basis: &BasisMatrix) -> Result<Vec<f64>> {
        let mut x = vec![0.0; basis.num_cols()];
        for &(i, c) in &self.terms {
            if i >= x.len() {
                return Err(Error::InvalidArgument(format!("state index {i} out of range")));
            }
            x[i] += c;
        }
        Ok(x)
    }

    /// `A x`, the Pauli vector of the represented operator.
    pub fn pauli_vector(&self, basis: &BasisMatrix) -> Result<Vec<f64>> {
        if basis.num_qubits() != self.n {
            return Err(Error::QubitMismatch { left: self.n, right: basis.num_qubits() });
        }
        Ok(basis.a_mul(&self.to_dense_vector(basis)?))
    }

    /// `Σ x_i |σ_i⟩⟨σ_i|` as a dense matrix.
    pub fn reconstruct(&self, enumeration: &StabilizerEnumeration) -> Result<DMatrix<Complex64>> {
        let dim = 1usize << self.n;
        let mut m = DMatrix::zeros(dim, dim);
        for &(i, x) in &self.terms {
            let v = enumeration.tableau(i)?.state_vector()?;
            m += DMatrix::from_fn(dim, dim, |r, c| v[r] * v[c].conj() * x);
        }
        Ok(m)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CertificateStatus {
    Certified,
    Uncertified,
}

/// Solution of the robustness LP with its dual certificate.
#[derive(Clone, Debug, Serialize)]
pub struct RobustnessResult {
    /// `‖x‖₁`.
    pub value: f64,
    pub mixture: Pseudomixture,
    /// Dual vector `y` with `‖Aᵀy‖∞ ≤ 1`; `-bᵀy` lower-bounds the value.
    pub dual: Vec<f64>,
    pub dual_value: f64,
    pub gap: f64,
    pub primal_residual: f64,
    pub dual_violation: f64,
    pub status: CertificateStatus,
    pub iterations: usize,
}

/// `R(ρ)`.
pub fn rom(rho: &DensityOperator, basis: &BasisMatrix) -> Result<RobustnessResult> {
    rom_with(&pauli_vector_of(rho)?, basis, &SolverOptions::default())
}

/// Solves the LP for an explicit Pauli vector.
pub fn rom_with(b: &PauliVector, basis: &BasisMatrix, opts: &SolverOptions) -> Result<RobustnessResult> {
    if b.num_qubits() != basis.num_qubits() {
        return Err(Error::QubitMismatch { left: basis.num_qubits(), right: b.num_qubits() });
    }
    let bv = b.entries();
    let out = ipm::solve_l1(basis, bv, opts)?;

    // Dual: rescale into the feasible box.
    let t = basis.at_mul(&out.w);
    let scale = t.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let y: Vec<f64> = out.w.iter().map(|v| -v / scale).collect();
    let dual_value = -bv.iter().zip(&y).map(|(p, q)| p * q).sum::<f64>();

    let x = polish_primal(basis, bv, out.x, opts.drop_tolerance)?;
    let residual = residual_inf(basis, bv, &x);
    let terms: Vec<(usize, f64)> = x.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(i, &v)| (i, v)).collect();
    let mixture = Pseudomixture::new(basis.num_qubits(), terms);
    let value = mixture.l1_norm();
    let dual_violation = (inf_of(&basis.at_mul(&y)) - 1.0).max(0.0);
    let gap = (value - dual_value).abs();
    let status = if residual <= PRIMAL_TOLERANCE && gap <= GAP_TOLERANCE {
        CertificateStatus::Certified
    } else {
        CertificateStatus::Uncertified
    };
    Ok(RobustnessResult {
        value,
        mixture,
        dual: y,
        dual_value,
        gap,
        primal_residual: residual,
        dual_violation,
        status,
        iterations: out.iterations,
    })
}

fn inf_of(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn residual_inf(basis: &BasisMatrix, b: &[f64], x: &[f64]) -> f64 {
    basis.a_mul(x).iter().zip(b).fold(0.0, |m, (p, q)| m.max((p - q).abs()))
}

/// Drops negligible entries and restores `Ax = b` by a least-norm correction
/// on the remaining support, falling back to all columns.
fn polish_primal(basis: &BasisMatrix, b: &[f64], mut x: Vec<f64>, drop: f64) -> Result<Vec<f64>> {
    let full = x.clone();
    for v in x.iter_mut() {
        if v.abs() < drop {
            *v = 0.0;
        }
    }
    let support: Vec<f64> = x.iter().map(|&v| if v != 0.0 { 1.0 } else { 0.0 }).collect();
    if project(basis, b, &mut x, &support).is_ok() && residual_inf(basis, b, &x) <= 1e-10 {
        return Ok(x);
    }
    let mut x = full;
    project(basis, b, &mut x, &vec![1.0; basis.num_cols()])?;
    Ok(x)
}

/// `x += D Aᵀ (A D Aᵀ)⁻¹ (b - Ax)` with two refinement passes.
fn project(basis: &BasisMatrix, b: &[f64], x: &mut [f64], d: &[f64]) -> Result<()> {
    let chol = ipm::factor(basis.weighted_gram(d))?;
    for _ in 0..3 {
        let ax = basis.a_mul(x);
        let r: Vec<f64> = b.iter().zip(&ax).map(|(p, q)| p - q).collect();
        let lam = chol.solve(&DVector::from_vec(r));
        let corr = basis.at_mul(lam.as_slice());
        for ((xi, ci), di) in x.iter_mut().zip(corr).zip(d) {
            *xi += di * ci;
        }
    }
    Ok(())
}

/// Checks primal feasibility, dual feasibility and the duality gap from
/// scratch, ignoring the stored summary fields.
pub fn verify_certificate(result: &RobustnessResult, b: &PauliVector, basis: &BasisMatrix) -> bool {
    let Ok(ax) = result.mixture.pauli_vector(basis) else {
        return false;
    };
    if b.num_qubits() != basis.num_qubits() || result.dual.len() != basis.num_rows() {
        return false;
    }
    let primal = ax.iter().zip(b.entries()).fold(0.0f64, |m, (p, q)| m.max((p - q).abs()));
    let dual_ok = basis.at_mul(&result.dual).iter().all(|v| v.abs() <= 1.0 + DUAL_TOLERANCE);
    let dual_value = -b.entries().iter().zip(&result.dual).map(|(p, q)| p * q).sum::<f64>();
    let gap = (result.mixture.l1_norm() - dual_value).abs();
    primal <= PRIMAL_TOLERANCE && dual_ok && gap <= GAP_TOLERANCE
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{h_state, PhasePolynomialGate};
    use std::f64::consts::SQRT_2;

    #[test]
    fn h_state_robustness() {
        let basis = BasisMatrix::assemble(1).unwrap();
        let r = rom(&h_state(), &basis).unwrap();
        assert!((r.value - SQRT_2).abs() < 1e-9, "{}", r.value);
        assert_eq!(r.status, CertificateStatus::Certified);
        let b = pauli_vector_of(&h_state()).unwrap();
        assert!(verify_certificate(&r, &b, &basis));
    }

    #[test]
    fn worked_example_mixture_is_feasible() {
        let basis = BasisMatrix::assemble(1).unwrap();
        let x = [SQRT_2 / 2.0, 0.0, 0.5, (1.0 - SQRT_2) / 2.0, 0.0, 0.0];
        let mix = Pseudomixture::new(1, x.iter().copied().enumerate().collect());
        let b = pauli_vector_of(&h_state()).unwrap();
        let ax = mix.pauli_vector(&basis).unwrap();
        for (p, q) in ax.iter().zip(b.entries()) {
            assert!((p - q).abs() < 1e-15);
        }
        assert!((mix.l1_norm() - SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn certificate_detects_tampering() {
        let basis = BasisMatrix::assemble(1).unwrap();
        let b = pauli_vector_of(&h_state()).unwrap();
        let r = rom(&h_state(), &basis).unwrap();
        let mut bad = r.clone();
        bad.mixture.terms[0].1 += 0.1;
        assert!(!verify_certificate(&bad, &b, &basis));
        let mut bad = r.clone();
        bad.dual.iter_mut().for_each(|v| *v *= 2.0);
        assert!(!verify_certificate(&bad, &b, &basis));
    }

    #[test]
    fn cs_state_robustness() {
        let basis = BasisMatrix::assemble(2).unwrap();
        let mut g = PhasePolynomialGate::identity(2);
        g.add_cs(0, 1, 1).unwrap();
        let r = rom(&g.resource_state().unwrap(), &basis).unwrap();
        assert!((r.value - 2.2).abs() < 1e-7, "{}", r.value);
        assert_eq!(r.status, CertificateStatus::Certified);
    }
}
