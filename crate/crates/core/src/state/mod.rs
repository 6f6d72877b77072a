//! Dense density operators and the named states used throughout the toolkit.

pub mod channel;
mod gate;
pub mod spec;

pub use channel::{apply_stabilizer_channel, ChannelOp, MeasureMode};
pub use gate::PhasePolynomialGate;
pub use spec::{parse_state_spec, JamTarget, StateSpec, StateTerm};

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::{PauliString, MAX_DENSE_QUBITS};
use crate::stabilizer::CliffordGate;

const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const EIGEN_TOL: f64 = 1e-10;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// A trace-one positive semidefinite operator on `n ≤ 5` qubits.
/// Basis index bit `n-1-q` holds qubit `q`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    n: usize,
    matrix: DMatrix<Complex64>,
}

impl DensityOperator {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        let n = Self::qubits_for(&matrix)?;
        let herm = (&matrix - matrix.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if herm > HERMITIAN_TOL {
            return Err(Error::InvalidDensity(format!("not Hermitian (deviation {herm:.3e})")));
        }
        let tr = matrix.trace();
        if (tr - c(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(Error::InvalidDensity(format!("trace {tr} differs from 1")));
        }
        let min_eig = SymmetricEigen::new(matrix.clone()).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        if min_eig < -EIGEN_TOL {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {min_eig:.3e}")));
        }
        Ok(DensityOperator { n, matrix })
    }

    fn qubits_for(matrix: &DMatrix<Complex64>) -> Result<usize> {
        let dim = matrix.nrows();
        if dim != matrix.ncols() || !dim.is_power_of_two() || dim < 2 {
            return Err(Error::InvalidDensity(format!(
                "expected a square power-of-two matrix, got {}×{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let n = dim.trailing_zeros() as usize;
        if n > MAX_DENSE_QUBITS {
            return Err(Error::UnsupportedQubitCount { n, min: 1, max: MAX_DENSE_QUBITS });
        }
        Ok(n)
    }

    /// Hermitises and renormalises the trace of an operator produced by exact
    /// manipulations, removing floating point drift.
    pub(crate) fn from_trusted(mut matrix: DMatrix<Complex64>) -> Result<Self> {
        let n = Self::qubits_for(&matrix)?;
        matrix = (&matrix + matrix.adjoint()) * c(0.5, 0.0);
        let tr = matrix.trace().re;
        if tr <= 0.0 {
            return Err(Error::InvalidDensity(format!("trace {tr} is not positive")));
        }
        matrix /= c(tr, 0.0);
        Ok(DensityOperator { n, matrix })
    }

    /// `|ψ⟩⟨ψ|` for a nonzero amplitude vector, normalised.
    pub fn from_pure(amplitudes: &[Complex64]) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidDensity("zero or non-finite state vector".into()));
        }
        let dim = amplitudes.len();
        let v: Vec<Complex64> = amplitudes.iter().map(|a| a / norm).collect();
        let m = DMatrix::from_fn(dim, dim, |i, j| v[i] * v[j].conj());
        Self::from_trusted(m)
    }

    pub fn maximally_mixed(n: usize) -> Result<Self> {
        let dim = 1usize << n;
        Self::from_trusted(DMatrix::identity(dim, dim))
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.matrix
    }

    /// `Tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn is_pure(&self, tol: f64) -> bool {
        (self.purity() - 1.0).abs() <= tol
    }

    /// Leading eigenvector with the first significant amplitude real positive.
    pub fn principal_vector(&self) -> Vec<Complex64> {
        let eig = SymmetricEigen::new(self.matrix.clone());
        let (k, _) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, &v)| if v > best.1 { (i, v) } else { best });
        let mut v: Vec<Complex64> = eig.eigenvectors.column(k).iter().copied().collect();
        crate::stabilizer::normalise_with_phase(&mut v);
        v
    }

    /// `Tr(Pρ)`; real for Hermitian `P`.
    pub fn expectation(&self, p: &PauliString) -> Result<f64> {
        if p.num_qubits() != self.n {
            return Err(Error::QubitMismatch { left: self.n, right: p.num_qubits() });
        }
        Ok(p.trace_with(&self.matrix).re)
    }

    /// `self ⊗ other`.
    pub fn tensor(&self, other: &DensityOperator) -> Result<Self> {
        let n = self.n + other.n;
        if n > MAX_DENSE_QUBITS {
            return Err(Error::UnsupportedQubitCount { n, min: 1, max: MAX_DENSE_QUBITS });
        }
        Ok(DensityOperator { n, matrix: self.matrix.kronecker(&other.matrix) })
    }

    /// `ρ^{⊗t}`.
    pub fn tensor_power(&self, t: usize) -> Result<Self> {
        if t == 0 {
            return Err(Error::InvalidArgument("tensor power must be at least 1".into()));
        }
        let mut acc = self.clone();
        for _ in 1..t {
            acc = acc.tensor(self)?;
        }
        Ok(acc)
    }

    /// Convex combination `Σ p_k ρ_k`.
    pub fn mixture(parts: &[(f64, DensityOperator)]) -> Result<Self> {
        let first = parts.first().ok_or_else(|| Error::InvalidArgument("empty mixture".into()))?;
        let dim = first.1.dim();
        let mut total = 0.0;
        let mut m = DMatrix::zeros(dim, dim);
        for (p, rho) in parts {
            if rho.n != first.1.n {
                return Err(Error::QubitMismatch { left: first.1.n, right: rho.n });
            }
            if *p < 0.0 {
                return Err(Error::InvalidArgument(format!("negative weight {p}")));
            }
            total += p;
            m += &rho.matrix * c(*p, 0.0);
        }
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!("weights sum to {total}, not 1")));
        }
        Self::from_trusted(m)
    }

    /// `UρU†` for a unitary `U`.
    pub fn conjugated(&self, u: &DMatrix<Complex64>) -> Result<Self> {
        if u.nrows() != self.dim() || u.ncols() != self.dim() {
            return Err(Error::InvalidArgument(format!(
                "unitary of size {}×{} on a {}-qubit state",
                u.nrows(),
                u.ncols(),
                self.n
            )));
        }
        Self::from_trusted(u * &self.matrix * u.adjoint())
    }

    pub fn apply_clifford(&self, gate: &CliffordGate) -> Result<Self> {
        gate.validate(self.n)?;
        self.conjugated(&gate.to_matrix(self.n))
    }

    /// Bloch vector `(⟨X⟩, ⟨Y⟩, ⟨Z⟩)` of a single-qubit state.
    pub fn bloch_vector(&self) -> Result<[f64; 3]> {
        if self.n != 1 {
            return Err(Error::QubitMismatch { left: 1, right: self.n });
        }
        let m = &self.matrix;
        Ok([2.0 * m[(0, 1)].re, -2.0 * m[(0, 1)].im, (m[(0, 0)] - m[(1, 1)]).re])
    }
}

/// `½(I + r·σ)` for `‖r‖₂ ≤ 1`.
pub fn bloch_state(r: [f64; 3]) -> Result<DensityOperator> {
    let norm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !norm.is_finite() || norm > 1.0 + 1e-12 {
        return Err(Error::BlochOutOfRange { norm });
    }
    let m = DMatrix::from_row_slice(
        2,
        2,
        &[
            c(0.5 * (1.0 + r[2]), 0.0),
            c(0.5 * r[0], -0.5 * r[1]),
            c(0.5 * r[0], 0.5 * r[1]),
            c(0.5 * (1.0 - r[2]), 0.0),
        ],
    );
    DensityOperator::from_trusted(m)
}

/// `½(I + r(X+Z)/√2)`.
pub fn rho_h(r: f64) -> Result<DensityOperator> {
    if r.abs() > 1.0 + 1e-12 {
        return Err(Error::BlochOutOfRange { norm: r.abs() });
    }
    bloch_state([r * FRAC_1_SQRT_2, 0.0, r * FRAC_1_SQRT_2])
}

/// `½(I + r(X+Y+Z)/√3)`.
pub fn rho_f(r: f64) -> Result<DensityOperator> {
    if r.abs() > 1.0 + 1e-12 {
        return Err(Error::BlochOutOfRange { norm: r.abs() });
    }
    let s = r / 3f64.sqrt();
    bloch_state([s, s, s])
}

/// `(|0⟩ + e^{iθ}|1⟩)/√2`.
pub fn equatorial(theta: f64) -> Result<DensityOperator> {
    DensityOperator::from_pure(&[c(1.0, 0.0), Complex64::from_polar(1.0, theta)])
}

/// `(1, …, 1, e^{iθ})/2^{m/2}`: the resource state of a controlled phase on
/// `m` qubits. `θ = π/4, π/2, π` give `T`, `CS` and `CCZ` for `m = 1, 2, 3`.
pub fn phase_family(m: usize, theta: f64) -> Result<DensityOperator> {
    if m == 0 || m > MAX_DENSE_QUBITS {
        return Err(Error::UnsupportedQubitCount { n: m, min: 1, max: MAX_DENSE_QUBITS });
    }
    let mut v = vec![c(1.0, 0.0); 1 << m];
    v[(1 << m) - 1] = Complex64::from_polar(1.0, theta);
    DensityOperator::from_pure(&v)
}

/// `|H⟩ = (|0⟩ + e^{iπ/4}|1⟩)/√2`.
pub fn h_state() -> DensityOperator {
    equatorial(PI / 4.0).expect("valid state")
}

/// The pure state with Bloch vector `(1,1,1)/√3`.
pub fn f_state() -> DensityOperator {
    rho_f(1.0).expect("valid state")
}

pub fn hoggar_state() -> DensityOperator {
    DensityOperator::from_pure(&[
        c(1.0, 1.0),
        c(0.0, 0.0),
        c(-1.0, 0.0),
        c(1.0, 0.0),
        c(0.0, -1.0),
        c(1.0, 0.0),
        c(0.0, 0.0),
        c(0.0, 0.0),
    ])
    .expect("valid state")
}

/// Normalised `(1 ⊗ U) Σ_j |j, j⟩` for a unitary `U` on `n ≤ 2` qubits.
pub fn jamiolkowski_state(u: &DMatrix<Complex64>) -> Result<DensityOperator> {
    let d = u.nrows();
    if d != u.ncols() || !d.is_power_of_two() || d < 2 {
        return Err(Error::InvalidArgument(format!("expected a square power-of-two unitary, got {}×{}", u.nrows(), u.ncols())));
    }
    let n = d.trailing_zeros() as usize;
    if 2 * n > MAX_DENSE_QUBITS {
        return Err(Error::UnsupportedQubitCount { n: 2 * n, min: 1, max: MAX_DENSE_QUBITS });
    }
    let unitarity = (u.adjoint() * u - DMatrix::<Complex64>::identity(d, d)).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if unitarity > 1e-9 {
        return Err(Error::InvalidArgument(format!("matrix is not unitary (deviation {unitarity:.3e})")));
    }
    let mut v = vec![c(0.0, 0.0); d * d];
    for j in 0..d {
        for k in 0..d {
            v[j * d + k] = u[(k, j)];
        }
    }
    DensityOperator::from_pure(&v)
}

/// The single-qubit unitary maximising Jamiołkowski robustness,
/// `[[1, e^{3iπ/4}], [e^{iπ/4}, 1]]/√2`.
pub fn optimal_unitary_one_qubit() -> DMatrix<Complex64> {
    let h = FRAC_1_SQRT_2;
    DMatrix::from_row_slice(
        2,
        2,
        &[
            c(h, 0.0),
            Complex64::from_polar(h, 3.0 * PI / 4.0),
            Complex64::from_polar(h, PI / 4.0),
            c(h, 0.0),
        ],
    )
}

/// The two-qubit unitary maximising Jamiołkowski robustness.
pub fn optimal_unitary_two_qubit() -> DMatrix<Complex64> {
    let z = c(0.0, 0.0);
    let rows = [
        [c(-1.0, -2.0), c(3.0, 1.0), c(1.0, -3.0), z],
        [c(1.0, -3.0), c(-3.0, -1.0), c(-1.0, -2.0), z],
        [c(3.0, 1.0), c(1.0, 2.0), c(-3.0, -1.0), z],
        [z, z, z, c(5.0, 0.0)],
    ];
    DMatrix::from_fn(4, 4, |i, j| rows[i][j] / 5.0)
}
