//! Exact dense action of stabilizer channels.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::{PauliString, MAX_DENSE_QUBITS};
use crate::stabilizer::{CliffordGate, StabilizerTableau};

use super::DensityOperator;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeasureMode {
    /// Average over both outcomes (trace preserving).
    KeepBoth,
    /// Keep only the given outcome (`±1`) and renormalise.
    Postselect(i8),
}

/// Building blocks of stabilizer channels.
#[derive(Clone, Debug, PartialEq)]
pub enum ChannelOp {
    Clifford(CliffordGate),
    Measure { pauli: PauliString, mode: MeasureMode },
    /// Appends a stabilizer state on new trailing qubits.
    AppendAncilla(StabilizerTableau),
    /// Traces out one qubit; later qubits shift down by one.
    Discard(usize),
    /// Measures `pauli` and applies `on_minus` when the outcome is `-1`,
    /// averaging over outcomes.
    Controlled { pauli: PauliString, on_minus: Vec<CliffordGate> },
}

impl ChannelOp {
    pub fn is_trace_preserving(&self) -> bool {
        !matches!(self, ChannelOp::Measure { mode: MeasureMode::Postselect(_), .. })
    }
}

/// Applies `ops` in order. Returns the output state and the probability of
/// the postselected branch (1 for trace-preserving sequences).
pub fn apply_stabilizer_channel(rho: &DensityOperator, ops: &[ChannelOp]) -> Result<(DensityOperator, f64)> {
    let mut m = rho.matrix().clone();
    let mut n = rho.num_qubits();
    let mut prob = 1.0;
    for op in ops {
        match op {
            ChannelOp::Clifford(g) => {
                g.validate(n)?;
                let u = g.to_matrix(n);
                m = &u * &m * u.adjoint();
            }
            ChannelOp::Measure { pauli, mode } => {
                let (plus, minus) = projectors(pauli, n)?;
                match mode {
                    MeasureMode::KeepBoth => {
                        m = &plus * &m * &plus + &minus * &m * &minus;
                    }
                    MeasureMode::Postselect(s) => {
                        let p = if *s >= 0 { plus } else { minus };
                        m = &p * &m * &p;
                        let tr = m.trace().re;
                        if tr <= 1e-14 {
                            return Err(Error::InvalidArgument(format!("postselected outcome of {pauli} has zero probability")));
                        }
                        prob *= tr;
                        m /= Complex64::new(tr, 0.0);
                    }
                }
            }
            ChannelOp::AppendAncilla(t) => {
                let k = t.num_qubits();
                if n + k > MAX_DENSE_QUBITS {
                    return Err(Error::UnsupportedQubitCount { n: n + k, min: 1, max: MAX_DENSE_QUBITS });
                }
                let v = t.state_vector()?;
                let dim = v.len();
                let anc = DMatrix::from_fn(dim, dim, |i, j| v[i] * v[j].conj());
                m = m.kronecker(&anc);
                n += k;
            }
            ChannelOp::Discard(q) => {
                if *q >= n {
                    return Err(Error::InvalidQubit { qubit: *q, n });
                }
                if n == 1 {
                    return Err(Error::InvalidArgument("cannot discard the last qubit".into()));
                }
                m = partial_trace(&m, n, *q);
                n -= 1;
            }
            ChannelOp::Controlled { pauli, on_minus } => {
                let (plus, minus) = projectors(pauli, n)?;
                let mut branch = &minus * &m * &minus;
                for g in on_minus {
                    g.validate(n)?;
                    let u = g.to_matrix(n);
                    branch = &u * &branch * u.adjoint();
                }
                m = &plus * &m * &plus + branch;
            }
        }
    }
    Ok((DensityOperator::from_trusted(m)?, prob))
}

fn projectors(p: &PauliString, n: usize) -> Result<(DMatrix<Complex64>, DMatrix<Complex64>)> {
    if p.num_qubits() != n {
        return Err(Error::QubitMismatch { left: n, right: p.num_qubits() });
    }
    if !p.is_hermitian() {
        return Err(Error::NotHermitian(p.to_string()));
    }
    let dim = 1usize << n;
    let id = DMatrix::<Complex64>::identity(dim, dim);
    let pm = p.to_matrix();
    let half = Complex64::new(0.5, 0.0);
    Ok(((&id + &pm) * half, (&id - &pm) * half))
}

/// Traces out qubit `q` of an `n`-qubit operator.
pub(crate) fn partial_trace(m: &DMatrix<Complex64>, n: usize, q: usize) -> DMatrix<Complex64> {
    let dim = 1usize << (n - 1);
    let bit = n - 1 - q;
    let expand = |i: usize, b: usize| {
        let high = (i >> bit) << (bit + 1);
        let low = i & ((1 << bit) - 1);
        high | (b << bit) | low
    };
    DMatrix::from_fn(dim, dim, |i, j| m[(expand(i, 0), expand(j, 0))] + m[(expand(i, 1), expand(j, 1))])
}
