//! Circuits of Clifford gates, Pauli measurements and diagonal gates from the
//! third level of the Clifford hierarchy.
//!
//! Text format, one operation per line, qubits 1-based:
//!
//! ```text
//! qubits <n>                 first non-comment line
//! H q | S q | SDG q | X q | Y q | Z q | SQRTX q | SQRTXDG q
//! CNOT c t | CZ a b | SWAP a b
//! T q
//! GATE <gate spec>           e.g. GATE CCZ_123 or GATE T_1 CS_23
//! MEASURE <pauli>            n letters, optional sign; outcome averaged over
//! OBSERVE <pauli>            last operation, exactly once
//! ```
//!
//! `#` starts a comment; blank lines are ignored. Keywords are case-insensitive.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::pauli::{PauliString, MAX_QUBITS};
use crate::stabilizer::CliffordGate;
use crate::state::spec::parse_gate_spec;
use crate::state::PhasePolynomialGate;

#[derive(Clone, Debug, PartialEq)]
pub enum CircuitOp {
    Clifford(CliffordGate),
    /// Mid-circuit Pauli measurement; the estimated quantity averages over its outcomes.
    Measure(PauliString),
    T(usize),
    /// Diagonal gate on the full data register.
    Diagonal(PhasePolynomialGate),
}

/// `C₁U₁C₂…` on `n_data` qubits followed by measurement of `observable`.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    n_data: usize,
    ops: Vec<CircuitOp>,
    observable: PauliString,
}

impl Circuit {
    pub fn new(n_data: usize, ops: Vec<CircuitOp>, observable: PauliString) -> Result<Self> {
        if n_data == 0 || n_data > MAX_QUBITS {
            return Err(Error::UnsupportedQubitCount { n: n_data, min: 1, max: MAX_QUBITS });
        }
        check_pauli(&observable, n_data)?;
        for op in &ops {
            match op {
                CircuitOp::Clifford(g) => g.validate(n_data)?,
                CircuitOp::Measure(p) => check_pauli(p, n_data)?,
                CircuitOp::T(q) => {
                    if *q >= n_data {
                        return Err(Error::InvalidQubit { qubit: *q, n: n_data });
                    }
                }
                CircuitOp::Diagonal(g) => {
                    if g.num_qubits() != n_data {
                        return Err(Error::QubitMismatch { left: n_data, right: g.num_qubits() });
                    }
                }
            }
        }
        Ok(Circuit { n_data, ops, observable })
    }

    pub fn num_qubits(&self) -> usize {
        self.n_data
    }

    pub fn ops(&self) -> &[CircuitOp] {
        &self.ops
    }

    pub fn observable(&self) -> &PauliString {
        &self.observable
    }

    /// Number of `T` operations, not counting `T` factors inside `GATE` lines.
    pub fn t_count(&self) -> usize {
        self.ops.iter().filter(|op| matches!(op, CircuitOp::T(_))).count()
    }

    pub fn is_stabilizer(&self) -> bool {
        self.ops.iter().all(|op| match op {
            CircuitOp::Clifford(_) | CircuitOp::Measure(_) => true,
            CircuitOp::T(_) => false,
            CircuitOp::Diagonal(g) => g.is_clifford(),
        })
    }
}

fn check_pauli(p: &PauliString, n: usize) -> Result<()> {
    if p.num_qubits() != n {
        return Err(Error::QubitMismatch { left: n, right: p.num_qubits() });
    }
    if !p.is_hermitian() {
        return Err(Error::NotHermitian(p.to_string()));
    }
    Ok(())
}

pub fn parse_circuit(text: &str) -> Result<Circuit> {
    let err = |line: usize, message: String| Error::Circuit { line, message };
    let mut n_data: Option<usize> = None;
    let mut ops = Vec::new();
    let mut observable: Option<(usize, PauliString)> = None;

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (keyword, rest) = match line.split_once(char::is_whitespace) {
            Some((k, r)) => (k.to_ascii_uppercase(), r.trim()),
            None => (line.to_ascii_uppercase(), ""),
        };
        let Some(n) = n_data else {
            if keyword != "QUBITS" {
                return Err(err(line_no, "expected 'qubits <n>' header".into()));
            }
            let n: usize = rest.parse().map_err(|_| err(line_no, format!("invalid qubit count '{rest}'")))?;
            if n == 0 || n > MAX_QUBITS {
                return Err(err(line_no, format!("qubit count must be in 1..={MAX_QUBITS}")));
            }
            n_data = Some(n);
            continue;
        };
        if observable.is_some() {
            return Err(err(line_no, "operations after OBSERVE".into()));
        }
        let qubits = |count: usize| -> Result<Vec<usize>> {
            let parts: Vec<&str> = rest.split_whitespace().collect();
            if parts.len() != count {
                return Err(err(line_no, format!("{keyword} takes {count} qubit argument(s)")));
            }
            let mut out = Vec::with_capacity(count);
            for p in parts {
                let q: usize = p.parse().map_err(|_| err(line_no, format!("invalid qubit '{p}'")))?;
                if q == 0 || q > n {
                    return Err(err(line_no, format!("qubit {q} outside 1..={n}")));
                }
                if out.contains(&(q - 1)) {
                    return Err(err(line_no, format!("qubit {q} repeated")));
                }
                out.push(q - 1);
            }
            Ok(out)
        };
        let pauli = || -> Result<PauliString> {
            let p = PauliString::from_str(rest).map_err(|e| err(line_no, e.to_string()))?;
            check_pauli(&p, n).map_err(|e| err(line_no, e.to_string()))?;
            Ok(p)
        };
        use CliffordGate as G;
        let op = match keyword.as_str() {
            "QUBITS" => return Err(err(line_no, "duplicate header".into())),
            "H" => CircuitOp::Clifford(G::H(qubits(1)?[0])),
            "S" => CircuitOp::Clifford(G::S(qubits(1)?[0])),
            "SDG" => CircuitOp::Clifford(G::Sdg(qubits(1)?[0])),
            "X" => CircuitOp::Clifford(G::X(qubits(1)?[0])),
            "Y" => CircuitOp::Clifford(G::Y(qubits(1)?[0])),
            "Z" => CircuitOp::Clifford(G::Z(qubits(1)?[0])),
            "SQRTX" => CircuitOp::Clifford(G::SqrtX(qubits(1)?[0])),
            "SQRTXDG" => CircuitOp::Clifford(G::SqrtXdg(qubits(1)?[0])),
            "CNOT" => {
                let q = qubits(2)?;
                CircuitOp::Clifford(G::Cnot(q[0], q[1]))
            }
            "CZ" => {
                let q = qubits(2)?;
                CircuitOp::Clifford(G::Cz(q[0], q[1]))
            }
            "SWAP" => {
                let q = qubits(2)?;
                CircuitOp::Clifford(G::Swap(q[0], q[1]))
            }
            "T" => CircuitOp::T(qubits(1)?[0]),
            "GATE" => {
                let g = parse_gate_spec(rest).map_err(|e| err(line_no, e.to_string()))?;
                if g.num_qubits() > n {
                    return Err(err(line_no, format!("gate acts on qubit {} of {n}", g.num_qubits())));
                }
                let positions: Vec<usize> = (0..g.num_qubits()).collect();
                CircuitOp::Diagonal(g.embed(n, &positions)?)
            }
            "MEASURE" => CircuitOp::Measure(pauli()?),
            "OBSERVE" => {
                observable = Some((line_no, pauli()?));
                continue;
            }
            other => return Err(err(line_no, format!("unknown operation '{other}'"))),
        };
        ops.push(op);
    }
    let n = n_data.ok_or_else(|| err(0, "missing 'qubits <n>' header".into()))?;
    let (_, observable) = observable.ok_or_else(|| err(0, "missing OBSERVE line".into()))?;
    Circuit::new(n, ops, observable)
}

impl FromStr for Circuit {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_circuit(s)
    }
}

impl fmt::Display for Circuit {
    /// Writes the text format; parsing the output yields an equal circuit.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "qubits {}", self.n_data)?;
        for op in &self.ops {
            match op {
                CircuitOp::Clifford(g) => writeln!(f, "{g}")?,
                CircuitOp::Measure(p) => writeln!(f, "MEASURE {p}")?,
                CircuitOp::T(q) => writeln!(f, "T {}", q + 1)?,
                CircuitOp::Diagonal(g) => writeln!(f, "GATE {g}")?,
            }
        }
        writeln!(f, "OBSERVE {}", self.observable)
    }
}
