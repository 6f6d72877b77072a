//! Replaces non-Clifford diagonal gates by state injection.
//!
//! A diagonal `U` on data qubits `d₁…d_k` consumes `|U⟩ = U|+⟩^{⊗k}` on fresh
//! ancillas `a₁…a_k`: `CNOT dᵢ→aᵢ`, measure every `Z_{aᵢ}` to get the outcome
//! mask `s`, then apply `C_s = diag(u(x)/u(x⊕s))` on the data. For `U` in the
//! third level `C_s` is Clifford; for `T` it is `S^{s}`.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::pauli::{PauliString, MAX_DENSE_QUBITS, MAX_QUBITS};
use crate::stabilizer::CliffordGate;
use crate::state::{h_state, DensityOperator, PhasePolynomialGate};

use super::circuit::{Circuit, CircuitOp};

/// Largest block of `|H⟩` ancillas sampled jointly.
pub const MAX_BLOCK_SIZE: usize = MAX_DENSE_QUBITS;

/// Resource state feeding one group of ancillas.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum SlotKind {
    /// `|H⟩^{⊗k}`.
    HBlock(usize),
    /// `U|+⟩^{⊗k}` for a gate on `k` qubits.
    Resource(#[serde(serialize_with = "display_gate")] PhasePolynomialGate),
}

fn display_gate<S: serde::Serializer>(g: &PhasePolynomialGate, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(g)
}

impl SlotKind {
    pub fn num_qubits(&self) -> usize {
        match self {
            SlotKind::HBlock(k) => *k,
            SlotKind::Resource(g) => g.num_qubits(),
        }
    }

    pub fn resource_state(&self) -> Result<DensityOperator> {
        match self {
            SlotKind::HBlock(k) => h_state().tensor_power(*k),
            SlotKind::Resource(g) => g.resource_state(),
        }
    }
}

impl fmt::Display for SlotKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SlotKind::HBlock(k) => write!(f, "H^{k}"),
            SlotKind::Resource(g) => write!(f, "{g}"),
        }
    }
}

/// Ancillas `first..first + kind.num_qubits()` start in the slot's resource state.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AncillaSlot {
    pub kind: SlotKind,
    pub first: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum StabilizerOp {
    Clifford(CliffordGate),
    /// Pauli measurement; `record` names the classical bit receiving the
    /// outcome (`1` for `-1`).
    Measure { pauli: PauliString, record: Option<usize> },
    /// Applies `corrections[s]` where bit `i` of `s` is record `records[i]`.
    Conditional { records: Vec<usize>, corrections: Vec<Vec<CliffordGate>> },
}

/// Stabilizer circuit on data plus ancillas; contains no non-Clifford gate.
#[derive(Clone, Debug, PartialEq)]
pub struct GadgetizedCircuit {
    pub n_data: usize,
    pub n_ancilla: usize,
    pub ops: Vec<StabilizerOp>,
    pub slots: Vec<AncillaSlot>,
    /// Observable on the data qubits, padded with identities on the ancillas.
    pub observable: PauliString,
    pub n_records: usize,
}

impl GadgetizedCircuit {
    pub fn num_qubits(&self) -> usize {
        self.n_data + self.n_ancilla
    }
}

/// Gadgetizes every `T` and every non-Clifford `GATE`. `T` ancillas are
/// grouped in order into `|H⟩` blocks of at most `block_size`; each gate gets
/// its own slot restricted to the qubits it acts on.
pub fn gadgetize(c: &Circuit, block_size: usize) -> Result<GadgetizedCircuit> {
    if block_size == 0 || block_size > MAX_BLOCK_SIZE {
        return Err(Error::InvalidArgument(format!("block size must be in 1..={MAX_BLOCK_SIZE}")));
    }
    let n_data = c.num_qubits();
    let t_total = c.t_count();
    let mut total = n_data + t_total;
    for op in c.ops() {
        if let CircuitOp::Diagonal(g) = op {
            if !g.is_clifford() {
                total += restrict(g)?.0.len();
            }
        }
    }
    if total > MAX_QUBITS {
        return Err(Error::UnsupportedQubitCount { n: total, min: 1, max: MAX_QUBITS });
    }
    let mut next_h = n_data;
    let mut next_resource = n_data + t_total;
    let mut ops = Vec::new();
    let mut resource_slots = Vec::new();
    let mut n_records = 0;

    let mut inject = |ops: &mut Vec<StabilizerOp>, data: &[usize], first: usize, local: &PhasePolynomialGate| -> Result<()> {
        let k = data.len();
        let records: Vec<usize> = (n_records..n_records + k).collect();
        n_records += k;
        for (i, &d) in data.iter().enumerate() {
            ops.push(StabilizerOp::Clifford(CliffordGate::Cnot(d, first + i)));
        }
        for (i, &r) in records.iter().enumerate() {
            let z = PauliString::from_bits(total, 0, 1 << (first + i), 0)?;
            ops.push(StabilizerOp::Measure { pauli: z, record: Some(r) });
        }
        let mut corrections = Vec::with_capacity(1 << k);
        for s in 0..(1u64 << k) {
            let local_gates = local.correction(s)?;
            corrections.push(local_gates.iter().map(|g| g.remap(data)).collect());
        }
        ops.push(StabilizerOp::Conditional { records, corrections });
        Ok(())
    };

    let mut t_gate = PhasePolynomialGate::identity(1);
    t_gate.add_t(0, 1)?;
    for op in c.ops() {
        match op {
            CircuitOp::Clifford(g) => ops.push(StabilizerOp::Clifford(*g)),
            CircuitOp::Measure(p) => ops.push(StabilizerOp::Measure { pauli: pad(p, total)?, record: None }),
            CircuitOp::T(q) => {
                inject(&mut ops, &[*q], next_h, &t_gate)?;
                next_h += 1;
            }
            CircuitOp::Diagonal(g) => {
                if g.is_clifford() {
                    ops.extend(g.clifford_gates()?.into_iter().map(StabilizerOp::Clifford));
                    continue;
                }
                let (support, local) = restrict(g)?;
                if support.len() > MAX_DENSE_QUBITS {
                    return Err(Error::UnsupportedGate(format!(
                        "{g} acts on {} qubits; at most {MAX_DENSE_QUBITS} supported",
                        support.len()
                    )));
                }
                inject(&mut ops, &support, next_resource, &local)?;
                resource_slots.push(AncillaSlot { kind: SlotKind::Resource(local), first: next_resource });
                next_resource += support.len();
            }
        }
    }
    debug_assert_eq!(next_resource, total);
    let mut slots = Vec::new();
    let mut first = n_data;
    let mut remaining = t_total;
    while remaining > 0 {
        let k = remaining.min(block_size);
        slots.push(AncillaSlot { kind: SlotKind::HBlock(k), first });
        first += k;
        remaining -= k;
    }
    slots.extend(resource_slots);
    Ok(GadgetizedCircuit {
        n_data,
        n_ancilla: total - n_data,
        ops,
        slots,
        observable: pad(c.observable(), total)?,
        n_records,
    })
}

fn pad(p: &PauliString, n: usize) -> Result<PauliString> {
    PauliString::from_bits(n, p.x_bits(), p.z_bits(), p.phase())
}

/// Support of `g` in increasing order and `g` relabelled onto it.
fn restrict(g: &PhasePolynomialGate) -> Result<(Vec<usize>, PhasePolynomialGate)> {
    let mut support: Vec<usize> = g.linear().keys().copied().collect();
    support.extend(g.quadratic().keys().flat_map(|&(a, b)| [a, b]));
    support.extend(g.cubic().iter().flat_map(|&(a, b, c)| [a, b, c]));
    support.sort_unstable();
    support.dedup();
    let pos = |q: usize| support.binary_search(&q).expect("q in support");
    let mut local = PhasePolynomialGate::identity(support.len());
    for (&q, &l) in g.linear() {
        local.add_t(pos(q), l)?;
    }
    for (&(a, b), &k) in g.quadratic() {
        local.add_cs(pos(a), pos(b), k)?;
    }
    for &(a, b, c) in g.cubic() {
        local.add_ccz(pos(a), pos(b), pos(c))?;
    }
    Ok((support, local))
}
