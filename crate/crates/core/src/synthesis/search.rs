//! Bidirectional breadth-first search for a Clifford word mapping one pure
//! state to another up to global phase.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::pauli::pauli_vector_of;
use crate::stabilizer::CliffordGate;
use crate::state::DensityOperator;

pub const DEFAULT_SEARCH_BUDGET: usize = 1_000_000;
pub const MAX_SEARCH_QUBITS: usize = 5;

/// Overlap deficit accepted when verifying a word.
const VERIFY_TOLERANCE: f64 = 1e-10;
/// Amplitude grid for deduplication keys.
const KEY_SCALE: f64 = 1e7;

/// Clifford gates applied left to right.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliffordWord {
    n: usize,
    gates: Vec<CliffordGate>,
}

impl CliffordWord {
    pub fn new(n: usize, gates: Vec<CliffordGate>) -> Result<Self> {
        for g in &gates {
            g.validate(n)?;
        }
        Ok(CliffordWord { n, gates })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn gates(&self) -> &[CliffordGate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn apply_to_vector(&self, v: &mut [Complex64]) {
        for g in &self.gates {
            g.apply_to_vector(v, self.n);
        }
    }

    pub fn to_matrix(&self) -> DMatrix<Complex64> {
        let dim = 1usize << self.n;
        let mut m = DMatrix::identity(dim, dim);
        for g in &self.gates {
            m = g.to_matrix(self.n) * m;
        }
        m
    }

    /// `|⟨target|C|source⟩| ≥ 1 - 1e-10` for unit vectors.
    pub fn maps(&self, source: &[Complex64], target: &[Complex64]) -> bool {
        let mut v = source.to_vec();
        self.apply_to_vector(&mut v);
        overlap(&v, target) >= 1.0 - VERIFY_TOLERANCE
    }
}

impl fmt::Display for CliffordWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.gates.is_empty() {
            return f.write_str("I");
        }
        let parts: Vec<String> = self.gates.iter().map(|g| g.to_string()).collect();
        f.write_str(&parts.join("; "))
    }
}

impl Serialize for CliffordWord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum SearchOutcome {
    Found { word: CliffordWord },
    /// Inequivalence proven by an invariant or by exhausting an orbit.
    Disproved { reason: String },
    /// Budget exhausted; equivalence remains open.
    NotFound { explored: usize },
}

fn overlap(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<Complex64>().norm()
}

/// Sorted `|Tr(Pρ)|` over all Paulis; invariant under Cliffords.
pub fn pauli_spectrum(rho: &DensityOperator) -> Result<Vec<f64>> {
    let mut s: Vec<f64> = pauli_vector_of(rho)?.entries().iter().map(|v| v.abs()).collect();
    s.sort_by(f64::total_cmp);
    Ok(s)
}

fn generators(n: usize) -> Vec<CliffordGate> {
    let mut g = Vec::new();
    for q in 0..n {
        g.extend([
            CliffordGate::H(q),
            CliffordGate::S(q),
            CliffordGate::Sdg(q),
            CliffordGate::SqrtX(q),
            CliffordGate::SqrtXdg(q),
        ]);
    }
    for a in 0..n {
        for b in 0..n {
            if a != b {
                g.push(CliffordGate::Cnot(a, b));
            }
        }
    }
    g
}

/// Phase-invariant 128-bit fingerprint of a unit vector.
fn key(v: &[Complex64]) -> u128 {
    let lead = v.iter().find(|a| a.norm() > 1e-6).copied().unwrap_or(Complex64::new(1.0, 0.0));
    let rot = lead.conj() / lead.norm();
    let grid: Vec<i64> = v
        .iter()
        .flat_map(|a| {
            let b = a * rot;
            [(b.re * KEY_SCALE).round() as i64, (b.im * KEY_SCALE).round() as i64]
        })
        .collect();
    let mut h1 = DefaultHasher::new();
    grid.hash(&mut h1);
    let mut h2 = DefaultHasher::new();
    0x5eed_u64.hash(&mut h2);
    grid.hash(&mut h2);
    ((h1.finish() as u128) << 64) | h2.finish() as u128
}

const ROOT: u32 = u32::MAX;

struct Side {
    index: HashMap<u128, u32>,
    /// `(parent, generator)` per node.
    nodes: Vec<(u32, u16)>,
    frontier: Vec<(u32, Vec<Complex64>)>,
    backward: bool,
}

impl Side {
    fn new(root: Vec<Complex64>, backward: bool) -> Self {
        let mut index = HashMap::new();
        index.insert(key(&root), 0);
        Side { index, nodes: vec![(ROOT, 0)], frontier: vec![(0, root)], backward }
    }

    /// Generators on the path from the root to `node`, in root-first order.
    fn path(&self, mut node: u32) -> Vec<u16> {
        let mut out = Vec::new();
        while self.nodes[node as usize].0 != ROOT {
            out.push(self.nodes[node as usize].1);
            node = self.nodes[node as usize].0;
        }
        out.reverse();
        out
    }
}

/// Searches for `C` with `C|u⟩ ∝ |v⟩`, exploring at most `budget` states.
pub fn clifford_equivalent(u: &DensityOperator, v: &DensityOperator, budget: usize) -> Result<SearchOutcome> {
    let n = u.num_qubits();
    if v.num_qubits() != n {
        return Err(Error::QubitMismatch { left: n, right: v.num_qubits() });
    }
    if n > MAX_SEARCH_QUBITS {
        return Err(Error::UnsupportedQubitCount { n, min: 1, max: MAX_SEARCH_QUBITS });
    }
    if !u.is_pure(1e-9) || !v.is_pure(1e-9) {
        return Err(Error::InvalidDensity("Clifford search needs pure states".into()));
    }
    let su = pauli_spectrum(u)?;
    let sv = pauli_spectrum(v)?;
    if su.iter().zip(&sv).any(|(a, b)| (a - b).abs() > 1e-8) {
        return Ok(SearchOutcome::Disproved { reason: "Pauli spectra differ".into() });
    }
    let uv = u.principal_vector();
    let vv = v.principal_vector();
    if overlap(&uv, &vv) >= 1.0 - VERIFY_TOLERANCE {
        return Ok(SearchOutcome::Found { word: CliffordWord::new(n, vec![])? });
    }

    let gens = generators(n);
    let mut sides = [Side::new(uv.clone(), false), Side::new(vv.clone(), true)];
    let mut explored = 2usize;
    loop {
        let s = if sides[0].frontier.len() <= sides[1].frontier.len() { 0 } else { 1 };
        if sides[s].frontier.is_empty() {
            return Ok(SearchOutcome::Disproved { reason: "Clifford orbit exhausted".into() });
        }
        let frontier = std::mem::take(&mut sides[s].frontier);
        let mut next = Vec::new();
        for (id, state) in frontier {
            for (gi, g) in gens.iter().enumerate() {
                let mut w = state.clone();
                let applied = if sides[s].backward { g.inverse() } else { *g };
                applied.apply_to_vector(&mut w, n);
                let k = key(&w);
                if sides[s].index.contains_key(&k) {
                    continue;
                }
                let node = sides[s].nodes.len() as u32;
                sides[s].nodes.push((id, gi as u16));
                sides[s].index.insert(k, node);
                explored += 1;
                if let Some(&other) = sides[1 - s].index.get(&k) {
                    let (fwd, bwd) = if s == 0 { (node, other) } else { (other, node) };
                    let mut word: Vec<CliffordGate> = sides[0].path(fwd).iter().map(|&i| gens[i as usize]).collect();
                    word.extend(sides[1].path(bwd).iter().rev().map(|&i| gens[i as usize]));
                    let word = CliffordWord::new(n, word)?;
                    if word.maps(&uv, &vv) {
                        return Ok(SearchOutcome::Found { word });
                    }
                }
                if explored >= budget {
                    return Ok(SearchOutcome::NotFound { explored });
                }
                next.push((node, w));
            }
        }
        sides[s].frontier = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::spec::parse_gate_spec;
    use crate::state::{f_state, h_state};

    fn resource(spec: &str) -> DensityOperator {
        parse_gate_spec(spec).unwrap().resource_state().unwrap()
    }

    #[test]
    fn identity_word_for_equal_states() {
        let u = resource("CS_12");
        match clifford_equivalent(&u, &u, 10).unwrap() {
            SearchOutcome::Found { word } => assert!(word.is_empty()),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn h_and_f_are_disproved() {
        let out = clifford_equivalent(&h_state(), &f_state(), 10).unwrap();
        assert!(matches!(out, SearchOutcome::Disproved { .. }));
    }

    #[test]
    fn finds_single_qubit_word() {
        // T|+⟩ and T†|+⟩ differ by a Clifford.
        let out = clifford_equivalent(&resource("T_1"), &h_state(), 1000).unwrap();
        match out {
            SearchOutcome::Found { word } => {
                let u = resource("T_1").principal_vector();
                assert!(word.maps(&u, &h_state().principal_vector()));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn budget_is_reported() {
        let out = clifford_equivalent(&resource("CCZ_123"), &resource("CS_12,13"), 5).unwrap();
        assert!(matches!(out, SearchOutcome::NotFound { explored: 5 }));
    }
}
