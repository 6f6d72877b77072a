//! Diagonal third-level gates on a few qubits grouped by the robustness of
//! their resource states.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::cache::BasisStore;
use crate::error::{Error, Result};
use crate::robustness::rom;
use crate::state::PhasePolynomialGate;

/// Values closer than this share a class.
const CLASS_TOLERANCE: f64 = 1e-6;

/// Best known `T` cost of a three-qubit class, taken from published
/// CNOT+T synthesis results rather than computed here.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LiteratureCost {
    pub value: f64,
    pub t_cost: usize,
    pub gate: &'static str,
    /// A gate of the same class whose direct synthesis costs more.
    pub costlier: Option<(usize, &'static str)>,
}

const THREE_QUBIT_COSTS: [LiteratureCost; 7] = [
    LiteratureCost { value: 1.41421, t_cost: 1, gate: "T_1", costlier: None },
    LiteratureCost { value: 1.74755, t_cost: 2, gate: "T_1,2", costlier: None },
    LiteratureCost { value: 2.2, t_cost: 3, gate: "CS_12", costlier: None },
    LiteratureCost { value: 2.21895, t_cost: 3, gate: "T_1,2,3", costlier: None },
    LiteratureCost { value: 2.55556, t_cost: 4, gate: "CS_12,13", costlier: Some((7, "CCZ_123")) },
    LiteratureCost { value: 2.80061, t_cost: 4, gate: "T_1CS_23", costlier: None },
    LiteratureCost { value: 3.12132, t_cost: 5, gate: "T_1CS_12,13", costlier: Some((6, "T_1CCZ_123")) },
];

/// Literature entry whose tabulated value is within `1e-4` of `value`.
pub fn literature_t_cost(value: f64) -> Option<LiteratureCost> {
    THREE_QUBIT_COSTS.iter().copied().find(|c| (c.value - value).abs() < 1e-4)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassRow {
    pub value: f64,
    /// One representative per qubit-permutation orbit.
    #[serde(serialize_with = "gate_names")]
    pub gates: Vec<PhasePolynomialGate>,
    /// `0` for the Clifford class; tabulated costs for three qubits.
    pub t_cost: Option<usize>,
    pub literature: Option<LiteratureCost>,
}

fn gate_names<S: serde::Serializer>(g: &[PhasePolynomialGate], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(g.iter().map(|g| g.to_string()))
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// Every gate with `T`, `CS` and `CCZ` factors (exponent 0 or 1) on `n`
/// qubits; Clifford factors never change the resource state's robustness.
fn all_gates(n: usize) -> Result<Vec<PhasePolynomialGate>> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    let triples: Vec<(usize, usize, usize)> = (0..n)
        .flat_map(|a| (a + 1..n).flat_map(move |b| (b + 1..n).map(move |c| (a, b, c))))
        .collect();
    let bits = n + pairs.len() + triples.len();
    let mut out = Vec::with_capacity(1 << bits);
    for code in 0u64..(1 << bits) {
        let mut g = PhasePolynomialGate::identity(n);
        for q in 0..n {
            if code >> q & 1 == 1 {
                g.add_t(q, 1)?;
            }
        }
        for (i, &(a, b)) in pairs.iter().enumerate() {
            if code >> (n + i) & 1 == 1 {
                g.add_cs(a, b, 1)?;
            }
        }
        for (i, &(a, b, c)) in triples.iter().enumerate() {
            if code >> (n + pairs.len() + i) & 1 == 1 {
                g.add_ccz(a, b, c)?;
            }
        }
        out.push(g);
    }
    Ok(out)
}

/// Groups all diagonal third-level gates on `n ∈ {3, 4}` qubits by
/// robustness, one LP per permutation orbit. Rows are sorted by value and
/// include the Clifford class.
pub fn classification_table(n: usize, store: &BasisStore) -> Result<Vec<ClassRow>> {
    if !(3..=4).contains(&n) {
        return Err(Error::UnsupportedQubitCount { n, min: 3, max: 4 });
    }
    let perms = permutations(n);
    let mut reps = BTreeSet::new();
    for g in all_gates(n)? {
        let canon = perms
            .iter()
            .map(|p| g.permuted(p))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .min()
            .expect("at least one permutation");
        reps.insert(canon);
    }
    let basis = store.get(n)?;
    let mut valued = Vec::with_capacity(reps.len());
    for g in reps {
        let v = rom(&g.resource_state()?, &basis)?.value;
        valued.push((v, g));
    }
    valued.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.naive_t_count().cmp(&b.1.naive_t_count())));
    let mut rows: Vec<ClassRow> = Vec::new();
    for (v, g) in valued {
        match rows.last_mut() {
            Some(row) if (v - row.value).abs() <= CLASS_TOLERANCE => row.gates.push(g),
            _ => rows.push(ClassRow { value: v, gates: vec![g], t_cost: None, literature: None }),
        }
    }
    for row in rows.iter_mut() {
        if row.gates.iter().any(|g| g.is_identity()) {
            row.t_cost = Some(0);
        } else if n == 3 {
            row.literature = literature_t_cost(row.value);
            row.t_cost = row.literature.map(|l| l.t_cost);
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permutation_count() {
        assert_eq!(permutations(3).len(), 6);
        assert_eq!(permutations(4).len(), 24);
    }

    #[test]
    fn gate_enumeration_size() {
        assert_eq!(all_gates(3).unwrap().len(), 128);
    }
}
