//! Canonical enumeration of pure stabilizer states.
//!
//! Every stabilizer group has a unique generator matrix of the form
//! `[V | B V'] ⊕ [0 | U]`: the X-parts `v_i` are the reduced row echelon basis
//! of the group's X-projection with pivots `p_i`, the Z-parts of those rows
//! are restricted to the pivot columns (`Σ_j B_ij e_{p_j}`, `B` symmetric),
//! and the pure-Z rows `u_f = e_f + Σ_i (v_i)_f e_{p_i}` span the annihilator
//! of the X-projection. Iterating over projections, symmetric `B` and sign
//! patterns therefore visits each state exactly once.

use crate::error::{Error, Result};
use crate::pauli::{PauliString, MAX_DENSE_QUBITS};

use super::StabilizerTableau;

/// `|S_n| = 2^n ∏_{j=1..n} (2^j + 1)`.
pub fn stabilizer_state_count(n: usize) -> u64 {
    (1..=n as u32).fold(1u64 << n, |acc, j| acc * ((1u64 << j) + 1))
}

/// Position of a state in the canonical enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StabilizerStateId {
    pub n: usize,
    pub index: usize,
}

/// The unsigned generator sets (maximal isotropic subspaces) of all stabilizer
/// groups on `n` qubits, in canonical order. State `index` uses subspace
/// `index >> n` with sign pattern `index & (2^n - 1)`: bit `i` set negates
/// generator `i`.
#[derive(Clone, Debug)]
pub struct StabilizerEnumeration {
    n: usize,
    subspaces: Vec<Vec<PauliString>>,
}

impl StabilizerEnumeration {
    pub fn new(n: usize) -> Result<Self> {
        if !(1..=MAX_DENSE_QUBITS).contains(&n) {
            return Err(Error::UnsupportedQubitCount { n, min: 1, max: MAX_DENSE_QUBITS });
        }
        let mut subspaces = Vec::new();
        for k in (0..=n).rev() {
            for pivots in combinations(n, k) {
                push_projection(n, &pivots, &mut subspaces);
            }
        }
        debug_assert_eq!((subspaces.len() as u64) << n, stabilizer_state_count(n));
        Ok(StabilizerEnumeration { n, subspaces })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    /// Number of states, `|S_n|`.
    pub fn len(&self) -> usize {
        self.subspaces.len() << self.n
    }

    pub fn is_empty(&self) -> bool {
        self.subspaces.is_empty()
    }

    /// Unsigned generators of every maximal isotropic subspace, in order.
    pub fn subspaces(&self) -> &[Vec<PauliString>] {
        &self.subspaces
    }

    /// True when the state's generators are all single-qubit Paulis.
    pub fn is_product(&self, index: usize) -> bool {
        self.subspaces[index >> self.n].iter().all(|g| g.weight() == 1)
    }

    /// Signed generators of state `index`.
    pub fn generators(&self, index: usize) -> Result<Vec<PauliString>> {
        if index >= self.len() {
            return Err(Error::InvalidArgument(format!(
                "stabilizer state index {index} out of range ({} states)",
                self.len()
            )));
        }
        let signs = index & ((1 << self.n) - 1);
        Ok(self.subspaces[index >> self.n]
            .iter()
            .enumerate()
            .map(|(i, g)| if (signs >> i) & 1 == 1 { g.negated() } else { *g })
            .collect())
    }

    pub fn tableau(&self, index: usize) -> Result<StabilizerTableau> {
        StabilizerTableau::from_generators(self.generators(index)?)
    }

    pub fn iter(&self) -> impl Iterator<Item = StabilizerTableau> + '_ {
        (0..self.len()).map(move |i| self.tableau(i).expect("enumerated generators are valid"))
    }

    pub fn id(&self, index: usize) -> StabilizerStateId {
        StabilizerStateId { n: self.n, index }
    }
}

/// Ordered stream of all `n`-qubit stabilizer states.
pub fn enumerate_stabilizer_states(n: usize) -> Result<impl Iterator<Item = StabilizerTableau>> {
    let e = StabilizerEnumeration::new(n)?;
    Ok((0..e.len()).map(move |i| e.tableau(i).expect("enumerated generators are valid")))
}

/// `k`-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

/// Appends all subspaces whose X-projection has the given RREF pivots.
fn push_projection(n: usize, pivots: &[usize], out: &mut Vec<Vec<PauliString>>) {
    let k = pivots.len();
    let is_pivot = |c: usize| pivots.contains(&c);
    // Free positions of row i: non-pivot columns to the right of its pivot.
    let free: Vec<Vec<usize>> =
        pivots.iter().map(|&p| (p + 1..n).filter(|&c| !is_pivot(c)).collect()).collect();
    let free_bits: usize = free.iter().map(Vec::len).sum();
    let non_pivots: Vec<usize> = (0..n).filter(|&c| !is_pivot(c)).collect();
    let sym_bits = k * (k + 1) / 2;

    for assign in 0u64..(1u64 << free_bits) {
        let mut rows: Vec<u64> = pivots.iter().map(|&p| 1u64 << p).collect();
        let mut bit = 0;
        for (i, cols) in free.iter().enumerate() {
            for &c in cols {
                if (assign >> bit) & 1 == 1 {
                    rows[i] |= 1 << c;
                }
                bit += 1;
            }
        }
        let z_rows: Vec<u64> = non_pivots
            .iter()
            .map(|&f| {
                let mut u = 1u64 << f;
                for (i, &p) in pivots.iter().enumerate() {
                    if (rows[i] >> f) & 1 == 1 {
                        u |= 1 << p;
                    }
                }
                u
            })
            .collect();
        for sym in 0u64..(1u64 << sym_bits) {
            let mut b = vec![0u64; k];
            let mut bit = 0;
            for i in 0..k {
                for j in i..k {
                    if (sym >> bit) & 1 == 1 {
                        b[i] |= 1 << pivots[j];
                        b[j] |= 1 << pivots[i];
                    }
                    bit += 1;
                }
            }
            let mut gens: Vec<PauliString> = rows
                .iter()
                .zip(&b)
                .map(|(&x, &z)| PauliString::from_bits_unchecked(n, x, z, 0))
                .collect();
            gens.extend(z_rows.iter().map(|&z| PauliString::from_bits_unchecked(n, 0, z, 0)));
            out.push(gens);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn counts_match_formula() {
        assert_eq!(
            (1..=5).map(stabilizer_state_count).collect::<Vec<_>>(),
            vec![6, 60, 1080, 36720, 2423520]
        );
        for n in 1..=4 {
            assert_eq!(StabilizerEnumeration::new(n).unwrap().len() as u64, stabilizer_state_count(n));
        }
    }

    #[test]
    fn single_qubit_order() {
        let e = StabilizerEnumeration::new(1).unwrap();
        let gens: Vec<String> = (0..6).map(|i| e.generators(i).unwrap()[0].to_string()).collect();
        assert_eq!(gens, ["+X", "-X", "+Y", "-Y", "+Z", "-Z"]);
    }

    #[test]
    fn out_of_range() {
        assert!(StabilizerEnumeration::new(0).is_err());
        assert!(StabilizerEnumeration::new(6).is_err());
        assert!(StabilizerEnumeration::new(1).unwrap().generators(6).is_err());
    }

    #[test]
    fn n2_states_are_valid_and_distinct() {
        let mut seen = HashSet::new();
        for t in enumerate_stabilizer_states(2).unwrap() {
            let v = t.state_vector().unwrap();
            let norm: f64 = v.iter().map(|a| a.norm_sqr()).sum();
            assert!((norm - 1.0).abs() < 1e-12);
            for g in t.stabilizers() {
                let gv = g.apply_to_vector(&v);
                let diff: f64 = gv.iter().zip(&v).map(|(a, b)| (a - b).norm()).sum();
                assert!(diff < 1e-12);
            }
            let key: Vec<(i64, i64)> =
                v.iter().map(|a| ((a.re * 1e8).round() as i64, (a.im * 1e8).round() as i64)).collect();
            assert!(seen.insert(key));
        }
        assert_eq!(seen.len(), 60);
    }

    #[test]
    fn n3_states_distinct() {
        let e = StabilizerEnumeration::new(3).unwrap();
        let groups: HashSet<Vec<(u64, u64, u8)>> = (0..e.len())
            .map(|i| {
                let mut els: Vec<_> = e
                    .tableau(i)
                    .unwrap()
                    .group_elements()
                    .iter()
                    .map(|p| (p.x_bits(), p.z_bits(), p.phase()))
                    .collect();
                els.sort_unstable();
                els
            })
            .collect();
        assert_eq!(groups.len(), 1080);
    }

    #[test]
    fn product_state_detection() {
        let e = StabilizerEnumeration::new(2).unwrap();
        assert_eq!((0..e.len()).filter(|&i| e.is_product(i)).count(), 36);
    }
}
