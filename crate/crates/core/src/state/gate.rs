use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::MAX_QUBITS;
use crate::stabilizer::CliffordGate;

use super::DensityOperator;

/// Diagonal gate `|x⟩ ↦ e^{iπ a(x)/4}|x⟩` from the third level of the Clifford
/// hierarchy, with
/// `a(x) = Σ l_i x_i + 2 Σ q_ij x_i x_j + 4 Σ c_ijk x_i x_j x_k (mod 8)`.
///
/// Qubits are 0-based; `l_i ∈ Z8`, `q_ij ∈ Z4` and `c_ijk ∈ Z2`. Zero
/// coefficients are never stored, so structural equality is gate equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PhasePolynomialGate {
    n: usize,
    linear: BTreeMap<usize, u8>,
    quadratic: BTreeMap<(usize, usize), u8>,
    cubic: BTreeSet<(usize, usize, usize)>,
}

impl PhasePolynomialGate {
    pub fn identity(n: usize) -> Self {
        PhasePolynomialGate { n, linear: BTreeMap::new(), quadratic: BTreeMap::new(), cubic: BTreeSet::new() }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    fn check(&self, qubits: &[usize]) -> Result<()> {
        for (i, &q) in qubits.iter().enumerate() {
            if q >= self.n {
                return Err(Error::InvalidQubit { qubit: q, n: self.n });
            }
            if qubits[..i].contains(&q) {
                return Err(Error::InvalidArgument(format!("qubit {} repeated in one gate", q + 1)));
            }
        }
        Ok(())
    }

    /// Multiplies by `T^k` on qubit `q`.
    pub fn add_t(&mut self, q: usize, k: u8) -> Result<()> {
        self.check(&[q])?;
        let e = self.linear.entry(q).or_insert(0);
        *e = (*e + k) % 8;
        if *e == 0 {
            self.linear.remove(&q);
        }
        Ok(())
    }

    /// Multiplies by `CS^k` on qubits `a, b`.
    pub fn add_cs(&mut self, a: usize, b: usize, k: u8) -> Result<()> {
        self.check(&[a, b])?;
        let key = (a.min(b), a.max(b));
        let e = self.quadratic.entry(key).or_insert(0);
        *e = (*e + k) % 4;
        if *e == 0 {
            self.quadratic.remove(&key);
        }
        Ok(())
    }

    /// Multiplies by `CCZ` on qubits `a, b, c`.
    pub fn add_ccz(&mut self, a: usize, b: usize, c: usize) -> Result<()> {
        self.check(&[a, b, c])?;
        let mut k = [a, b, c];
        k.sort_unstable();
        let key = (k[0], k[1], k[2]);
        if !self.cubic.remove(&key) {
            self.cubic.insert(key);
        }
        Ok(())
    }

    pub fn linear(&self) -> &BTreeMap<usize, u8> {
        &self.linear
    }

    pub fn quadratic(&self) -> &BTreeMap<(usize, usize), u8> {
        &self.quadratic
    }

    pub fn cubic(&self) -> &BTreeSet<(usize, usize, usize)> {
        &self.cubic
    }

    pub fn is_identity(&self) -> bool {
        self.linear.is_empty() && self.quadratic.is_empty() && self.cubic.is_empty()
    }

    /// True when the gate is a product of `S`, `Z` and `CZ` factors.
    pub fn is_clifford(&self) -> bool {
        self.cubic.is_empty()
            && self.linear.values().all(|l| l % 2 == 0)
            && self.quadratic.values().all(|q| q % 2 == 0)
    }

    /// `a(x) mod 8` for the basis state with qubit `q` in bit `q` of `x`.
    pub fn phase_exponent(&self, x: u64) -> u8 {
        let b = |q: usize| ((x >> q) & 1) as u32;
        let mut a = 0u32;
        for (&q, &l) in &self.linear {
            a += l as u32 * b(q);
        }
        for (&(i, j), &k) in &self.quadratic {
            a += 2 * k as u32 * b(i) * b(j);
        }
        for &(i, j, k) in &self.cubic {
            a += 4 * b(i) * b(j) * b(k);
        }
        (a % 8) as u8
    }

    /// Diagonal entries in dense order (qubit 0 most significant).
    pub fn diagonal(&self) -> Vec<Complex64> {
        let dim = 1usize << self.n;
        (0..dim)
            .map(|i| {
                let x = dense_to_mask(i, self.n);
                Complex64::from_polar(1.0, PI * self.phase_exponent(x) as f64 / 4.0)
            })
            .collect()
    }

    pub fn to_matrix(&self) -> DMatrix<Complex64> {
        DMatrix::from_diagonal(&nalgebra::DVector::from_vec(self.diagonal()))
    }

    /// Amplitudes of `U|+⟩^{⊗n}`.
    pub fn resource_vector(&self) -> Vec<Complex64> {
        let s = (1.0 / (1u64 << self.n) as f64).sqrt();
        self.diagonal().into_iter().map(|d| d * s).collect()
    }

    /// `|U⟩⟨U|` with `|U⟩ = U|+⟩^{⊗n}`.
    pub fn resource_state(&self) -> Result<DensityOperator> {
        if self.n > crate::pauli::MAX_DENSE_QUBITS {
            return Err(Error::UnsupportedQubitCount { n: self.n, min: 1, max: crate::pauli::MAX_DENSE_QUBITS });
        }
        DensityOperator::from_pure(&self.resource_vector())
    }

    /// Product `self · other` of two gates on the same register.
    pub fn compose(&self, other: &PhasePolynomialGate) -> Result<PhasePolynomialGate> {
        if self.n != other.n {
            return Err(Error::QubitMismatch { left: self.n, right: other.n });
        }
        let mut g = self.clone();
        for (&q, &l) in &other.linear {
            g.add_t(q, l)?;
        }
        for (&(a, b), &k) in &other.quadratic {
            g.add_cs(a, b, k)?;
        }
        for &(a, b, c) in &other.cubic {
            g.add_ccz(a, b, c)?;
        }
        Ok(g)
    }

    /// Places the gate on `positions` of an `n`-qubit register.
    pub fn embed(&self, n: usize, positions: &[usize]) -> Result<PhasePolynomialGate> {
        if positions.len() != self.n {
            return Err(Error::QubitMismatch { left: self.n, right: positions.len() });
        }
        if n > MAX_QUBITS {
            return Err(Error::UnsupportedQubitCount { n, min: 0, max: MAX_QUBITS });
        }
        let mut g = PhasePolynomialGate::identity(n);
        for (&q, &l) in &self.linear {
            g.add_t(positions[q], l)?;
        }
        for (&(a, b), &k) in &self.quadratic {
            g.add_cs(positions[a], positions[b], k)?;
        }
        for &(a, b, c) in &self.cubic {
            g.add_ccz(positions[a], positions[b], positions[c])?;
        }
        Ok(g)
    }

    /// Relabels qubit `q` as `perm[q]` on the same register.
    pub fn permuted(&self, perm: &[usize]) -> Result<PhasePolynomialGate> {
        self.embed(self.n, perm)
    }

    /// Drops `S`, `Z` and `CZ` factors. The resource state changes only by a
    /// diagonal Clifford, so robustness is unchanged.
    pub fn clifford_reduced(&self) -> PhasePolynomialGate {
        PhasePolynomialGate {
            n: self.n,
            linear: self.linear.iter().filter(|(_, &l)| l % 2 == 1).map(|(&q, _)| (q, 1)).collect(),
            quadratic: self.quadratic.iter().filter(|(_, &k)| k % 2 == 1).map(|(&p, _)| (p, 1)).collect(),
            cubic: self.cubic.clone(),
        }
    }

    /// Diagonal Clifford `C_m` with `C_m U X^m |ψ⟩ ∝ U|ψ⟩`-style correction:
    /// `C_m = diag(u(x)/u(x ⊕ m))` up to global phase, as `S`/`CZ` gates on
    /// this gate's qubits. Fails if the gate is outside the third level.
    pub fn correction(&self, m: u64) -> Result<Vec<CliffordGate>> {
        let n = self.n;
        let c = |x: u64| (8 + self.phase_exponent(x) - self.phase_exponent(x ^ m)) % 8;
        let g = c(0);
        let mut lin = vec![0u8; n];
        for (i, l) in lin.iter_mut().enumerate() {
            let d = (8 + c(1 << i) - g) % 8;
            if d % 2 == 1 {
                return Err(Error::UnsupportedGate(format!("{self} is not a third-level diagonal gate")));
            }
            *l = d / 2;
        }
        let mut quad = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let d = (8 + c((1 << i) | (1 << j)) - g + 16 - 2 * (lin[i] + lin[j])) % 8;
                match d {
                    0 => {}
                    4 => quad.push((i, j)),
                    _ => return Err(Error::UnsupportedGate(format!("{self} is not a third-level diagonal gate"))),
                }
            }
        }
        // Verify the fit everywhere.
        for x in 0..(1u64 << n) {
            let mut a = g as u32;
            for (i, &l) in lin.iter().enumerate() {
                a += 2 * l as u32 * ((x >> i) & 1) as u32;
            }
            for &(i, j) in &quad {
                a += 4 * (((x >> i) & (x >> j)) & 1) as u32;
            }
            if (a % 8) as u8 != c(x) {
                return Err(Error::UnsupportedGate(format!("{self} is not a third-level diagonal gate")));
            }
        }
        let mut gates = Vec::new();
        for (i, &l) in lin.iter().enumerate() {
            match l % 4 {
                1 => gates.push(CliffordGate::S(i)),
                2 => gates.push(CliffordGate::Z(i)),
                3 => gates.push(CliffordGate::Sdg(i)),
                _ => {}
            }
        }
        gates.extend(quad.into_iter().map(|(i, j)| CliffordGate::Cz(i, j)));
        Ok(gates)
    }

    /// Clifford decomposition of a Clifford phase polynomial.
    pub fn clifford_gates(&self) -> Result<Vec<CliffordGate>> {
        if !self.is_clifford() {
            return Err(Error::UnsupportedGate(format!("{self} is not Clifford")));
        }
        let mut gates = Vec::new();
        for (&q, &l) in &self.linear {
            match l / 2 {
                1 => gates.push(CliffordGate::S(q)),
                2 => gates.push(CliffordGate::Z(q)),
                3 => gates.push(CliffordGate::Sdg(q)),
                _ => {}
            }
        }
        for &(a, b) in self.quadratic.keys() {
            gates.push(CliffordGate::Cz(a, b));
        }
        Ok(gates)
    }

    /// Naive T-count: one T per odd linear term, three per odd `CS`, seven per `CCZ`.
    pub fn naive_t_count(&self) -> usize {
        self.linear.values().filter(|&&l| l % 2 == 1).count()
            + 3 * self.quadratic.values().filter(|&&k| k % 2 == 1).count()
            + 7 * self.cubic.len()
    }
}

pub(crate) fn dense_to_mask(i: usize, n: usize) -> u64 {
    let mut x = 0u64;
    for q in 0..n {
        if (i >> (n - 1 - q)) & 1 == 1 {
            x |= 1 << q;
        }
    }
    x
}

impl fmt::Display for PhasePolynomialGate {
    /// Paper-style notation, e.g. `T_1,2CS_12CCZ_123` (1-based qubits).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "I");
        }
        let join = |v: Vec<String>| v.join(",");
        let lin = |bit: u8| -> Vec<String> {
            self.linear.iter().filter(|(_, &l)| l & bit != 0).map(|(&q, _)| (q + 1).to_string()).collect()
        };
        let quad = |bit: u8| -> Vec<String> {
            self.quadratic.iter().filter(|(_, &k)| k & bit != 0).map(|(&(a, b), _)| format!("{}{}", a + 1, b + 1)).collect()
        };
        let cub: Vec<String> = self.cubic.iter().map(|&(a, b, c)| format!("{}{}{}", a + 1, b + 1, c + 1)).collect();
        for (name, items) in [
            ("T", lin(1)),
            ("S", lin(2)),
            ("Z", lin(4)),
            ("CS", quad(1)),
            ("CZ", quad(2)),
            ("CCZ", cub),
        ] {
            if !items.is_empty() {
                write!(f, "{name}_{}", join(items))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cs() -> PhasePolynomialGate {
        let mut g = PhasePolynomialGate::identity(2);
        g.add_cs(0, 1, 1).unwrap();
        g
    }

    #[test]
    fn t_resource_is_h_state() {
        let mut g = PhasePolynomialGate::identity(1);
        g.add_t(0, 1).unwrap();
        let v = g.resource_vector();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((v[0] - Complex64::new(h, 0.0)).norm() < 1e-15);
        assert!((v[1] - Complex64::from_polar(h, PI / 4.0)).norm() < 1e-15);
    }

    #[test]
    fn cs_resource_is_flat_state() {
        let v = cs().resource_vector();
        let expected = [(0.5, 0.0), (0.5, 0.0), (0.5, 0.0), (0.0, 0.5)];
        for (a, (re, im)) in v.iter().zip(expected) {
            assert!((a - Complex64::new(re, im)).norm() < 1e-15);
        }
    }

    #[test]
    fn coefficients_wrap() {
        let mut g = PhasePolynomialGate::identity(1);
        for _ in 0..8 {
            g.add_t(0, 1).unwrap();
        }
        assert!(g.is_identity());
        let mut h = cs();
        h.add_cs(1, 0, 3).unwrap();
        assert!(h.is_identity());
    }

    #[test]
    fn repeated_qubit_rejected() {
        let mut g = PhasePolynomialGate::identity(3);
        assert!(g.add_cs(1, 1, 1).is_err());
        assert!(g.add_ccz(0, 1, 3).is_err());
    }

    #[test]
    fn corrections_undo_the_byproduct() {
        let mut g = PhasePolynomialGate::identity(3);
        g.add_t(0, 1).unwrap();
        g.add_cs(1, 2, 1).unwrap();
        g.add_ccz(0, 1, 2).unwrap();
        let u: Vec<Complex64> = (0..8u64).map(|x| Complex64::from_polar(1.0, PI * g.phase_exponent(x) as f64 / 4.0)).collect();
        for m in 0..8u64 {
            let gates = g.correction(m).unwrap();
            let mut ratio = vec![Complex64::new(1.0, 0.0); 8];
            for x in 0..8u64 {
                ratio[x as usize] = u[x as usize] / u[(x ^ m) as usize];
            }
            // Apply the Clifford gates to the diagonal of ones and compare up to global phase.
            let mut d = vec![Complex64::new(1.0, 0.0); 8];
            for gate in &gates {
                let mut col = vec![Complex64::new(0.0, 0.0); 8];
                for x in 0..8u64 {
                    col.iter_mut().for_each(|c| *c = Complex64::new(0.0, 0.0));
                    let dense = (0..3).fold(0usize, |acc, q| acc | ((((x >> q) & 1) as usize) << (2 - q)));
                    col[dense] = Complex64::new(1.0, 0.0);
                    gate.apply_to_vector(&mut col, 3);
                    d[x as usize] *= col[dense];
                }
            }
            let phase = ratio[0] / d[0];
            for x in 0..8 {
                assert!((ratio[x] - phase * d[x]).norm() < 1e-12, "m = {m}, x = {x}");
            }
        }
    }

    #[test]
    fn display_round_trip_shape() {
        let mut g = PhasePolynomialGate::identity(3);
        g.add_t(0, 3).unwrap();
        g.add_cs(0, 2, 1).unwrap();
        g.add_ccz(2, 1, 0).unwrap();
        assert_eq!(g.to_string(), "T_1S_1CS_13CCZ_123");
        assert_eq!(PhasePolynomialGate::identity(2).to_string(), "I");
    }

    #[test]
    fn clifford_reduction() {
        let mut g = PhasePolynomialGate::identity(2);
        g.add_t(0, 3).unwrap();
        g.add_cs(0, 1, 2).unwrap();
        assert!(!g.is_clifford());
        let r = g.clifford_reduced();
        assert_eq!(r.linear().get(&0), Some(&1));
        assert!(r.quadratic().is_empty());
    }
}
