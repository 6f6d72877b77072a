//! Stabilizer tableaux, Clifford gates and Pauli measurements.
//!
//! A [`StabilizerTableau`] keeps `n` stabilizer generators together with `n`
//! destabilizers: destabilizer `i` anticommutes with stabilizer `i` and
//! commutes with every other row. The destabilizers turn deterministic
//! measurement outcomes and expectation values into an `O(n)` product of rows.

mod enumerate;

pub use enumerate::{
    enumerate_stabilizer_states, stabilizer_state_count, StabilizerEnumeration, StabilizerStateId,
};

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::pauli::{PauliString, MAX_QUBITS};

/// Largest register for which [`StabilizerTableau::state_vector`] is available.
pub const MAX_STATE_VECTOR_QUBITS: usize = 14;

/// Clifford generators acting on explicit qubit indices (0-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CliffordGate {
    H(usize),
    S(usize),
    Sdg(usize),
    X(usize),
    Y(usize),
    Z(usize),
    SqrtX(usize),
    SqrtXdg(usize),
    Cnot(usize, usize),
    Cz(usize, usize),
    Swap(usize, usize),
}

impl CliffordGate {
    pub fn qubits(&self) -> Vec<usize> {
        use CliffordGate::*;
        match *self {
            H(q) | S(q) | Sdg(q) | X(q) | Y(q) | Z(q) | SqrtX(q) | SqrtXdg(q) => vec![q],
            Cnot(a, b) | Cz(a, b) | Swap(a, b) => vec![a, b],
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let qs = self.qubits();
        for &q in &qs {
            if q >= n {
                return Err(Error::InvalidQubit { qubit: q, n });
            }
        }
        if qs.len() == 2 && qs[0] == qs[1] {
            return Err(Error::InvalidArgument(format!("{self} acts twice on qubit {}", qs[0])));
        }
        Ok(())
    }

    pub fn inverse(&self) -> CliffordGate {
        use CliffordGate::*;
        match *self {
            S(q) => Sdg(q),
            Sdg(q) => S(q),
            SqrtX(q) => SqrtXdg(q),
            SqrtXdg(q) => SqrtX(q),
            g => g,
        }
    }

    /// Relabels qubits through `map`.
    pub fn remap(&self, map: &[usize]) -> CliffordGate {
        use CliffordGate::*;
        match *self {
            H(q) => H(map[q]),
            S(q) => S(map[q]),
            Sdg(q) => Sdg(map[q]),
            X(q) => X(map[q]),
            Y(q) => Y(map[q]),
            Z(q) => Z(map[q]),
            SqrtX(q) => SqrtX(map[q]),
            SqrtXdg(q) => SqrtXdg(map[q]),
            Cnot(a, b) => Cnot(map[a], map[b]),
            Cz(a, b) => Cz(map[a], map[b]),
            Swap(a, b) => Swap(map[a], map[b]),
        }
    }

    /// Replaces `p` by `G p G†`. The gate must already be validated.
    pub fn conjugate(&self, p: &mut PauliString) {
        use CliffordGate::*;
        let n = p.num_qubits();
        let (mut x, mut z, mut k) = (p.x_bits(), p.z_bits(), p.phase());
        let bit = |m: u64, q: usize| (m >> q) & 1 == 1;
        match *self {
            H(q) => {
                let (xq, zq) = (bit(x, q), bit(z, q));
                if xq && zq {
                    k += 2;
                }
                if xq != zq {
                    x ^= 1 << q;
                    z ^= 1 << q;
                }
            }
            S(q) => {
                if bit(x, q) {
                    if bit(z, q) {
                        k += 2;
                    }
                    z ^= 1 << q;
                }
            }
            Sdg(q) => {
                if bit(x, q) {
                    if !bit(z, q) {
                        k += 2;
                    }
                    z ^= 1 << q;
                }
            }
            X(q) => {
                if bit(z, q) {
                    k += 2;
                }
            }
            Y(q) => {
                if bit(x, q) != bit(z, q) {
                    k += 2;
                }
            }
            Z(q) => {
                if bit(x, q) {
                    k += 2;
                }
            }
            SqrtX(q) => {
                if bit(z, q) {
                    if !bit(x, q) {
                        k += 2;
                    }
                    x ^= 1 << q;
                }
            }
            SqrtXdg(q) => {
                if bit(z, q) {
                    if bit(x, q) {
                        k += 2;
                    }
                    x ^= 1 << q;
                }
            }
            Cnot(a, b) => {
                let (xa, za, xb, zb) = (bit(x, a), bit(z, a), bit(x, b), bit(z, b));
                if xa && zb && (xb == za) {
                    k += 2;
                }
                if xa {
                    x ^= 1 << b;
                }
                if zb {
                    z ^= 1 << a;
                }
            }
            Cz(a, b) => {
                let (xa, za, xb, zb) = (bit(x, a), bit(z, a), bit(x, b), bit(z, b));
                if xa && xb && (za != zb) {
                    k += 2;
                }
                if xb {
                    z ^= 1 << a;
                }
                if xa {
                    z ^= 1 << b;
                }
            }
            Swap(a, b) => {
                let (xa, za, xb, zb) = (bit(x, a), bit(z, a), bit(x, b), bit(z, b));
                if xa != xb {
                    x ^= (1 << a) | (1 << b);
                }
                if za != zb {
                    z ^= (1 << a) | (1 << b);
                }
            }
        }
        *p = PauliString::from_bits_unchecked(n, x, z, k);
    }

    /// 2×2 matrix of a single-qubit gate in `(|0⟩, |1⟩)` order.
    fn single_qubit_matrix(&self) -> Option<[[Complex64; 2]; 2]> {
        use CliffordGate::*;
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let h = FRAC_1_SQRT_2;
        Some(match *self {
            H(_) => [[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]],
            S(_) => [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, 1.0)]],
            Sdg(_) => [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, -1.0)]],
            X(_) => [[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]],
            Y(_) => [[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]],
            Z(_) => [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]],
            SqrtX(_) => [[c(0.5, 0.5), c(0.5, -0.5)], [c(0.5, -0.5), c(0.5, 0.5)]],
            SqrtXdg(_) => [[c(0.5, -0.5), c(0.5, 0.5)], [c(0.5, 0.5), c(0.5, -0.5)]],
            _ => return None,
        })
    }

    /// Applies the gate to a dense `n`-qubit state vector in place.
    pub fn apply_to_vector(&self, v: &mut [Complex64], n: usize) {
        use CliffordGate::*;
        let bitpos = |q: usize| 1usize << (n - 1 - q);
        if let Some(u) = self.single_qubit_matrix() {
            let q = self.qubits()[0];
            let m = bitpos(q);
            for i in 0..v.len() {
                if i & m == 0 {
                    let (a, b) = (v[i], v[i | m]);
                    v[i] = u[0][0] * a + u[0][1] * b;
                    v[i | m] = u[1][0] * a + u[1][1] * b;
                }
            }
            return;
        }
        match *self {
            Cnot(c, t) => {
                let (mc, mt) = (bitpos(c), bitpos(t));
                for i in 0..v.len() {
                    if i & mc != 0 && i & mt == 0 {
                        v.swap(i, i | mt);
                    }
                }
            }
            Cz(a, b) => {
                let (ma, mb) = (bitpos(a), bitpos(b));
                for (i, amp) in v.iter_mut().enumerate() {
                    if i & ma != 0 && i & mb != 0 {
                        *amp = -*amp;
                    }
                }
            }
            Swap(a, b) => {
                let (ma, mb) = (bitpos(a), bitpos(b));
                for i in 0..v.len() {
                    if i & ma != 0 && i & mb == 0 {
                        v.swap(i, (i & !ma) | mb);
                    }
                }
            }
            _ => unreachable!("single-qubit gates handled above"),
        }
    }

    /// Dense unitary on `n` qubits.
    pub fn to_matrix(&self, n: usize) -> DMatrix<Complex64> {
        let dim = 1usize << n;
        let mut m = DMatrix::zeros(dim, dim);
        let mut col = vec![Complex64::new(0.0, 0.0); dim];
        for c in 0..dim {
            col.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
            col[c] = Complex64::new(1.0, 0.0);
            self.apply_to_vector(&mut col, n);
            for (r, v) in col.iter().enumerate() {
                m[(r, c)] = *v;
            }
        }
        m
    }
}

impl fmt::Display for CliffordGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use CliffordGate::*;
        match *self {
            H(q) => write!(f, "H {}", q + 1),
            S(q) => write!(f, "S {}", q + 1),
            Sdg(q) => write!(f, "SDG {}", q + 1),
            X(q) => write!(f, "X {}", q + 1),
            Y(q) => write!(f, "Y {}", q + 1),
            Z(q) => write!(f, "Z {}", q + 1),
            SqrtX(q) => write!(f, "SQRTX {}", q + 1),
            SqrtXdg(q) => write!(f, "SQRTXDG {}", q + 1),
            Cnot(a, b) => write!(f, "CNOT {} {}", a + 1, b + 1),
            Cz(a, b) => write!(f, "CZ {} {}", a + 1, b + 1),
            Swap(a, b) => write!(f, "SWAP {} {}", a + 1, b + 1),
        }
    }
}

/// Outcome of a Pauli measurement on a tableau.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Measurement {
    /// `+1` or `-1`.
    pub outcome: i8,
    /// Whether the outcome was fixed by the state.
    pub deterministic: bool,
}

/// A pure stabilizer state with destabilizer bookkeeping.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizerTableau {
    n: usize,
    stabilizers: Vec<PauliString>,
    destabilizers: Vec<PauliString>,
}

impl StabilizerTableau {
    /// `|0…0⟩`.
    pub fn zero_state(n: usize) -> Self {
        assert!(n <= MAX_QUBITS, "at most {MAX_QUBITS} qubits");
        let stabilizers = (0..n).map(|q| PauliString::from_bits_unchecked(n, 0, 1 << q, 0)).collect();
        let destabilizers =
            (0..n).map(|q| PauliString::from_bits_unchecked(n, 1 << q, 0, 0)).collect();
        StabilizerTableau { n, stabilizers, destabilizers }
    }

    /// Builds a tableau from `n` commuting, independent Hermitian generators,
    /// completing a matching set of destabilizers.
    pub fn from_generators(generators: Vec<PauliString>) -> Result<Self> {
        let n = generators.len();
        if n == 0 {
            return Ok(StabilizerTableau { n: 0, stabilizers: vec![], destabilizers: vec![] });
        }
        for g in &generators {
            if g.num_qubits() != n {
                return Err(Error::InvalidGenerators(format!(
                    "expected {n} generators on {n} qubits, got a {}-qubit generator",
                    g.num_qubits()
                )));
            }
            if !g.is_hermitian() {
                return Err(Error::InvalidGenerators(format!("{g} is not Hermitian")));
            }
            if g.is_identity() {
                return Err(Error::InvalidGenerators(format!("{g} is ±identity")));
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if !generators[i].commutes_with(&generators[j]) {
                    return Err(Error::InvalidGenerators(format!(
                        "{} and {} anticommute",
                        generators[i], generators[j]
                    )));
                }
            }
        }
        let destabilizers = complete_destabilizers(&generators)
            .ok_or_else(|| Error::InvalidGenerators("generators are not independent".into()))?;
        Ok(StabilizerTableau { n, stabilizers: generators, destabilizers })
    }

    /// Trusts the caller that the rows form a valid tableau.
    pub(crate) fn from_rows_unchecked(stabilizers: Vec<PauliString>, destabilizers: Vec<PauliString>) -> Self {
        debug_assert_eq!(stabilizers.len(), destabilizers.len());
        StabilizerTableau { n: stabilizers.len(), stabilizers, destabilizers }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn stabilizers(&self) -> &[PauliString] {
        &self.stabilizers
    }

    pub fn destabilizers(&self) -> &[PauliString] {
        &self.destabilizers
    }

    pub fn apply(&mut self, gate: &CliffordGate) -> Result<()> {
        gate.validate(self.n)?;
        for p in self.stabilizers.iter_mut().chain(self.destabilizers.iter_mut()) {
            gate.conjugate(p);
        }
        Ok(())
    }

    pub fn apply_all<'a, I: IntoIterator<Item = &'a CliffordGate>>(&mut self, gates: I) -> Result<()> {
        for g in gates {
            self.apply(g)?;
        }
        Ok(())
    }

    /// Functional form of [`apply`](Self::apply).
    pub fn applied(&self, gate: &CliffordGate) -> Result<Self> {
        let mut t = self.clone();
        t.apply(gate)?;
        Ok(t)
    }

    fn check_observable(&self, p: &PauliString) -> Result<()> {
        if p.num_qubits() != self.n {
            return Err(Error::QubitMismatch { left: self.n, right: p.num_qubits() });
        }
        if !p.is_hermitian() {
            return Err(Error::NotHermitian(p.to_string()));
        }
        Ok(())
    }

    /// Product of the stabilizers whose destabilizer anticommutes with `p`.
    /// Equals `±p` whenever `p` commutes with the whole stabilizer group.
    fn stabilizer_product_for(&self, p: &PauliString) -> PauliString {
        let mut acc = PauliString::identity(self.n);
        for (d, s) in self.destabilizers.iter().zip(&self.stabilizers) {
            if !d.commutes_with(p) {
                acc = acc.mul_unchecked(s);
            }
        }
        acc
    }

    /// `⟨ψ|p|ψ⟩ ∈ {-1, 0, +1}` for Hermitian `p`.
    pub fn expectation(&self, p: &PauliString) -> Result<i8> {
        self.check_observable(p)?;
        if self.stabilizers.iter().any(|s| !s.commutes_with(p)) {
            return Ok(0);
        }
        let prod = self.stabilizer_product_for(p);
        debug_assert_eq!((prod.x_bits(), prod.z_bits()), (p.x_bits(), p.z_bits()));
        Ok(if prod.phase() == p.phase() { 1 } else { -1 })
    }

    /// Measures the Hermitian Pauli `p`, drawing random outcomes from `rng`.
    pub fn measure<R: Rng + ?Sized>(&mut self, p: &PauliString, rng: &mut R) -> Result<Measurement> {
        self.measure_with(p, |_| if rng.random::<bool>() { 1 } else { -1 })
    }

    /// Measures `p`; a random outcome is replaced by `preferred`.
    pub fn measure_forced(&mut self, p: &PauliString, preferred: i8) -> Result<Measurement> {
        self.measure_with(p, |_| preferred)
    }

    /// Functional form of [`measure`](Self::measure).
    pub fn measured<R: Rng + ?Sized>(
        &self,
        p: &PauliString,
        rng: &mut R,
    ) -> Result<(Measurement, StabilizerTableau)> {
        let mut t = self.clone();
        let m = t.measure(p, rng)?;
        Ok((m, t))
    }

    fn measure_with<F: FnMut(&PauliString) -> i8>(
        &mut self,
        p: &PauliString,
        mut choose: F,
    ) -> Result<Measurement> {
        self.check_observable(p)?;
        let pivot = self.stabilizers.iter().position(|s| !s.commutes_with(p));
        match pivot {
            None => {
                let prod = self.stabilizer_product_for(p);
                let outcome = if prod.phase() == p.phase() { 1 } else { -1 };
                Ok(Measurement { outcome, deterministic: true })
            }
            Some(k) => {
                let pivot_row = self.stabilizers[k];
                for i in 0..self.n {
                    if i != k && !self.stabilizers[i].commutes_with(p) {
                        self.stabilizers[i] = self.stabilizers[i].mul_unchecked(&pivot_row);
                    }
                    if i != k && !self.destabilizers[i].commutes_with(p) {
                        self.destabilizers[i] = self.destabilizers[i].mul_unchecked(&pivot_row);
                    }
                }
                self.destabilizers[k] = pivot_row;
                let outcome = if choose(p) >= 0 { 1 } else { -1 };
                self.stabilizers[k] = if outcome == 1 { *p } else { p.negated() };
                Ok(Measurement { outcome, deterministic: false })
            }
        }
    }

    /// `self ⊗ other`, with `self` on the leading qubits.
    pub fn tensor(&self, other: &StabilizerTableau) -> Result<StabilizerTableau> {
        let n = self.n + other.n;
        if n > MAX_QUBITS {
            return Err(Error::UnsupportedQubitCount { n, min: 0, max: MAX_QUBITS });
        }
        let left_id = PauliString::identity(self.n);
        let right_id = PauliString::identity(other.n);
        let mut stabilizers = Vec::with_capacity(n);
        let mut destabilizers = Vec::with_capacity(n);
        for (s, d) in self.stabilizers.iter().zip(&self.destabilizers) {
            stabilizers.push(s.tensor(&right_id)?);
            destabilizers.push(d.tensor(&right_id)?);
        }
        for (s, d) in other.stabilizers.iter().zip(&other.destabilizers) {
            stabilizers.push(left_id.tensor(s)?);
            destabilizers.push(left_id.tensor(d)?);
        }
        Ok(StabilizerTableau { n, stabilizers, destabilizers })
    }

    /// All `2^n` elements of the stabilizer group, signs included.
    pub fn group_elements(&self) -> Vec<PauliString> {
        let mut out = Vec::with_capacity(1 << self.n);
        out.push(PauliString::identity(self.n));
        for g in &self.stabilizers {
            let len = out.len();
            for i in 0..len {
                let e = out[i].mul_unchecked(g);
                out.push(e);
            }
        }
        out
    }

    /// Dense amplitudes, normalised, with the first nonzero amplitude real positive.
    pub fn state_vector(&self) -> Result<Vec<Complex64>> {
        if self.n > MAX_STATE_VECTOR_QUBITS {
            return Err(Error::UnsupportedQubitCount {
                n: self.n,
                min: 0,
                max: MAX_STATE_VECTOR_QUBITS,
            });
        }
        // A computational basis state with nonzero overlap: measure every Z,
        // keeping +1 whenever the outcome is free.
        let mut probe = self.clone();
        let mut basis = 0usize;
        for q in 0..self.n {
            let z = PauliString::from_bits_unchecked(self.n, 0, 1 << q, 0);
            let m = probe.measure_forced(&z, 1)?;
            if m.outcome == -1 {
                basis |= 1 << (self.n - 1 - q);
            }
        }
        let dim = 1usize << self.n;
        let mut v = vec![Complex64::new(0.0, 0.0); dim];
        v[basis] = Complex64::new(1.0, 0.0);
        for g in &self.stabilizers {
            let gv = g.apply_to_vector(&v);
            for (a, b) in v.iter_mut().zip(gv) {
                *a = (*a + b) * 0.5;
            }
        }
        normalise_with_phase(&mut v);
        Ok(v)
    }
}

/// Scales `v` to unit norm and rotates its first significant amplitude to the positive real axis.
pub(crate) fn normalise_with_phase(v: &mut [Complex64]) {
    let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return;
    }
    let lead = v.iter().find(|a| a.norm() > 1e-9 * norm).copied().unwrap_or(Complex64::new(1.0, 0.0));
    let rot = lead.conj() / (lead.norm() * norm);
    for a in v.iter_mut() {
        *a *= rot;
    }
}

impl fmt::Display for StabilizerTableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.stabilizers.iter().map(|s| s.to_string()).collect();
        write!(f, "<{}>", parts.join(", "))
    }
}

#[inline]
fn symplectic(a: &PauliString, b: &PauliString) -> bool {
    !a.commutes_with(b)
}

/// Finds destabilizers `d_i` with `⟨d_i, g_j⟩ = δ_ij` and mutually commuting `d`s.
/// Returns `None` when the generators are linearly dependent.
fn complete_destabilizers(generators: &[PauliString]) -> Option<Vec<PauliString>> {
    let n = generators.len();
    // Equation j reads d_x · g_j.z + d_z · g_j.x = δ_ij; unknown bits are
    // (d_x | d_z << n) packed into a u128.
    let mut rows: Vec<(u128, u64)> = generators
        .iter()
        .enumerate()
        .map(|(j, g)| ((g.z_bits() as u128) | ((g.x_bits() as u128) << n), 1u64 << j))
        .collect();
    let mut pivots = Vec::with_capacity(n);
    let mut rank = 0;
    for col in 0..2 * n {
        let Some(sel) = (rank..n).find(|&r| (rows[r].0 >> col) & 1 == 1) else {
            continue;
        };
        rows.swap(rank, sel);
        let (pr, pa) = rows[rank];
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && (row.0 >> col) & 1 == 1 {
                row.0 ^= pr;
                row.1 ^= pa;
            }
        }
        pivots.push(col);
        rank += 1;
        if rank == n {
            break;
        }
    }
    if rank < n {
        return None;
    }
    let low = if n >= 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut ds: Vec<PauliString> = (0..n)
        .map(|i| {
            let mut bits = 0u128;
            for (r, &col) in pivots.iter().enumerate() {
                if (rows[r].1 >> i) & 1 == 1 {
                    bits |= 1u128 << col;
                }
            }
            let dx = (bits as u64) & low;
            let dz = ((bits >> n) as u64) & low;
            PauliString::from_bits_unchecked(n, dx, dz, 0)
        })
        .collect();
    let original = ds.clone();
    for j in 0..n {
        for i in 0..j {
            if symplectic(&original[i], &original[j]) {
                ds[j] = ds[j].mul_unchecked(&generators[i]);
            }
        }
        ds[j] = ds[j].unsigned();
    }
    Some(ds)
}
