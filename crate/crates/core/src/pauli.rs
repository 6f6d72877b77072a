//! Pauli operators in binary-symplectic form.
//!
//! A [`PauliString`] on `n` qubits stores an X mask, a Z mask and a phase
//! exponent `k` such that the operator is `i^k · σ_0 ⊗ σ_1 ⊗ … ⊗ σ_{n-1}`, where
//! each letter `σ_q` is one of `I, X, Y, Z` and is read from the bit pair
//! `(x_q, z_q)` as `(0,0)=I`, `(1,0)=X`, `(1,1)=Y`, `(0,1)=Z`. Bit `q` of each
//! mask belongs to qubit `q`. The operator is Hermitian exactly when `k` is even.
//!
//! The canonical Pauli order used for b-vectors and basis-matrix rows is
//! lexicographic in the letters with `I < X < Y < Z`, qubit 0 most significant,
//! so index `j = Σ_q letter_q · 4^(n-1-q)`.
//!
//! Dense vectors and matrices use the usual computational-basis layout in which
//! qubit 0 is the most significant bit of the basis index.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::state::DensityOperator;

/// Largest register a bit-packed Pauli can describe.
pub const MAX_QUBITS: usize = 64;

/// Largest register for which dense operators are built.
pub const MAX_DENSE_QUBITS: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PauliLetter {
    I,
    X,
    Y,
    Z,
}

impl PauliLetter {
    /// Position in the `I < X < Y < Z` order.
    pub fn code(self) -> usize {
        match self {
            PauliLetter::I => 0,
            PauliLetter::X => 1,
            PauliLetter::Y => 2,
            PauliLetter::Z => 3,
        }
    }

    pub fn from_code(code: usize) -> Self {
        match code & 3 {
            0 => PauliLetter::I,
            1 => PauliLetter::X,
            2 => PauliLetter::Y,
            _ => PauliLetter::Z,
        }
    }

    fn bits(self) -> (bool, bool) {
        match self {
            PauliLetter::I => (false, false),
            PauliLetter::X => (true, false),
            PauliLetter::Y => (true, true),
            PauliLetter::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => PauliLetter::I,
            (true, false) => PauliLetter::X,
            (true, true) => PauliLetter::Y,
            (false, true) => PauliLetter::Z,
        }
    }

    fn as_char(self) -> char {
        match self {
            PauliLetter::I => 'I',
            PauliLetter::X => 'X',
            PauliLetter::Y => 'Y',
            PauliLetter::Z => 'Z',
        }
    }
}

/// An `n`-qubit Pauli operator with a phase in `{1, i, -1, -i}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: u64,
    z: u64,
    phase: u8,
}

#[inline]
fn mask_for(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Maps a qubit-indexed bit mask to the matching dense basis-index mask.
#[inline]
pub(crate) fn dense_mask(mask: u64, n: usize) -> usize {
    if n == 0 {
        return 0;
    }
    (mask.reverse_bits() >> (64 - n)) as usize
}

/// Powers of `i` as complex numbers.
#[inline]
pub(crate) fn i_pow(k: u8) -> Complex64 {
    match k & 3 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        assert!(n <= MAX_QUBITS, "at most {MAX_QUBITS} qubits");
        PauliString { n, x: 0, z: 0, phase: 0 }
    }

    /// Builds a Pauli from raw masks. Bits above `n` must be clear.
    pub fn from_bits(n: usize, x: u64, z: u64, phase: u8) -> Result<Self> {
        if n > MAX_QUBITS {
            return Err(Error::UnsupportedQubitCount { n, min: 0, max: MAX_QUBITS });
        }
        let m = mask_for(n);
        if x & !m != 0 || z & !m != 0 {
            return Err(Error::InvalidArgument(format!("Pauli mask has bits beyond {n} qubits")));
        }
        Ok(PauliString { n, x, z, phase: phase & 3 })
    }

    #[inline]
    pub(crate) fn from_bits_unchecked(n: usize, x: u64, z: u64, phase: u8) -> Self {
        PauliString { n, x, z, phase: phase & 3 }
    }

    /// A single-letter Pauli acting on qubit `q`.
    pub fn single(n: usize, q: usize, letter: PauliLetter) -> Result<Self> {
        if q >= n {
            return Err(Error::InvalidQubit { qubit: q, n });
        }
        let (xb, zb) = letter.bits();
        Ok(PauliString { n, x: (xb as u64) << q, z: (zb as u64) << q, phase: 0 })
    }

    pub fn from_letters(letters: &[PauliLetter]) -> Self {
        let n = letters.len();
        assert!(n <= MAX_QUBITS, "at most {MAX_QUBITS} qubits");
        let (mut x, mut z) = (0u64, 0u64);
        for (q, l) in letters.iter().enumerate() {
            let (xb, zb) = l.bits();
            x |= (xb as u64) << q;
            z |= (zb as u64) << q;
        }
        PauliString { n, x, z, phase: 0 }
    }

    /// The Hermitian, positive-sign Pauli at position `j` of the canonical order.
    pub fn from_index(n: usize, j: usize) -> Result<Self> {
        if n > 31 {
            return Err(Error::UnsupportedQubitCount { n, min: 0, max: 31 });
        }
        let size = 1usize << (2 * n);
        if j >= size {
            return Err(Error::PauliIndexOutOfRange { n, index: j, size });
        }
        let (mut x, mut z) = (0u64, 0u64);
        for q in 0..n {
            let code = (j >> (2 * (n - 1 - q))) & 3;
            let (xb, zb) = PauliLetter::from_code(code).bits();
            x |= (xb as u64) << q;
            z |= (zb as u64) << q;
        }
        Ok(PauliString { n, x, z, phase: 0 })
    }

    /// Position of the underlying letter string in the canonical order (phase ignored).
    pub fn index(&self) -> usize {
        pauli_index(self.n, self.x, self.z)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn x_bits(&self) -> u64 {
        self.x
    }

    pub fn z_bits(&self) -> u64 {
        self.z
    }

    /// Exponent `k` of the leading `i^k`.
    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn letter(&self, q: usize) -> PauliLetter {
        PauliLetter::from_bits((self.x >> q) & 1 == 1, (self.z >> q) & 1 == 1)
    }

    pub fn letters(&self) -> Vec<PauliLetter> {
        (0..self.n).map(|q| self.letter(q)).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    pub fn is_hermitian(&self) -> bool {
        self.phase & 1 == 0
    }

    /// `+1` or `-1` for Hermitian operators, `None` otherwise.
    pub fn sign(&self) -> Option<i8> {
        match self.phase {
            0 => Some(1),
            2 => Some(-1),
            _ => None,
        }
    }

    pub fn weight(&self) -> u32 {
        (self.x | self.z).count_ones()
    }

    pub fn with_phase(&self, phase: u8) -> Self {
        PauliString { phase: phase & 3, ..*self }
    }

    /// The same letters with a `+1` leading sign.
    pub fn unsigned(&self) -> Self {
        self.with_phase(0)
    }

    pub fn negated(&self) -> Self {
        self.with_phase(self.phase + 2)
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) % 2 == 0
    }

    /// Operator product `self · other`, with exact phase.
    pub fn multiply(&self, other: &PauliString) -> Result<PauliString> {
        if self.n != other.n {
            return Err(Error::QubitMismatch { left: self.n, right: other.n });
        }
        Ok(self.mul_unchecked(other))
    }

    #[inline]
    pub(crate) fn mul_unchecked(&self, other: &PauliString) -> PauliString {
        // Letter form to X^x Z^z form, multiply, and back.
        let x = self.x ^ other.x;
        let z = self.z ^ other.z;
        let k = self.phase as u32
            + other.phase as u32
            + (self.x & self.z).count_ones()
            + (other.x & other.z).count_ones()
            + 2 * (self.z & other.x).count_ones()
            + 3 * (x & z).count_ones();
        PauliString { n: self.n, x, z, phase: (k & 3) as u8 }
    }

    /// `self ⊗ other`, with `self` on the leading qubits.
    pub fn tensor(&self, other: &PauliString) -> Result<PauliString> {
        let n = self.n + other.n;
        if n > MAX_QUBITS {
            return Err(Error::UnsupportedQubitCount { n, min: 0, max: MAX_QUBITS });
        }
        Ok(PauliString {
            n,
            x: self.x | (other.x << self.n),
            z: self.z | (other.z << self.n),
            phase: (self.phase + other.phase) & 3,
        })
    }

    /// Embeds this Pauli into a larger register with qubit `q` sent to `positions[q]`.
    pub fn embed(&self, n: usize, positions: &[usize]) -> Result<PauliString> {
        if positions.len() != self.n {
            return Err(Error::QubitMismatch { left: positions.len(), right: self.n });
        }
        let (mut x, mut z) = (0u64, 0u64);
        for (q, &p) in positions.iter().enumerate() {
            if p >= n {
                return Err(Error::InvalidQubit { qubit: p, n });
            }
            x |= ((self.x >> q) & 1) << p;
            z |= ((self.z >> q) & 1) << p;
        }
        Ok(PauliString { n, x, z, phase: self.phase })
    }

    /// Phase picked up on basis state `c`: `P|c⟩ = amplitude · |c ⊕ flip⟩`.
    #[inline]
    fn dense_action(&self) -> (usize, usize, u8) {
        let xd = dense_mask(self.x, self.n);
        let zd = dense_mask(self.z, self.n);
        let base = (self.phase as u32 + (self.x & self.z).count_ones()) & 3;
        (xd, zd, base as u8)
    }

    /// Applies the operator to a dense state vector.
    pub fn apply_to_vector(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), 1usize << self.n, "vector length must be 2^n");
        let (xd, zd, base) = self.dense_action();
        let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
        for (c, amp) in v.iter().enumerate() {
            let k = base + 2 * ((zd & c).count_ones() & 1) as u8;
            out[c ^ xd] = i_pow(k) * amp;
        }
        out
    }

    /// Dense `2^n × 2^n` matrix.
    pub fn to_matrix(&self) -> DMatrix<Complex64> {
        let dim = 1usize << self.n;
        let (xd, zd, base) = self.dense_action();
        let mut m = DMatrix::zeros(dim, dim);
        for c in 0..dim {
            let k = base + 2 * ((zd & c).count_ones() & 1) as u8;
            m[(c ^ xd, c)] = i_pow(k);
        }
        m
    }

    /// `Tr(P M)` for a dense matrix `M`.
    pub fn trace_with(&self, m: &DMatrix<Complex64>) -> Complex64 {
        let dim = 1usize << self.n;
        assert_eq!(m.nrows(), dim);
        let (xd, zd, base) = self.dense_action();
        let mut acc = Complex64::new(0.0, 0.0);
        for c in 0..dim {
            let k = base + 2 * ((zd & c).count_ones() & 1) as u8;
            // P[c^xd, c] · M[c, c^xd]
            acc += i_pow(k) * m[(c, c ^ xd)];
        }
        acc
    }
}

/// Canonical index of the letter string with masks `(x, z)`.
#[inline]
pub(crate) fn pauli_index(n: usize, x: u64, z: u64) -> usize {
    let mut j = 0usize;
    for q in 0..n {
        let xb = (x >> q) & 1;
        let zb = (z >> q) & 1;
        let code = match (xb, zb) {
            (0, 0) => 0,
            (1, 0) => 1,
            (1, 1) => 2,
            _ => 3,
        };
        j = (j << 2) | code;
    }
    j
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.phase {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        };
        f.write_str(prefix)?;
        for q in 0..self.n {
            write!(f, "{}", self.letter(q).as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Parses strings such as `XIZ`, `+XY`, `-ZZ`, `+iX`, `-iYY`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (phase, rest) = if let Some(r) = s.strip_prefix("+i") {
            (1, r)
        } else if let Some(r) = s.strip_prefix("-i") {
            (3, r)
        } else if let Some(r) = s.strip_prefix('+') {
            (0, r)
        } else if let Some(r) = s.strip_prefix('-') {
            (2, r)
        } else {
            (0, s)
        };
        if rest.is_empty() {
            return Err(Error::InvalidArgument(format!("empty Pauli string '{s}'")));
        }
        let mut letters = Vec::with_capacity(rest.len());
        for ch in rest.chars() {
            letters.push(match ch.to_ascii_uppercase() {
                'I' | '_' => PauliLetter::I,
                'X' => PauliLetter::X,
                'Y' => PauliLetter::Y,
                'Z' => PauliLetter::Z,
                other => {
                    return Err(Error::InvalidArgument(format!(
                        "invalid Pauli letter '{other}' in '{s}'"
                    )))
                }
            });
        }
        if letters.len() > MAX_QUBITS {
            return Err(Error::UnsupportedQubitCount { n: letters.len(), min: 1, max: MAX_QUBITS });
        }
        Ok(PauliString::from_letters(&letters).with_phase(phase))
    }
}

/// Pauli-basis coordinates `b_j = Tr(P_j ρ)` in canonical order.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliVector {
    n: usize,
    entries: Vec<f64>,
}

impl PauliVector {
    pub fn new(n: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != 1usize << (2 * n) {
            return Err(Error::InvalidArgument(format!(
                "expected {} Pauli coordinates, got {}",
                1usize << (2 * n),
                entries.len()
            )));
        }
        Ok(PauliVector { n, entries })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `2^{-n} Σ_j b_j P_j`.
    pub fn reconstruct(&self) -> DMatrix<Complex64> {
        let dim = 1usize << self.n;
        let mut m = DMatrix::zeros(dim, dim);
        let scale = 1.0 / dim as f64;
        for (j, &b) in self.entries.iter().enumerate() {
            if b == 0.0 {
                continue;
            }
            let p = PauliString::from_index(self.n, j).expect("index in range");
            let (xd, zd, base) = p.dense_action();
            for c in 0..dim {
                let k = base + 2 * ((zd & c).count_ones() & 1) as u8;
                m[(c ^ xd, c)] += i_pow(k) * (b * scale);
            }
        }
        m
    }
}

/// Pauli-basis vector of a density operator.
pub fn pauli_vector_of(rho: &DensityOperator) -> Result<PauliVector> {
    let n = rho.num_qubits();
    if n > MAX_DENSE_QUBITS {
        return Err(Error::UnsupportedQubitCount { n, min: 1, max: MAX_DENSE_QUBITS });
    }
    let m = rho.matrix();
    let entries = (0..1usize << (2 * n))
        .map(|j| {
            let p = PauliString::from_index(n, j).expect("index in range");
            p.trace_with(m).re
        })
        .collect();
    Ok(PauliVector { n, entries })
}
