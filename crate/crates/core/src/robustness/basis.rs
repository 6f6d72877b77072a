//! The sparse stabilizer expectation matrix `A_{j,i} = Tr(P_j σ_i)`.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::pauli::{pauli_index, PauliString, MAX_DENSE_QUBITS};
use crate::stabilizer::{stabilizer_state_count, StabilizerEnumeration};

/// Largest register assembled without an explicit opt-in.
pub const DEFAULT_MAX_QUBITS: usize = 4;

/// Column-major `{0, ±1}` matrix with exactly `2^n` nonzeros per column.
///
/// Entry `k` of column `c` lives at `rows[c·2^n + k]`; its sign is bit
/// `c·2^n + k` of `negative` (set means `-1`).
///
/// Matrices produced by [`assemble`](Self::assemble) are *grouped*: columns
/// come in blocks of `2^n` sharing one unsigned stabilizer group, and entry
/// `k` of column `s` in a block equals entry `k` of column 0 times
/// `(-1)^{|k & s|}`. Products with `A` and `Aᵀ` then reduce to Walsh-Hadamard
/// transforms per block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisMatrix {
    n: usize,
    cols: usize,
    rows: Vec<u16>,
    negative: Vec<u64>,
    grouped: bool,
}

/// Rough heap footprint of an assembled basis, in bytes.
pub fn basis_memory_estimate(n: usize) -> u64 {
    let nnz = stabilizer_state_count(n) << n;
    nnz * 2 + nnz / 8
}

impl BasisMatrix {
    /// Assembles the full basis for `1 ≤ n ≤ 4`.
    pub fn assemble(n: usize) -> Result<Self> {
        if n > DEFAULT_MAX_QUBITS && n <= MAX_DENSE_QUBITS {
            return Err(Error::BasisTooLarge {
                n,
                bytes: basis_memory_estimate(n),
                reason: "use assemble_heavy to opt in".into(),
            });
        }
        Self::assemble_heavy(n, u64::MAX)
    }

    /// Assembles the full basis for any supported `n`, failing if the
    /// estimated footprint exceeds `budget_bytes`.
    pub fn assemble_heavy(n: usize, budget_bytes: u64) -> Result<Self> {
        if !(1..=MAX_DENSE_QUBITS).contains(&n) {
            return Err(Error::UnsupportedQubitCount { n, min: 1, max: MAX_DENSE_QUBITS });
        }
        let bytes = basis_memory_estimate(n);
        if bytes > budget_bytes {
            return Err(Error::BasisTooLarge { n, bytes, reason: format!("budget is {budget_bytes} bytes") });
        }
        let e = StabilizerEnumeration::new(n)?;
        let size = 1usize << n;
        let blocks: Vec<(Vec<u16>, Vec<bool>)> = e
            .subspaces()
            .par_iter()
            .map(|gens| {
                let (rows, base) = group_rows(n, gens);
                let mut all_rows = Vec::with_capacity(size * size);
                let mut neg = Vec::with_capacity(size * size);
                for s in 0..size {
                    for k in 0..size {
                        all_rows.push(rows[k]);
                        neg.push(base[k] ^ ((k & s).count_ones() % 2 == 1));
                    }
                }
                (all_rows, neg)
            })
            .collect();
        let cols = e.len();
        let nnz = cols * size;
        let mut rows = Vec::with_capacity(nnz);
        let mut negative = vec![0u64; nnz.div_ceil(64)];
        for (r, neg) in blocks {
            let offset = rows.len();
            rows.extend_from_slice(&r);
            for (i, &b) in neg.iter().enumerate() {
                if b {
                    let p = offset + i;
                    negative[p / 64] |= 1 << (p % 64);
                }
            }
        }
        Ok(BasisMatrix { n, cols, rows, negative, grouped: true })
    }

    /// Builds a matrix from raw column-major storage, validating row ranges
    /// and detecting the grouped layout.
    pub(crate) fn from_raw(n: usize, cols: usize, rows: Vec<u16>, negative: Vec<u64>) -> Result<Self> {
        if !(1..=MAX_DENSE_QUBITS).contains(&n) {
            return Err(Error::UnsupportedQubitCount { n, min: 1, max: MAX_DENSE_QUBITS });
        }
        let nnz = cols << n;
        if rows.len() != nnz || negative.len() != nnz.div_ceil(64) {
            return Err(Error::InvalidArgument(format!("raw basis storage does not hold {nnz} entries")));
        }
        let m = 1usize << (2 * n);
        if let Some(&r) = rows.iter().find(|&&r| r as usize >= m) {
            return Err(Error::InvalidArgument(format!("row index {r} out of range")));
        }
        let mut b = BasisMatrix { n, cols, rows, negative, grouped: false };
        b.grouped = b.detect_grouped();
        Ok(b)
    }

    fn detect_grouped(&self) -> bool {
        let size = 1usize << self.n;
        if self.cols % size != 0 {
            return false;
        }
        (0..self.cols / size).into_par_iter().all(|blk| {
            let c0 = blk * size;
            (0..size).all(|s| {
                (0..size).all(|k| {
                    let i0 = (c0 << self.n) + k;
                    let i = ((c0 + s) << self.n) + k;
                    self.rows[i] == self.rows[i0]
                        && self.is_negative(i) == (self.is_negative(i0) ^ ((k & s).count_ones() % 2 == 1))
                })
            })
        })
    }

    #[inline]
    fn is_negative(&self, i: usize) -> bool {
        (self.negative[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn num_rows(&self) -> usize {
        1 << (2 * self.n)
    }

    pub fn num_cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.rows.len()
    }

    pub fn is_grouped(&self) -> bool {
        self.grouped
    }

    pub(crate) fn raw_rows(&self) -> &[u16] {
        &self.rows
    }

    pub(crate) fn raw_negative(&self) -> &[u64] {
        &self.negative
    }

    /// `(row, ±1)` entries of column `c`.
    pub fn column(&self, c: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let start = c << self.n;
        (start..start + (1 << self.n)).map(move |i| (self.rows[i] as usize, if self.is_negative(i) { -1.0 } else { 1.0 }))
    }

    /// Dense copy, for small `n` only.
    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.num_rows(), self.cols);
        for c in 0..self.cols {
            for (r, v) in self.column(c) {
                m[(r, c)] = v;
            }
        }
        m
    }

    /// Keeps only the listed columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Result<BasisMatrix> {
        let size = 1usize << self.n;
        let mut rows = Vec::with_capacity(cols.len() * size);
        let mut negative = vec![0u64; (cols.len() * size).div_ceil(64)];
        for (j, &c) in cols.iter().enumerate() {
            if c >= self.cols {
                return Err(Error::InvalidArgument(format!("column {c} out of range")));
            }
            for k in 0..size {
                let i = (c << self.n) + k;
                let p = j * size + k;
                rows.push(self.rows[i]);
                if self.is_negative(i) {
                    negative[p / 64] |= 1 << (p % 64);
                }
            }
        }
        BasisMatrix::from_raw(self.n, cols.len(), rows, negative)
    }

    /// Block `blk` as (row indices, signs of column 0) for grouped matrices.
    fn block_head(&self, blk: usize) -> (&[u16], impl Fn(usize) -> f64 + '_) {
        let size = 1usize << self.n;
        let start = blk * size * size;
        (&self.rows[start..start + size], move |k| if self.is_negative(start + k) { -1.0 } else { 1.0 })
    }

    /// `Aᵀ w`.
    pub fn at_mul(&self, w: &[f64]) -> Vec<f64> {
        assert_eq!(w.len(), self.num_rows());
        let size = 1usize << self.n;
        let mut out = vec![0.0; self.cols];
        if self.grouped {
            out.par_chunks_mut(size).enumerate().for_each(|(blk, chunk)| {
                let (rows, sign) = self.block_head(blk);
                for k in 0..size {
                    chunk[k] = sign(k) * w[rows[k] as usize];
                }
                walsh_hadamard(chunk);
            });
        } else {
            out.par_iter_mut().enumerate().for_each(|(c, o)| {
                *o = self.column(c).map(|(r, v)| v * w[r]).sum();
            });
        }
        out
    }

    /// `A x`.
    pub fn a_mul(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols);
        let m = self.num_rows();
        let size = 1usize << self.n;
        if self.grouped {
            x.par_chunks(size)
                .enumerate()
                .fold(
                    || (vec![0.0; m], vec![0.0; size]),
                    |(mut acc, mut buf), (blk, xs)| {
                        if xs.iter().any(|&v| v != 0.0) {
                            buf.copy_from_slice(xs);
                            walsh_hadamard(&mut buf);
                            let (rows, sign) = self.block_head(blk);
                            for k in 0..size {
                                acc[rows[k] as usize] += sign(k) * buf[k];
                            }
                        }
                        (acc, buf)
                    },
                )
                .map(|(acc, _)| acc)
                .reduce(|| vec![0.0; m], add_vecs)
        } else {
            let mut acc = vec![0.0; m];
            for (c, &xc) in x.iter().enumerate() {
                if xc != 0.0 {
                    for (r, v) in self.column(c) {
                        acc[r] += v * xc;
                    }
                }
            }
            acc
        }
    }

    /// `A diag(d) Aᵀ` as a dense symmetric matrix.
    pub fn weighted_gram(&self, d: &[f64]) -> DMatrix<f64> {
        assert_eq!(d.len(), self.cols);
        let m = self.num_rows();
        let size = 1usize << self.n;
        let flat = if self.grouped {
            d.par_chunks(size)
                .enumerate()
                .fold(
                    || (vec![0.0; m * m], vec![0.0; size], vec![0.0; size]),
                    |(mut acc, mut buf, mut sg), (blk, ds)| {
                        buf.copy_from_slice(ds);
                        walsh_hadamard(&mut buf);
                        let (rows, sign) = self.block_head(blk);
                        for (k, s) in sg.iter_mut().enumerate() {
                            *s = sign(k);
                        }
                        for a in 0..size {
                            let ra = rows[a] as usize * m;
                            for b in 0..size {
                                acc[ra + rows[b] as usize] += sg[a] * sg[b] * buf[a ^ b];
                            }
                        }
                        (acc, buf, sg)
                    },
                )
                .map(|(acc, _, _)| acc)
                .reduce(|| vec![0.0; m * m], add_vecs)
        } else {
            let mut acc = vec![0.0; m * m];
            let mut entries = Vec::with_capacity(size);
            for (c, &dc) in d.iter().enumerate() {
                if dc == 0.0 {
                    continue;
                }
                entries.clear();
                entries.extend(self.column(c));
                for &(ra, va) in &entries {
                    for &(rb, vb) in &entries {
                        acc[ra * m + rb] += dc * va * vb;
                    }
                }
            }
            acc
        };
        DMatrix::from_vec(m, m, flat)
    }
}

fn add_vecs(mut a: Vec<f64>, b: Vec<f64>) -> Vec<f64> {
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
    a
}

/// In-place unnormalised transform `v̂_s = Σ_k v_k (-1)^{|k & s|}`.
pub(crate) fn walsh_hadamard(v: &mut [f64]) {
    let len = v.len();
    let mut h = 1;
    while h < len {
        for i in (0..len).step_by(2 * h) {
            for j in i..i + h {
                let (a, b) = (v[j], v[j + h]);
                v[j] = a + b;
                v[j + h] = a - b;
            }
        }
        h *= 2;
    }
}

/// Rows and base signs of the group elements `Π_{i∈k} g_i`, `k` in subset order.
fn group_rows(n: usize, gens: &[PauliString]) -> (Vec<u16>, Vec<bool>) {
    let size = 1usize << n;
    let mut els = Vec::with_capacity(size);
    els.push(PauliString::identity(n));
    for g in gens {
        for i in 0..els.len() {
            let e = els[i].mul_unchecked(g);
            els.push(e);
        }
    }
    let rows = els.iter().map(|e| pauli_index(n, e.x_bits(), e.z_bits()) as u16).collect();
    let neg = els.iter().map(|e| e.phase() == 2).collect();
    (rows, neg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_qubit_matrix_matches_worked_example() {
        let a = BasisMatrix::assemble(1).unwrap().to_dense();
        let expected = DMatrix::from_row_slice(
            4,
            6,
            &[
                1.0, 1.0, 1.0, 1.0, 1.0, 1.0, //
                1.0, -1.0, 0.0, 0.0, 0.0, 0.0, //
                0.0, 0.0, 1.0, -1.0, 0.0, 0.0, //
                0.0, 0.0, 0.0, 0.0, 1.0, -1.0,
            ],
        );
        assert_eq!(a, expected);
    }

    #[test]
    fn structure_n2() {
        let a = BasisMatrix::assemble(2).unwrap();
        assert_eq!((a.num_rows(), a.num_cols(), a.nnz()), (16, 60, 240));
        assert!(a.is_grouped());
        let d = a.to_dense();
        assert!(d.row(0).iter().all(|&v| v == 1.0));
        for c in 0..60 {
            assert_eq!(d.column(c).iter().filter(|&&v| v != 0.0).count(), 4);
        }
    }

    #[test]
    fn heavy_gate() {
        assert!(matches!(BasisMatrix::assemble(5), Err(Error::BasisTooLarge { n: 5, .. })));
        assert!(matches!(BasisMatrix::assemble_heavy(5, 1000), Err(Error::BasisTooLarge { .. })));
        assert!(BasisMatrix::assemble(0).is_err());
    }

    #[test]
    fn fast_products_match_generic_ones() {
        let a = BasisMatrix::assemble(3).unwrap();
        let all: Vec<usize> = (0..a.num_cols()).collect();
        let mut generic = a.select_columns(&all).unwrap();
        generic.grouped = false;
        let w: Vec<f64> = (0..a.num_rows()).map(|i| ((i * 7919) % 13) as f64 - 6.0).collect();
        let x: Vec<f64> = (0..a.num_cols()).map(|i| ((i * 104729) % 17) as f64 - 8.0).collect();
        assert_eq!(a.at_mul(&w), generic.at_mul(&w));
        let (y1, y2) = (a.a_mul(&x), generic.a_mul(&x));
        assert!(y1.iter().zip(&y2).all(|(p, q)| (p - q).abs() < 1e-9));
        let d: Vec<f64> = x.iter().map(|v| v.abs() + 0.5).collect();
        let g1 = a.weighted_gram(&d);
        let g2 = generic.weighted_gram(&d);
        assert!((g1 - g2).abs().max() < 1e-9);
    }

    #[test]
    fn identity_gram_is_diagonal() {
        let a = BasisMatrix::assemble(2).unwrap();
        let g = a.weighted_gram(&vec![1.0; a.num_cols()]);
        for i in 0..16 {
            for j in 0..16 {
                let expected = match (i, j) {
                    (0, 0) => 60.0,
                    _ if i == j => 12.0,
                    _ => 0.0,
                };
                assert_eq!(g[(i, j)], expected);
            }
        }
    }
}
