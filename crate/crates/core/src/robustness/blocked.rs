use serde::Serialize;

use crate::bounds::product_lower_bound;
use crate::cache::BasisStore;
use crate::error::{Error, Result};
use crate::pauli::MAX_DENSE_QUBITS;
use crate::state::{h_state, DensityOperator};

use super::{rom, Pseudomixture, RobustnessResult};

/// Literature value of `R(|H^{⊗5}⟩)`, used when no heavy solve is available.
pub const H_ROBUSTNESS_5: f64 = 3.68705;

/// `R(|H^{⊗t}⟩)` for `t ≤ 5`: closed forms up to four copies.
pub fn h_robustness_reference(t: usize) -> Option<f64> {
    let r2 = std::f64::consts::SQRT_2;
    match t {
        0 => Some(1.0),
        1 => Some(r2),
        2 => Some((1.0 + 3.0 * r2) / 3.0),
        3 => Some((1.0 + 4.0 * r2) / 3.0),
        4 => Some((3.0 + 8.0 * r2) / 5.0),
        5 => Some(H_ROBUSTNESS_5),
        _ => None,
    }
}

/// Product of per-block robustness values; the joint mixture stays implicit.
#[derive(Clone, Debug, Serialize)]
pub struct BlockedRobustness {
    pub value: f64,
    pub blocks: Vec<RobustnessResult>,
}

impl BlockedRobustness {
    pub fn mixtures(&self) -> Vec<Pseudomixture> {
        self.blocks.iter().map(|b| b.mixture.clone()).collect()
    }
}

/// Solves each block separately; `Σ|x|` of the product mixture is the
/// product of the block values.
pub fn blocked_rom(blocks: &[DensityOperator], store: &BasisStore) -> Result<BlockedRobustness> {
    if blocks.is_empty() {
        return Err(Error::InvalidArgument("no blocks given".into()));
    }
    let mut results = Vec::with_capacity(blocks.len());
    for rho in blocks {
        let n = rho.num_qubits();
        if n > MAX_DENSE_QUBITS {
            return Err(Error::UnsupportedQubitCount { n, min: 1, max: MAX_DENSE_QUBITS });
        }
        let basis = store.get(n)?;
        results.push(rom(rho, &basis)?);
    }
    let value = results.iter().map(|r| r.value).product();
    Ok(BlockedRobustness { value, blocks: results })
}

/// Lower and upper bounds on `R(|H^{⊗t}⟩)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Bracket {
    pub t: usize,
    /// Tighter st-norm bound.
    pub st_lower: f64,
    pub known_lower: Option<f64>,
    pub lower: f64,
    pub upper: f64,
    /// Block sizes (each ≤ 5) realising `upper`.
    pub split: Vec<usize>,
}

/// Brackets `R(|H^{⊗t}⟩)` by the st-norm bound (or a supplied certificate)
/// and the cheapest submultiplicative split into blocks of at most five.
pub fn rom_bracket(t: usize, known_lower: Option<f64>) -> Result<Bracket> {
    if t == 0 {
        return Err(Error::InvalidArgument("number of copies must be at least 1".into()));
    }
    let st_lower = product_lower_bound(&h_state(), t)?.tighter;
    let lower = known_lower.map_or(st_lower, |k| k.max(st_lower));
    // best[k] = cheapest product over splits of k copies.
    let mut best = vec![(1.0f64, Vec::<usize>::new()); t + 1];
    for k in 1..=t {
        let mut cand: Option<(f64, Vec<usize>)> = None;
        for p in 1..=k.min(MAX_DENSE_QUBITS) {
            let v = h_robustness_reference(p).expect("p ≤ 5") * best[k - p].0;
            if cand.as_ref().is_none_or(|(c, _)| v < *c - 1e-12) {
                let mut split = best[k - p].1.clone();
                split.push(p);
                split.sort_unstable_by(|a, b| b.cmp(a));
                cand = Some((v, split));
            }
        }
        best[k] = cand.expect("k ≥ 1");
    }
    let (upper, split) = best[t].clone();
    Ok(Bracket { t, st_lower, known_lower, lower, upper, split })
}
