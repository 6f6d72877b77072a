//! Monte-Carlo estimation of `Tr[P E(ρ)]` by sampling stabilizer
//! pseudomixtures for every ancilla slot.

use std::collections::HashMap;
use std::time::Instant;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cache::BasisStore;
use crate::error::{Error, Result};
use crate::pauli::PauliString;
use crate::robustness::{rom, Pseudomixture};
use crate::stabilizer::{StabilizerEnumeration, StabilizerTableau};

use super::circuit::Circuit;
use super::gadget::{gadgetize, GadgetizedCircuit, SlotKind, StabilizerOp};

/// Accuracy target and reproducibility settings.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EstimatorConfig {
    /// Additive accuracy `δ`.
    pub delta: f64,
    /// Failure probability `ε`.
    pub epsilon: f64,
    pub seed: u64,
    /// `|H⟩` block size for `T` ancillas.
    pub block_size: usize,
    /// Worker `w` draws from `ChaCha8Rng::seed_from_u64(seed ^ w)`.
    pub workers: usize,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        EstimatorConfig { delta: 0.05, epsilon: 0.01, seed: 0, block_size: 1, workers: 1 }
    }
}

impl EstimatorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(Error::InvalidArgument(format!("delta must be positive, got {}", self.delta)));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::InvalidArgument(format!("epsilon must lie in (0, 1), got {}", self.epsilon)));
        }
        if self.workers == 0 {
            return Err(Error::InvalidArgument("at least one worker is required".into()));
        }
        if self.block_size == 0 || self.block_size > super::MAX_BLOCK_SIZE {
            return Err(Error::InvalidArgument(format!(
                "block size must be in 1..={}",
                super::MAX_BLOCK_SIZE
            )));
        }
        Ok(())
    }
}

/// `(2/δ²) l1² ln(2/ε)` before rounding up.
pub fn hoeffding_samples(delta: f64, epsilon: f64, l1: f64) -> f64 {
    2.0 / (delta * delta) * l1 * l1 * (2.0 / epsilon).ln()
}

/// Samples guaranteeing `|estimate - truth| ≤ δ` with probability `≥ 1 - ε`.
pub fn sample_count(cfg: &EstimatorConfig, l1: f64) -> Result<u64> {
    cfg.validate()?;
    if !(l1 >= 1.0 - 1e-6) || !l1.is_finite() {
        return Err(Error::InvalidArgument(format!("l1 norm must be at least 1, got {l1}")));
    }
    let n = hoeffding_samples(cfg.delta, cfg.epsilon, l1.max(1.0)).ceil();
    if n > u64::MAX as f64 {
        return Err(Error::InvalidArgument("required sample count overflows".into()));
    }
    Ok(n as u64)
}

/// Result of [`estimate_expectation`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub estimate: f64,
    /// `Π Σ|x_i|` over slots; every sample outputs `±l1`.
    pub l1: f64,
    pub samples: u64,
    pub delta: f64,
    pub epsilon: f64,
    pub seed: u64,
    pub workers: usize,
    /// Not reproducible between runs.
    pub wall_time_secs: f64,
}

impl Estimate {
    pub const CSV_HEADER: &'static str = "estimate,l1,N,delta,epsilon,seed,wall_time_s";

    pub fn csv_row(&self) -> String {
        format!(
            "{:.6},{:.6},{},{},{},{},{:.3}",
            self.estimate, self.l1, self.samples, self.delta, self.epsilon, self.seed, self.wall_time_secs
        )
    }
}

/// Per-slot sampler over the support of one pseudomixture.
struct SlotSampler {
    first: usize,
    /// Stabilizer and destabilizer rows already placed on the full register.
    states: Vec<(Vec<PauliString>, Vec<PauliString>)>,
    negative: Vec<bool>,
    dist: WeightedIndex<f64>,
}

/// Draws from every slot independently and runs the tableau simulation.
struct Prepared<'a> {
    circuit: &'a GadgetizedCircuit,
    slots: Vec<SlotSampler>,
    l1: f64,
}

impl<'a> Prepared<'a> {
    fn new(g: &'a GadgetizedCircuit, mixtures: &[Pseudomixture]) -> Result<Self> {
        if mixtures.len() < g.slots.len() {
            return Err(Error::MissingMixture { slot: mixtures.len() });
        }
        if mixtures.len() > g.slots.len() {
            return Err(Error::InvalidArgument(format!(
                "{} mixtures for {} slots",
                mixtures.len(),
                g.slots.len()
            )));
        }
        let total = g.num_qubits();
        let mut enumerations: HashMap<usize, StabilizerEnumeration> = HashMap::new();
        let mut slots = Vec::with_capacity(g.slots.len());
        let mut l1 = 1.0;
        for (slot_index, (slot, mix)) in g.slots.iter().zip(mixtures).enumerate() {
            let k = slot.kind.num_qubits();
            if mix.num_qubits() != k {
                return Err(Error::QubitMismatch { left: k, right: mix.num_qubits() });
            }
            if mix.terms().is_empty() {
                return Err(Error::MissingMixture { slot: slot_index });
            }
            if !enumerations.contains_key(&k) {
                enumerations.insert(k, StabilizerEnumeration::new(k)?);
            }
            let en = &enumerations[&k];
            let positions: Vec<usize> = (slot.first..slot.first + k).collect();
            let mut states = Vec::with_capacity(mix.terms().len());
            let mut negative = Vec::with_capacity(mix.terms().len());
            let mut weights = Vec::with_capacity(mix.terms().len());
            for &(index, x) in mix.terms() {
                if index >= en.len() {
                    return Err(Error::InvalidArgument(format!("state index {index} out of range")));
                }
                let t = en.tableau(index)?;
                let stab = t.stabilizers().iter().map(|p| p.embed(total, &positions)).collect::<Result<_>>()?;
                let destab = t.destabilizers().iter().map(|p| p.embed(total, &positions)).collect::<Result<_>>()?;
                states.push((stab, destab));
                negative.push(x < 0.0);
                weights.push(x.abs());
            }
            let dist = WeightedIndex::new(&weights)
                .map_err(|e| Error::InvalidArgument(format!("slot {slot_index}: {e}")))?;
            l1 *= mix.l1_norm();
            slots.push(SlotSampler { first: slot.first, states, negative, dist });
        }
        Ok(Prepared { circuit: g, slots, l1 })
    }

    /// One sample `sign · m ∈ {-1, +1}`.
    fn sample(&self, rng: &mut ChaCha8Rng, data_rows: &(Vec<PauliString>, Vec<PauliString>)) -> Result<i64> {
        let g = self.circuit;
        let total = g.num_qubits();
        let mut stab = Vec::with_capacity(total);
        let mut destab = Vec::with_capacity(total);
        stab.extend_from_slice(&data_rows.0);
        destab.extend_from_slice(&data_rows.1);
        let mut sign = 1i64;
        for slot in &self.slots {
            debug_assert_eq!(slot.first, stab.len());
            let i = slot.dist.sample(rng);
            if slot.negative[i] {
                sign = -sign;
            }
            stab.extend_from_slice(&slot.states[i].0);
            destab.extend_from_slice(&slot.states[i].1);
        }
        let mut tab = StabilizerTableau::from_rows_unchecked(stab, destab);
        let mut records = vec![false; g.n_records];
        for op in &g.ops {
            match op {
                StabilizerOp::Clifford(c) => tab.apply(c)?,
                StabilizerOp::Measure { pauli, record } => {
                    let m = tab.measure(pauli, rng)?;
                    if let Some(r) = record {
                        records[*r] = m.outcome < 0;
                    }
                }
                StabilizerOp::Conditional { records: bits, corrections } => {
                    let s = bits.iter().enumerate().fold(0usize, |acc, (i, &r)| acc | ((records[r] as usize) << i));
                    tab.apply_all(&corrections[s])?;
                }
            }
        }
        let m = tab.measure(&g.observable, rng)?.outcome as i64;
        Ok(sign * m)
    }
}

/// Runs `N = sample_count(cfg, Π Σ|x|)` samples split across `cfg.workers`
/// streams. The result depends only on the inputs and `cfg`, not on thread
/// scheduling.
pub fn estimate_expectation(
    g: &GadgetizedCircuit,
    mixtures: &[Pseudomixture],
    cfg: &EstimatorConfig,
) -> Result<Estimate> {
    cfg.validate()?;
    let start = Instant::now();
    let prepared = Prepared::new(g, mixtures)?;
    let samples = sample_count(cfg, prepared.l1)?;
    let sum = run_samples(&prepared, samples, cfg)?;
    Ok(Estimate {
        estimate: sum as f64 * prepared.l1 / samples as f64,
        l1: prepared.l1,
        samples,
        delta: cfg.delta,
        epsilon: cfg.epsilon,
        seed: cfg.seed,
        workers: cfg.workers,
        wall_time_secs: start.elapsed().as_secs_f64(),
    })
}

/// Like [`estimate_expectation`] with an explicit sample count; returns every
/// per-sample output `±l1`. Intended for statistical checks.
pub fn sample_outputs(
    g: &GadgetizedCircuit,
    mixtures: &[Pseudomixture],
    samples: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    let prepared = Prepared::new(g, mixtures)?;
    let data = data_rows(g.n_data, g.num_qubits());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples).map(|_| Ok(prepared.sample(&mut rng, &data)? as f64 * prepared.l1)).collect()
}

fn data_rows(n_data: usize, total: usize) -> (Vec<PauliString>, Vec<PauliString>) {
    let zeros = StabilizerTableau::zero_state(n_data);
    let positions: Vec<usize> = (0..n_data).collect();
    let embed = |rows: &[PauliString]| -> Vec<PauliString> {
        rows.iter().map(|p| p.embed(total, &positions).expect("data qubits fit")).collect()
    };
    (embed(zeros.stabilizers()), embed(zeros.destabilizers()))
}

fn run_samples(p: &Prepared<'_>, samples: u64, cfg: &EstimatorConfig) -> Result<i64> {
    let data = data_rows(p.circuit.n_data, p.circuit.num_qubits());
    let workers = cfg.workers as u64;
    let partial: Vec<Result<i64>> = (0..workers)
        .into_par_iter()
        .map(|w| {
            let count = samples / workers + u64::from(w < samples % workers);
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ w);
            let mut acc = 0i64;
            for _ in 0..count {
                acc += p.sample(&mut rng, &data)?;
            }
            Ok(acc)
        })
        .collect();
    partial.into_iter().sum()
}

/// Solves the robustness LP for every slot, reusing results for repeated kinds.
pub fn prepare_mixtures(g: &GadgetizedCircuit, store: &BasisStore) -> Result<Vec<Pseudomixture>> {
    let mut solved: HashMap<SlotKind, Pseudomixture> = HashMap::new();
    let mut out = Vec::with_capacity(g.slots.len());
    for slot in &g.slots {
        if let Some(m) = solved.get(&slot.kind) {
            out.push(m.clone());
            continue;
        }
        let rho = slot.kind.resource_state()?;
        let basis = store.get(rho.num_qubits())?;
        let mix = rom(&rho, &basis)?.mixture;
        solved.insert(slot.kind.clone(), mix.clone());
        out.push(mix);
    }
    Ok(out)
}

/// Gadgetizes with `cfg.block_size`, solves the slot LPs and estimates.
pub fn simulate(c: &Circuit, store: &BasisStore, cfg: &EstimatorConfig) -> Result<Estimate> {
    cfg.validate()?;
    let g = gadgetize(c, cfg.block_size)?;
    let mixtures = prepare_mixtures(&g, store)?;
    estimate_expectation(&g, &mixtures, cfg)
}
