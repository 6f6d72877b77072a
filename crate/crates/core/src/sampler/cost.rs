//! Sampling overhead of a circuit under a choice of resource states.

use serde::Serialize;

use crate::cache::BasisStore;
use crate::error::{Error, Result};
use crate::robustness::{h_robustness_reference, rom};
use crate::synthesis::t_count_lower_bound;

use super::circuit::{Circuit, CircuitOp};
use super::estimate::hoeffding_samples;
use super::MAX_BLOCK_SIZE;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CostStrategy {
    /// Every non-Clifford gate is paid for with `T` gates, grouped into
    /// `|H^{⊗m}⟩` blocks. A `GATE` costs its robustness lower bound on the
    /// `T` count.
    TBlocks { m: usize },
    /// `T` gates grouped into `|H^{⊗m}⟩` blocks; each `GATE` consumes its own
    /// resource state.
    Native { m: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SlotCost {
    pub label: String,
    pub count: usize,
    /// Robustness of one copy.
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CostReport {
    pub strategy: CostStrategy,
    /// `T` gates paid for through `|H⟩` blocks.
    pub t_gates: usize,
    pub slots: Vec<SlotCost>,
    /// Product of all slot robustness values.
    pub l1: f64,
    /// `R(|H^{⊗m}⟩)^{1/m}`, the growth of `l1` per `T` gate.
    pub per_t_factor: f64,
    pub delta: f64,
    pub epsilon: f64,
    pub samples: u64,
}

pub fn simulation_cost_report(
    c: &Circuit,
    strategy: CostStrategy,
    delta: f64,
    epsilon: f64,
    store: &BasisStore,
) -> Result<CostReport> {
    let m = match strategy {
        CostStrategy::TBlocks { m } | CostStrategy::Native { m } => m,
    };
    if m == 0 || m > MAX_BLOCK_SIZE {
        return Err(Error::InvalidArgument(format!("block size must be in 1..={MAX_BLOCK_SIZE}")));
    }
    if !(delta > 0.0) || !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidArgument("need delta > 0 and 0 < epsilon < 1".into()));
    }
    let mut t_gates = c.t_count();
    let mut slots: Vec<SlotCost> = Vec::new();
    for op in c.ops() {
        let CircuitOp::Diagonal(g) = op else { continue };
        if g.is_clifford() {
            continue;
        }
        match strategy {
            CostStrategy::TBlocks { .. } => {
                let v = t_count_lower_bound(g, None, store)?;
                if !v.lower_t_exact {
                    return Err(Error::InvalidArgument(format!("no exact T-count bound for {g}")));
                }
                t_gates += v.lower_t;
            }
            CostStrategy::Native { .. } => {
                let label = g.to_string();
                if let Some(s) = slots.iter_mut().find(|s| s.label == label) {
                    s.count += 1;
                    continue;
                }
                let rho = g.resource_state()?;
                let basis = store.get(rho.num_qubits())?;
                slots.push(SlotCost { label, count: 1, value: rom(&rho, &basis)?.value });
            }
        }
    }
    let h = |k: usize| h_robustness_reference(k).expect("k ≤ 5");
    let mut blocks = Vec::new();
    if t_gates / m > 0 {
        blocks.push(SlotCost { label: format!("H^{m}"), count: t_gates / m, value: h(m) });
    }
    if t_gates % m > 0 {
        let r = t_gates % m;
        blocks.push(SlotCost { label: format!("H^{r}"), count: 1, value: h(r) });
    }
    blocks.extend(slots);
    let l1: f64 = blocks.iter().map(|s| s.value.powi(s.count as i32)).product();
    let samples = hoeffding_samples(delta, epsilon, l1).ceil() as u64;
    Ok(CostReport {
        strategy,
        t_gates,
        slots: blocks,
        l1,
        per_t_factor: h(m).powf(1.0 / m as f64),
        delta,
        epsilon,
        samples,
    })
}
