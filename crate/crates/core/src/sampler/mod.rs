//! Classical simulation of stabilizer circuits with magic-state injection by
//! sampling quasiprobability decompositions of the resource states.

mod circuit;
mod cost;
mod estimate;
mod gadget;

pub use circuit::{parse_circuit, Circuit, CircuitOp};
pub use cost::{simulation_cost_report, CostReport, CostStrategy, SlotCost};
pub use estimate::{
    estimate_expectation, hoeffding_samples, prepare_mixtures, sample_count, sample_outputs, simulate,
    Estimate, EstimatorConfig,
};
pub use gadget::{gadgetize, AncillaSlot, GadgetizedCircuit, SlotKind, StabilizerOp, MAX_BLOCK_SIZE};
