//! Two copies of an equatorial state `|φ⟩ = (|0⟩ + e^{iθ}|1⟩)/√2` converted
//! into one more robust single-qubit state by measuring `ZY` and applying a
//! `CNOT`.

use serde::Serialize;

use crate::cache::BasisStore;
use crate::error::{Error, Result};
use crate::pauli::PauliString;
use crate::robustness::rom;
use crate::stabilizer::CliffordGate;
use crate::state::{apply_stabilizer_channel, equatorial, ChannelOp, DensityOperator, MeasureMode};

/// `arctan(1/3)`, the end of the range where the closed form is claimed.
pub fn conversion_window() -> f64 {
    (1.0f64 / 3.0).atan()
}

/// `(2 sin θ + sin 2θ + cos 2θ + 1) / 2`.
pub fn conversion_closed_form(theta: f64) -> f64 {
    (2.0 * theta.sin() + (2.0 * theta).sin() + (2.0 * theta).cos() + 1.0) / 2.0
}

#[derive(Clone, Debug, Serialize)]
pub struct ConversionBranch {
    pub outcome: i8,
    pub probability: f64,
    pub bloch: [f64; 3],
    /// `‖r‖₁`, the output robustness when at least 1.
    pub l1: f64,
    #[serde(skip)]
    pub state: DensityOperator,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConversionReport {
    pub theta: f64,
    /// False outside `0 ≤ θ ≤ arctan(1/3)`; values are still computed.
    pub in_window: bool,
    pub branches: Vec<ConversionBranch>,
    /// `R(|φ⟩^{⊗2})` from the LP.
    pub input_robustness: f64,
    pub closed_form: f64,
}

impl ConversionReport {
    /// Largest deviation among branch `‖r‖₁`, the LP value and the closed form.
    pub fn max_deviation(&self) -> f64 {
        self.branches
            .iter()
            .map(|b| (b.l1 - self.closed_form).abs())
            .fold((self.input_robustness - self.closed_form).abs(), f64::max)
    }
}

pub fn two_to_one_conversion(theta: f64, store: &BasisStore) -> Result<ConversionReport> {
    if !theta.is_finite() {
        return Err(Error::InvalidArgument("angle must be finite".into()));
    }
    let phi = equatorial(theta)?;
    let pair = phi.tensor(&phi)?;
    let zy: PauliString = "ZY".parse()?;
    let mut branches = Vec::with_capacity(2);
    for outcome in [1i8, -1] {
        let ops = [
            ChannelOp::Measure { pauli: zy, mode: MeasureMode::Postselect(outcome) },
            ChannelOp::Clifford(CliffordGate::Cnot(0, 1)),
            ChannelOp::Discard(1),
        ];
        let (state, probability) = apply_stabilizer_channel(&pair, &ops)?;
        let bloch = state.bloch_vector()?;
        let l1 = bloch.iter().map(|v| v.abs()).sum();
        branches.push(ConversionBranch { outcome, probability, bloch, l1, state });
    }
    let basis = store.get(2)?;
    let input_robustness = rom(&pair, &basis)?.value;
    let window = conversion_window();
    Ok(ConversionReport {
        theta,
        in_window: (0.0..=window + 1e-15).contains(&theta),
        branches,
        input_robustness,
        closed_form: conversion_closed_form(theta),
    })
}
