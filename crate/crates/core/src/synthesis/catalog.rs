//! Known gate pairs whose resource states are Clifford-equivalent, so the
//! cheaper gate can stand in for the more expensive one.

use serde::Serialize;

use crate::cache::BasisStore;
use crate::error::Result;
use crate::robustness::rom;
use crate::state::spec::parse_gate_spec;
use crate::state::PhasePolynomialGate;

use super::search::{clifford_equivalent, SearchOutcome, MAX_SEARCH_QUBITS};

/// Accepted difference between the two robustness values.
pub const EQUAL_ROM_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CatalogEntry {
    pub source: &'static str,
    pub target: &'static str,
    pub t_before: usize,
    pub t_after: usize,
}

impl CatalogEntry {
    /// Source and target on a common register.
    pub fn gates(&self) -> Result<(PhasePolynomialGate, PhasePolynomialGate)> {
        let s = parse_gate_spec(self.source)?;
        let t = parse_gate_spec(self.target)?;
        let n = s.num_qubits().max(t.num_qubits());
        let pad = |g: PhasePolynomialGate| g.embed(n, &(0..g.num_qubits()).collect::<Vec<_>>());
        Ok((pad(s)?, pad(t)?))
    }
}

const fn entry(source: &'static str, target: &'static str, t_before: usize, t_after: usize) -> CatalogEntry {
    CatalogEntry { source, target, t_before, t_after }
}

/// `T` counts are those of the best known syntheses.
pub fn savings_catalog() -> Vec<CatalogEntry> {
    vec![
        entry("CCZ_123", "CS_12CCZ_123", 7, 4),
        entry("CCZ_123", "CS_12,13", 7, 4),
        entry("CCZ_123,145", "CS_12,13,14,15", 11, 8),
        entry("T_1,2,3CS_12,23,13", "T_2,3CS_12,23,13", 6, 5),
        entry("T_1,2CCZ_345", "T_1,2CS_35,45", 8, 6),
        entry("T_1,2,5CCZ_345", "T_1,2,5CS_35,45", 8, 7),
        entry("T_1,2,3,4CS_23,24,34", "T_1,4CS_24,34", 7, 6),
        entry("CS_12CCZ_345", "CS_12,35,45", 9, 7),
        entry("T_5CS_12,25CCZ_345", "T_5CS_14,25,35,45", 9, 7),
    ]
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CatalogCheck {
    pub entry: CatalogEntry,
    pub source_rom: f64,
    pub target_rom: f64,
    pub equal_rom: bool,
    /// `None` when the register exceeds the search limit or `budget` is zero.
    pub search: Option<SearchOutcome>,
}

/// Recomputes both robustness values and, if `budget > 0`, searches for the
/// Clifford word relating the resource states.
pub fn verify_catalog_entry(entry: &CatalogEntry, store: &BasisStore, budget: usize) -> Result<CatalogCheck> {
    let (s, t) = entry.gates()?;
    let (rs, rt) = (s.resource_state()?, t.resource_state()?);
    let basis = store.get(rs.num_qubits())?;
    let source_rom = rom(&rs, &basis)?.value;
    let target_rom = rom(&rt, &basis)?.value;
    let search = if budget > 0 && rs.num_qubits() <= MAX_SEARCH_QUBITS {
        Some(clifford_equivalent(&rs, &rt, budget)?)
    } else {
        None
    };
    Ok(CatalogCheck {
        entry: *entry,
        source_rom,
        target_rom,
        equal_rom: (source_rom - target_rom).abs() <= EQUAL_ROM_TOLERANCE,
        search,
    })
}
