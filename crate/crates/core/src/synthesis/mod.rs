//! `T`-count lower bounds from robustness, Clifford equivalence of resource
//! states, the catalog of `T`-saving rewrites, gate classification and the
//! two-to-one equatorial conversion.

mod catalog;
mod classify;
mod conversion;
mod search;

pub use catalog::{savings_catalog, verify_catalog_entry, CatalogCheck, CatalogEntry, EQUAL_ROM_TOLERANCE};
pub use classify::{classification_table, literature_t_cost, ClassRow, LiteratureCost};
pub use conversion::{conversion_closed_form, conversion_window, two_to_one_conversion, ConversionBranch, ConversionReport};
pub use search::{clifford_equivalent, pauli_spectrum, CliffordWord, SearchOutcome, DEFAULT_SEARCH_BUDGET, MAX_SEARCH_QUBITS};

use serde::Serialize;

use crate::cache::BasisStore;
use crate::error::{Error, Result};
use crate::pauli::MAX_DENSE_QUBITS;
use crate::robustness::{h_robustness_reference, rom, rom_bracket};
use crate::state::PhasePolynomialGate;

/// Slack beyond the LP gap before `R(|U⟩) ≤ R(|H^{⊗t}⟩)` is accepted.
pub const VERDICT_MARGIN: f64 = 1e-5;

/// Largest `t` tried when bracketing beyond five copies.
const MAX_BRACKET_T: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    /// The claimed `T` count equals the proven lower bound.
    Optimal,
    /// The claimed count exceeds every count robustness can rule out.
    Gap,
    Unknown,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Optimal => "optimal",
            Verdict::Gap => "gap",
            Verdict::Unknown => "unknown",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SynthesisVerdict {
    #[serde(serialize_with = "display")]
    pub gate: PhasePolynomialGate,
    pub rom_value: f64,
    /// Every synthesis of the gate needs at least `lower_t` `T` gates.
    pub lower_t: usize,
    /// Smallest `t` with `R(|U⟩) ≤ R(|H^{⊗t}⟩)` proven; equals `lower_t`
    /// unless brackets beyond five copies are inconclusive.
    pub upper_t: usize,
    pub lower_t_exact: bool,
    pub known_t: Option<usize>,
    pub verdict: Verdict,
}

fn display<T: std::fmt::Display, S: serde::Serializer>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

/// Compares `R(|U⟩)` against `R(|H^{⊗t}⟩)`: exact values up to five copies,
/// brackets beyond. Fails if `known_t` is below the proven bound.
pub fn t_count_lower_bound(
    g: &PhasePolynomialGate,
    known_t: Option<usize>,
    store: &BasisStore,
) -> Result<SynthesisVerdict> {
    let n = g.num_qubits();
    if n == 0 || n > MAX_DENSE_QUBITS {
        return Err(Error::UnsupportedQubitCount { n, min: 1, max: MAX_DENSE_QUBITS });
    }
    let rho = g.resource_state()?;
    let basis = store.get(n)?;
    let result = rom(&rho, &basis)?;
    let (lower_t, upper_t) = t_range(result.value, VERDICT_MARGIN + result.gap)?;
    let verdict = match known_t {
        None => Verdict::Unknown,
        Some(k) if k < lower_t => {
            return Err(Error::InvalidArgument(format!(
                "claimed T count {k} for {g} is below the proven lower bound {lower_t}"
            )))
        }
        Some(k) if k == lower_t => Verdict::Optimal,
        Some(k) if k > upper_t => Verdict::Gap,
        Some(_) => Verdict::Unknown,
    };
    Ok(SynthesisVerdict {
        gate: g.clone(),
        rom_value: result.value,
        lower_t,
        upper_t,
        lower_t_exact: lower_t == upper_t,
        known_t,
        verdict,
    })
}

/// `(lo, hi)`: every `t < lo` has `R(|H^{⊗t}⟩) < value`; `value ≤ R(|H^{⊗hi}⟩)`.
pub fn t_range(value: f64, margin: f64) -> Result<(usize, usize)> {
    let mut lo = None;
    for t in 0..=MAX_BRACKET_T {
        let (lower, upper) = match h_robustness_reference(t) {
            Some(r) => (r, r),
            None => {
                let b = rom_bracket(t, None)?;
                (b.lower, b.upper)
            }
        };
        if lo.is_none() && value <= upper + margin {
            lo = Some(t);
        }
        if value <= lower + margin {
            return Ok((lo.unwrap_or(t), t));
        }
    }
    Err(Error::InvalidArgument(format!("robustness {value} exceeds the bracketed range")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::spec::parse_gate_spec;

    #[test]
    fn small_gate_verdicts() {
        let store = BasisStore::in_memory();
        let ccz = t_count_lower_bound(&parse_gate_spec("CCZ_123").unwrap(), Some(4), &store).unwrap();
        assert_eq!((ccz.lower_t, ccz.verdict), (4, Verdict::Optimal));
        let cs = t_count_lower_bound(&parse_gate_spec("CS_12").unwrap(), Some(4), &store).unwrap();
        assert_eq!((cs.lower_t, cs.verdict), (3, Verdict::Gap));
        let t = t_count_lower_bound(&parse_gate_spec("T_1").unwrap(), None, &store).unwrap();
        assert_eq!((t.lower_t, t.verdict), (1, Verdict::Unknown));
        let s = t_count_lower_bound(&parse_gate_spec("S_1").unwrap(), Some(0), &store).unwrap();
        assert_eq!(s.lower_t, 0);
        assert!(t_count_lower_bound(&parse_gate_spec("CCZ_123").unwrap(), Some(3), &store).is_err());
    }

    #[test]
    fn ranges_beyond_five_copies() {
        assert_eq!(t_range(1.0, 1e-5).unwrap(), (0, 0));
        // Between R(H^5) and the st-norm bound at six copies.
        let (lo, hi) = t_range(3.7, 1e-5).unwrap();
        assert_eq!(lo, 6);
        assert!(hi > lo);
    }
}
