//! Textual state specifications.
//!
//! ```text
//! spec   := term (sep term)*            sep: '⊗', "(x)" or whitespace
//! term   := "H" ("^" int)? | "F" ("^" int)?
//!         | gate+                       adjacent gates multiply
//!         | "bloch(" r "," r "," r ")" | "hoggar" | "jam(" target ")"
//!         | "equatorial(" angle ")" | "rhoH(" r ")" | "rhoF(" r ")"
//! gate   := name ("_" list)?            name ∈ {I, T, S, Z, CS, CZ, CCZ}
//! list   := "{" digits ("," digits)* "}" | digits ("," digits)*
//! target := gates | "optimal1" | "optimal2"
//! ```
//!
//! Qubits are single 1-based digits; each comma-separated group names one
//! application, so `CS_12,23` is `CS` on (1,2) times `CS` on (2,3). A name
//! without a list acts on qubits `1..=arity`. Gates separated only by
//! whitespace or nothing form one product whose size is its largest qubit.

use std::fmt;

use thiserror::Error;

use crate::error::Result;

use super::{
    bloch_state, equatorial, f_state, h_state, hoggar_state, jamiolkowski_state,
    optimal_unitary_one_qubit, optimal_unitary_two_qubit, rho_f, rho_h, DensityOperator,
    PhasePolynomialGate,
};

#[derive(Clone, Debug, Error, PartialEq)]
pub enum ParseError {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("qubit {qubit} repeated within one gate at position {position}")]
    RepeatedQubit { position: usize, qubit: usize },
}

/// Argument of `jam(...)`.
#[derive(Clone, Debug, PartialEq)]
pub enum JamTarget {
    Gate(PhasePolynomialGate),
    OptimalOneQubit,
    OptimalTwoQubit,
}

#[derive(Clone, Debug, PartialEq)]
pub enum StateTerm {
    H(usize),
    F(usize),
    Gate(PhasePolynomialGate),
    Bloch([f64; 3]),
    Hoggar,
    Jam(JamTarget),
    Equatorial(f64),
    RhoH(f64),
    RhoF(f64),
}

/// Tensor product of terms, leftmost on the leading qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct StateSpec {
    pub terms: Vec<StateTerm>,
}

pub fn parse_state_spec(text: &str) -> std::result::Result<StateSpec, ParseError> {
    let mut p = Parser::new(text);
    let spec = p.spec()?;
    p.skip_ws();
    if !p.at_end() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(spec)
}

/// Parses a single product of gates, e.g. `"T_1 CS_23"`.
pub fn parse_gate_spec(text: &str) -> std::result::Result<PhasePolynomialGate, ParseError> {
    let spec = parse_state_spec(text)?;
    match spec.terms.as_slice() {
        [StateTerm::Gate(g)] => Ok(g.clone()),
        _ => Err(ParseError::Syntax { position: 0, message: "expected a single diagonal gate".into() }),
    }
}

impl std::str::FromStr for StateSpec {
    type Err = ParseError;
    fn from_str(s: &str) -> std::result::Result<Self, ParseError> {
        parse_state_spec(s)
    }
}

impl StateTerm {
    pub fn num_qubits(&self) -> usize {
        match self {
            StateTerm::H(k) | StateTerm::F(k) => *k,
            StateTerm::Gate(g) => g.num_qubits(),
            StateTerm::Hoggar => 3,
            StateTerm::Jam(JamTarget::Gate(g)) => 2 * g.num_qubits(),
            StateTerm::Jam(JamTarget::OptimalOneQubit) => 2,
            StateTerm::Jam(JamTarget::OptimalTwoQubit) => 4,
            StateTerm::Bloch(_) | StateTerm::Equatorial(_) | StateTerm::RhoH(_) | StateTerm::RhoF(_) => 1,
        }
    }

    pub fn to_density(&self) -> Result<DensityOperator> {
        match self {
            StateTerm::H(k) => h_state().tensor_power(*k),
            StateTerm::F(k) => f_state().tensor_power(*k),
            StateTerm::Gate(g) => g.resource_state(),
            StateTerm::Bloch(r) => bloch_state(*r),
            StateTerm::Hoggar => Ok(hoggar_state()),
            StateTerm::Jam(JamTarget::Gate(g)) => jamiolkowski_state(&g.to_matrix()),
            StateTerm::Jam(JamTarget::OptimalOneQubit) => jamiolkowski_state(&optimal_unitary_one_qubit()),
            StateTerm::Jam(JamTarget::OptimalTwoQubit) => jamiolkowski_state(&optimal_unitary_two_qubit()),
            StateTerm::Equatorial(t) => equatorial(*t),
            StateTerm::RhoH(r) => rho_h(*r),
            StateTerm::RhoF(r) => rho_f(*r),
        }
    }
}

impl StateSpec {
    pub fn parse(text: &str) -> std::result::Result<Self, ParseError> {
        parse_state_spec(text)
    }

    pub fn num_qubits(&self) -> usize {
        self.terms.iter().map(StateTerm::num_qubits).sum()
    }

    pub fn to_density(&self) -> Result<DensityOperator> {
        let mut acc: Option<DensityOperator> = None;
        for t in &self.terms {
            let rho = t.to_density()?;
            acc = Some(match acc {
                None => rho,
                Some(a) => a.tensor(&rho)?,
            });
        }
        Ok(acc.expect("parser never yields an empty spec"))
    }

    /// The gate when the spec is a single diagonal gate term.
    pub fn as_gate(&self) -> Option<&PhasePolynomialGate> {
        match self.terms.as_slice() {
            [StateTerm::Gate(g)] => Some(g),
            _ => None,
        }
    }
}

impl fmt::Display for StateTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateTerm::H(k) => write!(f, "H^{k}"),
            StateTerm::F(k) => write!(f, "F^{k}"),
            StateTerm::Gate(g) => write!(f, "{g}"),
            StateTerm::Bloch(r) => write!(f, "bloch({},{},{})", r[0], r[1], r[2]),
            StateTerm::Hoggar => write!(f, "hoggar"),
            StateTerm::Jam(JamTarget::Gate(g)) => write!(f, "jam({g})"),
            StateTerm::Jam(JamTarget::OptimalOneQubit) => write!(f, "jam(optimal1)"),
            StateTerm::Jam(JamTarget::OptimalTwoQubit) => write!(f, "jam(optimal2)"),
            StateTerm::Equatorial(t) => write!(f, "equatorial({t})"),
            StateTerm::RhoH(r) => write!(f, "rhoH({r})"),
            StateTerm::RhoF(r) => write!(f, "rhoF({r})"),
        }
    }
}

impl fmt::Display for StateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.terms.iter().map(|t| t.to_string()).collect();
        write!(f, "{}", parts.join(" ⊗ "))
    }
}

const GATE_NAMES: [&str; 7] = ["CCZ", "CS", "CZ", "T", "S", "Z", "I"];

fn arity(name: &str) -> usize {
    match name {
        "CCZ" => 3,
        "CS" | "CZ" => 2,
        "I" => 0,
        _ => 1,
    }
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn new(text: &str) -> Self {
        Parser { chars: text.chars().collect(), pos: 0 }
    }

    fn error(&self, message: &str) -> ParseError {
        ParseError::Syntax { position: self.pos, message: message.to_string() }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.chars.len()
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn skip_ws(&mut self) -> bool {
        let start = self.pos;
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
        self.pos > start
    }

    fn starts_with(&self, s: &str) -> bool {
        let mut i = self.pos;
        for c in s.chars() {
            if self.chars.get(i) != Some(&c) {
                return false;
            }
            i += 1;
        }
        true
    }

    fn eat(&mut self, s: &str) -> bool {
        if self.starts_with(s) {
            self.pos += s.chars().count();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> std::result::Result<(), ParseError> {
        if self.eat(s) {
            Ok(())
        } else {
            Err(self.error(&format!("expected '{s}'")))
        }
    }

    fn spec(&mut self) -> std::result::Result<StateSpec, ParseError> {
        self.skip_ws();
        let mut terms = vec![self.term()?];
        loop {
            let had_ws = self.skip_ws();
            if self.eat("⊗") || self.eat("(x)") {
                self.skip_ws();
                terms.push(self.term()?);
            } else if had_ws && !self.at_end() && self.peek() != Some(')') {
                terms.push(self.term()?);
            } else {
                break;
            }
        }
        Ok(StateSpec { terms })
    }

    fn term(&mut self) -> std::result::Result<StateTerm, ParseError> {
        let start = self.pos;
        let keyword = |p: &mut Parser, kw: &str| {
            if p.starts_with(kw) && p.chars.get(p.pos + kw.len()) == Some(&'(') {
                p.pos += kw.len() + 1;
                true
            } else {
                false
            }
        };
        if keyword(self, "bloch") {
            let x = self.number()?;
            self.expect(",")?;
            let y = self.number()?;
            self.expect(",")?;
            let z = self.number()?;
            self.expect(")")?;
            return Ok(StateTerm::Bloch([x, y, z]));
        }
        if keyword(self, "equatorial") {
            let t = self.number()?;
            self.expect(")")?;
            return Ok(StateTerm::Equatorial(t));
        }
        if keyword(self, "rhoH") {
            let r = self.number()?;
            self.expect(")")?;
            return Ok(StateTerm::RhoH(r));
        }
        if keyword(self, "rhoF") {
            let r = self.number()?;
            self.expect(")")?;
            return Ok(StateTerm::RhoF(r));
        }
        if keyword(self, "jam") {
            self.skip_ws();
            let target = if self.eat("optimal1") {
                JamTarget::OptimalOneQubit
            } else if self.eat("optimal2") {
                JamTarget::OptimalTwoQubit
            } else {
                JamTarget::Gate(self.gate_group()?)
            };
            self.skip_ws();
            self.expect(")")?;
            return Ok(StateTerm::Jam(target));
        }
        if self.starts_with("hoggar") {
            self.pos += "hoggar".len();
            return Ok(StateTerm::Hoggar);
        }
        for (name, ctor) in [("H", StateTerm::H as fn(usize) -> StateTerm), ("F", StateTerm::F)] {
            if self.starts_with(name) {
                self.pos += 1;
                let k = if self.eat("^") { self.integer()? } else { 1 };
                if k == 0 {
                    self.pos = start;
                    return Err(self.error("tensor power must be at least 1"));
                }
                return Ok(ctor(k));
            }
        }
        if GATE_NAMES.iter().any(|g| self.starts_with(g)) {
            return Ok(StateTerm::Gate(self.gate_group()?));
        }
        Err(self.error("expected a state term"))
    }

    /// One or more gate factors, separated by nothing or by plain spaces.
    fn gate_group(&mut self) -> std::result::Result<PhasePolynomialGate, ParseError> {
        let mut factors: Vec<(&'static str, Vec<usize>)> = Vec::new();
        loop {
            let Some(name) = GATE_NAMES.iter().copied().find(|g| self.starts_with(g)) else {
                return Err(self.error("expected a gate name"));
            };
            self.pos += name.len();
            let groups = if self.eat("_") {
                let braced = self.eat("{");
                let mut groups = vec![self.qubit_group(name)?];
                while self.eat(",") {
                    groups.push(self.qubit_group(name)?);
                }
                if braced {
                    self.expect("}")?;
                }
                groups
            } else {
                vec![(0..arity(name)).collect()]
            };
            for g in groups {
                factors.push((name, g));
            }
            // Continue the product if another gate name follows directly or after spaces.
            let save = self.pos;
            self.skip_ws();
            if GATE_NAMES.iter().any(|g| self.starts_with(g)) {
                continue;
            }
            self.pos = save;
            break;
        }
        let n = factors.iter().flat_map(|(_, q)| q.iter().copied()).max().map_or(1, |m| m + 1);
        let mut gate = PhasePolynomialGate::identity(n);
        for (name, q) in factors {
            let r = match name {
                "T" => gate.add_t(q[0], 1),
                "S" => gate.add_t(q[0], 2),
                "Z" => gate.add_t(q[0], 4),
                "CS" => gate.add_cs(q[0], q[1], 1),
                "CZ" => gate.add_cs(q[0], q[1], 2),
                "CCZ" => gate.add_ccz(q[0], q[1], q[2]),
                _ => Ok(()),
            };
            r.expect("qubits validated by the parser");
        }
        Ok(gate)
    }

    fn qubit_group(&mut self, name: &str) -> std::result::Result<Vec<usize>, ParseError> {
        let start = self.pos;
        let mut qubits = Vec::new();
        while let Some(d) = self.peek().and_then(|c| c.to_digit(10)) {
            if d == 0 {
                return Err(self.error("qubit indices are 1-based"));
            }
            let q = d as usize - 1;
            if qubits.contains(&q) {
                return Err(ParseError::RepeatedQubit { position: self.pos, qubit: d as usize });
            }
            qubits.push(q);
            self.pos += 1;
        }
        let want = arity(name);
        if name == "I" {
            return Ok(qubits);
        }
        if qubits.len() != want {
            self.pos = start;
            return Err(self.error(&format!("{name} takes {want} qubit digit(s)")));
        }
        Ok(qubits)
    }

    fn integer(&mut self) -> std::result::Result<usize, ParseError> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse().map_err(|_| ParseError::Syntax { position: start, message: "expected an integer".into() })
    }

    fn number(&mut self) -> std::result::Result<f64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit() || "+-.eE".contains(c)) {
            self.pos += 1;
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        let v = s.parse::<f64>().map_err(|_| ParseError::Syntax { position: start, message: format!("invalid number '{s}'") })?;
        self.skip_ws();
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gate(text: &str) -> PhasePolynomialGate {
        parse_gate_spec(text).unwrap()
    }

    #[test]
    fn eleven_style_gate() {
        let g = gate("T_1,2,3 CS_12,23,13");
        assert_eq!(g.num_qubits(), 3);
        assert_eq!(g.linear().len(), 3);
        assert!(g.linear().values().all(|&l| l == 1));
        assert_eq!(g.quadratic().len(), 3);
        assert!(g.quadratic().values().all(|&k| k == 1));
    }

    #[test]
    fn concatenated_and_braced_forms_agree() {
        assert_eq!(gate("T_{1,2}CS_{35,45}"), gate("T_1,2 CS_35,45"));
        assert_eq!(gate("CS_12CCZ_123"), gate("CS_12 CCZ_123"));
    }

    #[test]
    fn default_qubits() {
        assert_eq!(gate("CCZ"), gate("CCZ_123"));
        assert_eq!(gate("T"), gate("T_1"));
    }

    #[test]
    fn tensor_of_terms() {
        let s = parse_state_spec("H^2").unwrap();
        assert_eq!(s.terms, vec![StateTerm::H(2)]);
        assert_eq!(s.num_qubits(), 2);
        let s = parse_state_spec("H ⊗ F^2").unwrap();
        assert_eq!(s.terms, vec![StateTerm::H(1), StateTerm::F(2)]);
        let s = parse_state_spec("H (x) CCZ").unwrap();
        assert_eq!(s.num_qubits(), 4);
    }

    #[test]
    fn functions() {
        let s = parse_state_spec("bloch(0.3, 0.5,0.1)").unwrap();
        assert_eq!(s.terms, vec![StateTerm::Bloch([0.3, 0.5, 0.1])]);
        assert_eq!(parse_state_spec("rhoF(0.9)").unwrap().terms, vec![StateTerm::RhoF(0.9)]);
        assert_eq!(parse_state_spec("equatorial(0.2)").unwrap().terms, vec![StateTerm::Equatorial(0.2)]);
        assert_eq!(parse_state_spec("hoggar").unwrap().terms, vec![StateTerm::Hoggar]);
        assert_eq!(parse_state_spec("jam(optimal2)").unwrap().num_qubits(), 4);
        assert_eq!(parse_state_spec("jam(T)").unwrap().num_qubits(), 2);
    }

    #[test]
    fn errors() {
        assert!(matches!(parse_state_spec("CS_11"), Err(ParseError::RepeatedQubit { qubit: 1, .. })));
        assert!(matches!(parse_state_spec("CS_1"), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_state_spec("Q"), Err(ParseError::Syntax { position: 0, .. })));
        assert!(parse_state_spec("H^").is_err());
        assert!(parse_state_spec("H^0").is_err());
        assert!(parse_state_spec("bloch(1,2)").is_err());
        assert!(parse_state_spec("").is_err());
        assert!(parse_state_spec("T_0").is_err());
    }

    #[test]
    fn display_reparses() {
        for text in ["T_1,2,3 CS_12,23,13", "CCZ_123,145", "T_5CS_12,25CCZ_345", "S_1CZ_12"] {
            let g = gate(text);
            assert_eq!(gate(&g.to_string()), g);
        }
    }
}
