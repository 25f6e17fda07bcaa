//! Bundled molecular Hamiltonians with their reference values.

use std::collections::BTreeMap;

use serde::Deserialize;

use crate::hamiltonian::{load_hamiltonian, Hamiltonian};

/// Reference values stored next to each fixture.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct FixtureExpectation {
    pub system: String,
    pub qubits: usize,
    pub full_terms: usize,
    pub noncontextual_terms: usize,
    pub generating_set_size: usize,
    /// Reference errors in units of chemical accuracy.
    pub eps_noncontextual: f64,
    pub eps_diagonal: f64,
    pub witness: WitnessAnnotation,
}

/// Reference minimizing parameters, keyed by the operator whose expectation
/// they fix.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct WitnessAnnotation {
    pub q: BTreeMap<String, i8>,
    pub r: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Copy)]
pub struct Fixture {
    pub name: &'static str,
    full: &'static str,
    noncon: &'static str,
    expected: &'static str,
}

macro_rules! fixture {
    ($name:literal) => {
        Fixture {
            name: $name,
            full: include_str!(concat!("../../../fixtures/", $name, "_full.json")),
            noncon: include_str!(concat!("../../../fixtures/", $name, "_noncon.json")),
            expected: include_str!(concat!("../../../fixtures/", $name, "_expected.json")),
        }
    };
}

static FIXTURES: [Fixture; 4] = [
    fixture!("heh+"),
    fixture!("lih_hempel"),
    fixture!("lih_kandala"),
    fixture!("beh2"),
];

impl Fixture {
    /// The complete Hamiltonian.
    pub fn full(&self) -> Hamiltonian {
        load_hamiltonian(self.full).expect("bundled fixture parses")
    }

    /// The reference noncontextual sub-Hamiltonian.
    pub fn noncontextual(&self) -> Hamiltonian {
        load_hamiltonian(self.noncon).expect("bundled fixture parses")
    }

    pub fn expected(&self) -> FixtureExpectation {
        serde_json::from_str(self.expected).expect("bundled expectation parses")
    }

    pub fn full_text(&self) -> &'static str {
        self.full
    }

    pub fn noncontextual_text(&self) -> &'static str {
        self.noncon
    }
}

/// All bundled fixtures, smallest first.
pub fn all() -> &'static [Fixture] {
    &FIXTURES
}

/// Looks a fixture up by name.
pub fn by_name(name: &str) -> Option<&'static Fixture> {
    FIXTURES.iter().find(|f| f.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_load() {
        for f in all() {
            let e = f.expected();
            assert_eq!(f.full().support_size(), e.full_terms, "{}", f.name);
            assert_eq!(f.noncontextual().support_size(), e.noncontextual_terms, "{}", f.name);
            assert_eq!(f.full().num_qubits(), e.qubits);
        }
        assert!(by_name("heh+").is_some());
        assert!(by_name("h2").is_none());
    }
}
