//! Weighted Pauli Hamiltonians and their on-disk key-value format.
//!
//! The text format is a JSON object mapping Pauli labels to real coefficients,
//! e.g. `{"II": -1.46658, "IZ": -0.39863}`. The all-identity label is routed to
//! the identity offset; every other label becomes a [`PauliTerm`].

use std::fmt;

use serde::de::{Deserializer, MapAccess, Visitor};
use serde::Deserialize;
use thiserror::Error;

use crate::pauli::{PauliError, PauliOp};

#[derive(Debug, Error)]
pub enum HamiltonianError {
    #[error("malformed Hamiltonian text: {0}")]
    Syntax(String),
    #[error("invalid Pauli label {label:?}: {source}")]
    Label { label: String, source: PauliError },
    #[error("label {label:?} acts on {found} qubits, expected {expected}")]
    LengthMismatch {
        label: String,
        expected: usize,
        found: usize,
    },
    #[error("duplicate Pauli string {0:?}")]
    Duplicate(String),
    #[error("coefficient of {0:?} is not finite")]
    NonFinite(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PauliTerm {
    pub op: PauliOp,
    pub coefficient: f64,
}

/// `identity + Σ coefficient · op` over distinct non-identity strings.
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    n: usize,
    terms: Vec<PauliTerm>,
    identity: Option<f64>,
}

impl Hamiltonian {
    /// An empty Hamiltonian on `n` qubits.
    pub fn new(n: usize) -> Hamiltonian {
        Hamiltonian {
            n,
            terms: Vec::new(),
            identity: None,
        }
    }

    /// Builds from `(op, coefficient)` pairs. Identity strings go to the offset.
    pub fn from_terms<I>(n: usize, terms: I) -> Result<Hamiltonian, HamiltonianError>
    where
        I: IntoIterator<Item = (PauliOp, f64)>,
    {
        let mut h = Hamiltonian::new(n);
        for (op, c) in terms {
            h.push(op, c)?;
        }
        Ok(h)
    }

    /// Convenience constructor from label/coefficient pairs.
    pub fn from_labels(pairs: &[(&str, f64)]) -> Result<Hamiltonian, HamiltonianError> {
        build(pairs.iter().map(|(l, c)| (l.to_string(), *c)).collect())
    }

    /// Adds one term, rejecting duplicates, width mismatches and non-finite values.
    pub fn push(&mut self, op: PauliOp, coefficient: f64) -> Result<(), HamiltonianError> {
        let label = op.label();
        if op.num_qubits() != self.n {
            return Err(HamiltonianError::LengthMismatch {
                label,
                expected: self.n,
                found: op.num_qubits(),
            });
        }
        if !coefficient.is_finite() {
            return Err(HamiltonianError::NonFinite(label));
        }
        if op.is_identity() {
            if self.identity.is_some() {
                return Err(HamiltonianError::Duplicate(label));
            }
            self.identity = Some(coefficient);
            return Ok(());
        }
        if self.terms.iter().any(|t| t.op == op) {
            return Err(HamiltonianError::Duplicate(label));
        }
        self.terms.push(PauliTerm { op, coefficient });
        Ok(())
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    /// Non-identity terms in insertion order.
    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn ops(&self) -> Vec<PauliOp> {
        self.terms.iter().map(|t| t.op.clone()).collect()
    }

    /// Coefficient of the all-identity string (0 when absent).
    pub fn identity_offset(&self) -> f64 {
        self.identity.unwrap_or(0.0)
    }

    /// Whether the identity string was present in the input.
    pub fn has_identity_term(&self) -> bool {
        self.identity.is_some()
    }

    pub fn set_identity_offset(&mut self, value: Option<f64>) {
        self.identity = value;
    }

    /// Number of Pauli strings in the support, counting the identity if present.
    pub fn support_size(&self) -> usize {
        self.terms.len() + usize::from(self.identity.is_some())
    }

    pub fn is_empty(&self) -> bool {
        self.support_size() == 0
    }

    /// Labels of terms whose coefficient is exactly zero. Such terms are kept
    /// but ordered last by the greedy selector.
    pub fn zero_coefficient_terms(&self) -> Vec<String> {
        self.terms
            .iter()
            .filter(|t| t.coefficient == 0.0)
            .map(|t| t.op.label())
            .collect()
    }

    /// New Hamiltonian with the same identity offset and the selected terms.
    pub fn with_terms(&self, terms: Vec<PauliTerm>) -> Hamiltonian {
        Hamiltonian {
            n: self.n,
            terms,
            identity: self.identity,
        }
    }

    /// Same terms, sorted by label.
    pub fn canonicalized(&self) -> Hamiltonian {
        let mut terms = self.terms.clone();
        terms.sort_by(|a, b| a.op.cmp(&b.op));
        self.with_terms(terms)
    }

    pub fn coefficient_of(&self, op: &PauliOp) -> Option<f64> {
        if op.is_identity() && op.num_qubits() == self.n {
            return self.identity;
        }
        self.terms.iter().find(|t| &t.op == op).map(|t| t.coefficient)
    }

    /// L1 norm of all coefficients including the offset.
    pub fn l1_norm(&self) -> f64 {
        self.identity_offset().abs() + self.terms.iter().map(|t| t.coefficient.abs()).sum::<f64>()
    }
}

struct RawTerms(Vec<(String, f64)>);

impl<'de> Deserialize<'de> for RawTerms {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<RawTerms, D::Error> {
        struct RawVisitor;

        impl<'de> Visitor<'de> for RawVisitor {
            type Value = RawTerms;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an object mapping Pauli labels to numbers")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<RawTerms, A::Error> {
                let mut out = Vec::with_capacity(map.size_hint().unwrap_or(0));
                while let Some((k, v)) = map.next_entry::<String, f64>()? {
                    out.push((k, v));
                }
                Ok(RawTerms(out))
            }
        }

        deserializer.deserialize_map(RawVisitor)
    }
}

fn build(pairs: Vec<(String, f64)>) -> Result<Hamiltonian, HamiltonianError> {
    let Some((first, _)) = pairs.first() else {
        return Ok(Hamiltonian::new(0));
    };
    let n = first.chars().count();
    let mut h = Hamiltonian::new(n);
    for (label, c) in pairs {
        let op: PauliOp = label.parse().map_err(|source| HamiltonianError::Label {
            label: label.clone(),
            source,
        })?;
        h.push(op, c)?;
    }
    Ok(h)
}

/// Parses the key-value text format.
pub fn load_hamiltonian(text: &str) -> Result<Hamiltonian, HamiltonianError> {
    let raw: RawTerms =
        serde_json::from_str(text).map_err(|e| HamiltonianError::Syntax(e.to_string()))?;
    build(raw.0)
}

/// Writes the key-value text format; identity first, then terms in order.
pub fn serialize_hamiltonian(h: &Hamiltonian) -> String {
    if h.is_empty() {
        return "{}".to_string();
    }
    let mut entries = Vec::with_capacity(h.support_size());
    if let Some(c) = h.identity {
        entries.push(entry(&"I".repeat(h.n), c));
    }
    entries.extend(h.terms.iter().map(|t| entry(&t.op.label(), t.coefficient)));
    format!("{{\n  {}\n}}", entries.join(",\n  "))
}

fn entry(label: &str, c: f64) -> String {
    let value = serde_json::to_string(&c).expect("finite coefficient");
    format!("\"{label}\": {value}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loads_table_diagonal_block() {
        let h = load_hamiltonian(r#"{"II": -1.46658, "IZ": -0.39863, "ZI": -0.39863, "ZZ": 0.089735}"#)
            .unwrap();
        assert_eq!(h.num_qubits(), 2);
        assert_eq!(h.identity_offset(), -1.46658);
        assert_eq!(h.terms().len(), 3);
        assert_eq!(h.support_size(), 4);
    }

    #[test]
    fn single_term() {
        let h = load_hamiltonian(r#"{"Z": 1.0}"#).unwrap();
        assert_eq!(h.num_qubits(), 1);
        assert_eq!(h.terms().len(), 1);
        assert_eq!(h.identity_offset(), 0.0);
        assert!(!h.has_identity_term());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            load_hamiltonian(r#"{"IZ": 1.0, "ZZI": 1.0}"#),
            Err(HamiltonianError::LengthMismatch { .. })
        ));
        assert!(matches!(
            load_hamiltonian(r#"{"IZ": 1.0, "IZ": 2.0}"#),
            Err(HamiltonianError::Duplicate(_))
        ));
        assert!(matches!(
            load_hamiltonian(r#"{"IQ": 1.0}"#),
            Err(HamiltonianError::Label { .. })
        ));
        assert!(matches!(
            load_hamiltonian(r#"{"IZ": 1e999}"#),
            Err(HamiltonianError::Syntax(_))
        ));
        assert!(matches!(
            load_hamiltonian(r#"{"IZ": "one"}"#),
            Err(HamiltonianError::Syntax(_))
        ));
        assert!(matches!(
            load_hamiltonian("[1, 2]"),
            Err(HamiltonianError::Syntax(_))
        ));
        let mut h = Hamiltonian::new(1);
        assert!(matches!(
            h.push("Z".parse().unwrap(), f64::NAN),
            Err(HamiltonianError::NonFinite(_))
        ));
    }

    #[test]
    fn empty_round_trip() {
        let h = load_hamiltonian("{}").unwrap();
        assert!(h.is_empty());
        assert_eq!(serialize_hamiltonian(&h), "{}");
    }

    #[test]
    fn zero_coefficients_are_kept_and_flagged() {
        let h = load_hamiltonian(r#"{"XI": 0.0, "ZI": 0.5}"#).unwrap();
        assert_eq!(h.terms().len(), 2);
        assert_eq!(h.zero_coefficient_terms(), vec!["XI".to_string()]);
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let h = Hamiltonian::from_labels(&[
            ("III", -6.823060333),
            ("ZZI", 0.383637914),
            ("XXI", 0.06593809513),
            ("YYI", -0.06593809513),
            ("IZZ", 0.1 + 0.2),
        ])
        .unwrap();
        let back = load_hamiltonian(&serialize_hamiltonian(&h)).unwrap();
        assert_eq!(back, h);
        for (a, b) in back.terms().iter().zip(h.terms()) {
            assert_eq!(a.coefficient.to_bits(), b.coefficient.to_bits());
        }
    }
}
