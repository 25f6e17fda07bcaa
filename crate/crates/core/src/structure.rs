//! Noncontextuality test and the universal / clique partition of a Pauli set.
//!
//! A set `S` is noncontextual iff commutation is an equivalence relation on
//! `T = S \ Z`, where `Z` holds the members that commute with all of `S`. The
//! equivalence classes of `T` are the cliques: members of one clique commute,
//! members of different cliques anticommute.

mod random;

use std::fmt;

use thiserror::Error;

use crate::pauli::PauliOp;

pub use random::{random_anticommuting_family, random_noncontextual_instance};

/// Three operators with `[a,b] = 0`, `[b,c] = 0` but `{a,c} = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContextualityCertificate {
    pub a: PauliOp,
    pub b: PauliOp,
    pub c: PauliOp,
}

impl ContextualityCertificate {
    /// Re-checks the triple with the commutation primitive.
    pub fn is_valid(&self) -> bool {
        self.a.commutes_with(&self.b) && self.b.commutes_with(&self.c) && !self.a.commutes_with(&self.c)
    }
}

impl fmt::Display for ContextualityCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{a},{b}]=0, [{b},{c}]=0, but {a} and {c} anticommute",
            a = self.a,
            b = self.b,
            c = self.c
        )
    }
}

#[derive(Debug, Error)]
pub enum StructureError {
    #[error("operator set is contextual: {0}")]
    Contextual(Box<ContextualityCertificate>),
    #[error("operators act on different qubit counts ({0} and {1})")]
    DimensionMismatch(usize, usize),
    #[error("infeasible instance request: {0}")]
    Infeasible(String),
    #[error("structure invariant violated: {0}")]
    Invalid(String),
}

/// `S = Z ∪ C_1 ∪ … ∪ C_N` for a noncontextual set, in canonical order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NoncontextualStructure {
    universal: Vec<PauliOp>,
    cliques: Vec<Vec<PauliOp>>,
}

impl NoncontextualStructure {
    /// Operators commuting with the whole set, sorted.
    pub fn universal(&self) -> &[PauliOp] {
        &self.universal
    }

    /// Cliques sorted internally and ordered by their first member.
    pub fn cliques(&self) -> &[Vec<PauliOp>] {
        &self.cliques
    }

    pub fn num_cliques(&self) -> usize {
        self.cliques.len()
    }

    /// The clique representatives `C_{i1}`, one per clique.
    pub fn representatives(&self) -> Vec<PauliOp> {
        self.cliques.iter().map(|c| c[0].clone()).collect()
    }

    pub fn is_universal(&self, op: &PauliOp) -> bool {
        self.universal.binary_search(op).is_ok()
    }

    /// `(clique index, position within clique)` of `op`.
    pub fn clique_position(&self, op: &PauliOp) -> Option<(usize, usize)> {
        self.cliques
            .iter()
            .enumerate()
            .find_map(|(i, c)| c.binary_search(op).ok().map(|j| (i, j)))
    }

    /// Checks every invariant of the partition.
    pub fn validate(&self) -> Result<(), StructureError> {
        let all: Vec<&PauliOp> = self.universal.iter().chain(self.cliques.iter().flatten()).collect();
        for z in &self.universal {
            if let Some(o) = all.iter().find(|o| !z.commutes_with(o)) {
                return Err(StructureError::Invalid(format!("{z} does not commute with {o}")));
            }
        }
        for (i, ci) in self.cliques.iter().enumerate() {
            if ci.is_empty() {
                return Err(StructureError::Invalid(format!("clique {i} is empty")));
            }
            for (k, ck) in self.cliques.iter().enumerate() {
                for a in ci {
                    for b in ck {
                        if a.commutes_with(b) != (i == k) {
                            return Err(StructureError::Invalid(format!(
                                "{a} (clique {i}) and {b} (clique {k}) have the wrong commutation"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

fn strip_identity(ops: &[PauliOp]) -> Vec<&PauliOp> {
    ops.iter().filter(|o| !o.is_identity()).collect()
}

fn check_widths(ops: &[&PauliOp]) -> Result<(), StructureError> {
    if let Some(first) = ops.first() {
        if let Some(o) = ops.iter().find(|o| o.num_qubits() != first.num_qubits()) {
            return Err(StructureError::DimensionMismatch(first.num_qubits(), o.num_qubits()));
        }
    }
    Ok(())
}

fn split<'a>(ops: &[&'a PauliOp]) -> (Vec<&'a PauliOp>, Vec<&'a PauliOp>) {
    ops.iter()
        .copied()
        .partition(|o| ops.iter().all(|p| o.commutes_with(p)))
}

/// Splits `ops` into the universally commuting set `Z` and the rest `T`,
/// preserving input order. Identity strings are dropped.
///
/// Panics if the operators act on different qubit counts.
pub fn partition(ops: &[PauliOp]) -> (Vec<PauliOp>, Vec<PauliOp>) {
    let ops = strip_identity(ops);
    check_widths(&ops).expect("partition requires a uniform qubit count");
    let (z, t) = split(&ops);
    (z.into_iter().cloned().collect(), t.into_iter().cloned().collect())
}

/// Groups `t` by commutation with the first member of each group, then checks
/// that the grouping is an equivalence. Returns index groups on success.
fn cliques_of(t: &[&PauliOp]) -> Option<Vec<Vec<usize>>> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, op) in t.iter().enumerate() {
        match groups.iter_mut().find(|g| t[g[0]].commutes_with(op)) {
            Some(g) => g.push(i),
            None => groups.push(vec![i]),
        }
    }
    let mut label = vec![0usize; t.len()];
    for (gi, g) in groups.iter().enumerate() {
        for &i in g {
            label[i] = gi;
        }
    }
    for i in 0..t.len() {
        for j in (i + 1)..t.len() {
            if t[i].commutes_with(t[j]) != (label[i] == label[j]) {
                return None;
            }
        }
    }
    Some(groups)
}

/// Whether commutation restricted to `T` is transitive.
///
/// Panics if the operators act on different qubit counts.
pub fn is_noncontextual(ops: &[PauliOp]) -> bool {
    let ops = strip_identity(ops);
    check_widths(&ops).expect("is_noncontextual requires a uniform qubit count");
    is_noncontextual_refs(&ops)
}

pub(crate) fn is_noncontextual_refs(ops: &[&PauliOp]) -> bool {
    let (_, t) = split(ops);
    cliques_of(&t).is_some()
}

/// First violating triple `(a, b, c)` of `T` in canonical order, if any.
pub fn find_contextuality_certificate(ops: &[PauliOp]) -> Option<ContextualityCertificate> {
    let ops = strip_identity(ops);
    let (_, mut t) = split(&ops);
    t.sort();
    t.dedup();
    for a in &t {
        for b in &t {
            if !a.commutes_with(b) {
                continue;
            }
            for c in &t {
                if b.commutes_with(c) && !a.commutes_with(c) {
                    return Some(ContextualityCertificate {
                        a: (*a).clone(),
                        b: (*b).clone(),
                        c: (*c).clone(),
                    });
                }
            }
        }
    }
    None
}

/// Builds the canonical partition of a noncontextual set.
pub fn build_structure(ops: &[PauliOp]) -> Result<NoncontextualStructure, StructureError> {
    let mut ops = strip_identity(ops);
    check_widths(&ops)?;
    ops.sort();
    ops.dedup();
    let (z, t) = split(&ops);
    let Some(groups) = cliques_of(&t) else {
        let owned: Vec<PauliOp> = ops.iter().map(|o| (*o).clone()).collect();
        let cert = find_contextuality_certificate(&owned)
            .expect("failed clique grouping implies a transitivity violation");
        return Err(StructureError::Contextual(Box::new(cert)));
    };
    // `t` is sorted and groups are filled in index order, so each group is
    // sorted and groups are ordered by their smallest member.
    let cliques = groups
        .into_iter()
        .map(|g| g.into_iter().map(|i| t[i].clone()).collect())
        .collect();
    let structure = NoncontextualStructure {
        universal: z.into_iter().cloned().collect(),
        cliques,
    };
    debug_assert!(structure.validate().is_ok());
    Ok(structure)
}
