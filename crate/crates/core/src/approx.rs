//! Noncontextual approximations of contextual Hamiltonians.
//!
//! The greedy selector walks the terms in decreasing `|coefficient|` and keeps
//! each one whose addition leaves the kept set noncontextual. The report
//! compares its ground energy, and that of the diagonal part, against exact
//! diagonalization of the full Hamiltonian.

use std::cmp::Ordering;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::hamiltonian::{Hamiltonian, PauliTerm};
use crate::model::{ModelError, NoncontextualModel};
use crate::oracle::{self, OracleError};
use crate::pauli::PauliOp;
use crate::solver::{SolveMethod, SolverOptions};
use crate::structure::is_noncontextual_refs;

/// One unit of chemical accuracy in Hartree.
pub const CHEMICAL_ACCURACY: f64 = 0.0016;

/// Largest window for batched greedy selection.
pub const MAX_BATCH: usize = 16;

/// Largest term count for the exhaustive subset search.
pub const BRUTE_FORCE_CAP: usize = 16;

/// Largest qubit count for which the diagonal ground energy is found by
/// enumerating basis states.
const DIAGONAL_ENUMERATION_QUBITS: usize = 20;

#[derive(Debug, Error)]
pub enum ApproxError {
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("brute-force search supports at most {cap} terms, found {found}")]
    TooManyTerms { found: usize, cap: usize },
    #[error("batch size must be between 1 and {MAX_BATCH}, got {0}")]
    InvalidBatch(usize),
    #[error("chemical accuracy unit must be positive and finite, got {0}")]
    InvalidUnit(f64),
}

/// Order among terms of equal `|coefficient|`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TieBreak {
    /// Canonical label order (`I < X < Y < Z`).
    #[default]
    Lexicographic,
    /// Position in the input.
    InputOrder,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GreedyOptions {
    pub tie_break: TieBreak,
    /// Number of upcoming terms considered jointly per step.
    pub batch: usize,
}

impl Default for GreedyOptions {
    fn default() -> GreedyOptions {
        GreedyOptions {
            tie_break: TieBreak::Lexicographic,
            batch: 1,
        }
    }
}

/// Indices of `h.terms()` in greedy consideration order.
fn greedy_order(h: &Hamiltonian, tie_break: TieBreak) -> Vec<usize> {
    let terms = h.terms();
    let mut order: Vec<usize> = (0..terms.len()).collect();
    order.sort_by(|&a, &b| {
        let (ta, tb) = (&terms[a], &terms[b]);
        tb.coefficient
            .abs()
            .total_cmp(&ta.coefficient.abs())
            .then_with(|| match tie_break {
                TieBreak::Lexicographic => ta.op.cmp(&tb.op),
                TieBreak::InputOrder => Ordering::Equal,
            })
            .then(a.cmp(&b))
    });
    order
}

fn keep_selected(h: &Hamiltonian, selected: &[bool]) -> Hamiltonian {
    let terms: Vec<PauliTerm> = h
        .terms()
        .iter()
        .zip(selected)
        .filter(|(_, &keep)| keep)
        .map(|(t, _)| t.clone())
        .collect();
    h.with_terms(terms)
}

/// Greedy noncontextual sub-Hamiltonian. The identity offset is always kept
/// and the surviving terms stay in input order.
///
/// With `batch = k > 1` the next `k` terms in order form a window, and the
/// subset of the window with the largest total `|coefficient|` that keeps the
/// set noncontextual is added (ties go to the subset found first when windows
/// are enumerated as ascending bit masks).
pub fn greedy_noncontextual(h: &Hamiltonian, opts: &GreedyOptions) -> Result<Hamiltonian, ApproxError> {
    if opts.batch == 0 || opts.batch > MAX_BATCH {
        return Err(ApproxError::InvalidBatch(opts.batch));
    }
    let terms = h.terms();
    let order = greedy_order(h, opts.tie_break);
    let mut selected = vec![false; terms.len()];
    let mut kept: Vec<&PauliOp> = Vec::new();
    for window in order.chunks(opts.batch) {
        let best = (1u32..(1 << window.len()))
            .into_par_iter()
            .filter_map(|mask| {
                let mut candidate = kept.clone();
                let mut weight = 0.0;
                for (bit, &k) in window.iter().enumerate() {
                    if (mask >> bit) & 1 == 1 {
                        candidate.push(&terms[k].op);
                        weight += terms[k].coefficient.abs();
                    }
                }
                is_noncontextual_refs(&candidate).then_some((weight, mask))
            })
            .reduce_with(|a, b| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a });
        if let Some((_, mask)) = best {
            for (bit, &k) in window.iter().enumerate() {
                if (mask >> bit) & 1 == 1 {
                    selected[k] = true;
                    kept.push(&terms[k].op);
                }
            }
        }
    }
    Ok(keep_selected(h, &selected))
}

/// Noncontextual subset whose ground energy is closest to the full ground
/// energy, searched over all subsets. Ties go to the smallest bit mask.
pub fn brute_force_noncontextual(h: &Hamiltonian, solver: &SolverOptions) -> Result<Hamiltonian, ApproxError> {
    let terms = h.terms();
    if terms.len() > BRUTE_FORCE_CAP {
        return Err(ApproxError::TooManyTerms {
            found: terms.len(),
            cap: BRUTE_FORCE_CAP,
        });
    }
    let full = oracle::ground_energy(h)?;
    let results: Vec<Option<(f64, u32)>> = (0u32..(1 << terms.len()))
        .into_par_iter()
        .map(|mask| {
            let selected: Vec<bool> = (0..terms.len()).map(|k| (mask >> k) & 1 == 1).collect();
            let ops: Vec<&PauliOp> = terms.iter().zip(&selected).filter(|(_, &s)| s).map(|(t, _)| &t.op).collect();
            if !is_noncontextual_refs(&ops) {
                return Ok(None);
            }
            let sub = keep_selected(h, &selected);
            let energy = NoncontextualModel::build(&sub)?.solve(solver).energy;
            Ok(Some(((energy - full).abs(), mask)))
        })
        .collect::<Result<_, ModelError>>()?;
    let (_, mask) = results
        .into_iter()
        .flatten()
        .reduce(|a, b| if b.0 < a.0 { b } else { a })
        .expect("the empty subset is noncontextual");
    let selected: Vec<bool> = (0..terms.len()).map(|k| (mask >> k) & 1 == 1).collect();
    Ok(keep_selected(h, &selected))
}

/// The diagonal (`I`/`Z` only) terms together with the identity offset.
pub fn diagonal_subset(h: &Hamiltonian) -> Hamiltonian {
    h.with_terms(h.terms().iter().filter(|t| t.op.is_diagonal()).cloned().collect())
}

/// Ground energy of a Hamiltonian made of diagonal terms.
pub fn diagonal_ground_energy(h: &Hamiltonian, solver: &SolverOptions) -> Result<f64, ApproxError> {
    assert!(h.terms().iter().all(|t| t.op.is_diagonal()), "diagonal terms only");
    let n = h.num_qubits();
    if n > DIAGONAL_ENUMERATION_QUBITS {
        return Ok(NoncontextualModel::build(h)?.solve(solver).energy);
    }
    let masks: Vec<(usize, f64)> = h
        .terms()
        .iter()
        .map(|t| {
            let z = (0..n).filter(|&q| t.op.z_bit(q)).fold(0usize, |m, q| m | (1 << (n - 1 - q)));
            (z, t.coefficient)
        })
        .collect();
    let offset = h.identity_offset();
    let best = (0..1usize << n)
        .into_par_iter()
        .map(|b| {
            masks.iter().fold(offset, |acc, &(z, c)| {
                if (b & z).count_ones() % 2 == 1 {
                    acc - c
                } else {
                    acc + c
                }
            })
        })
        .reduce(|| f64::INFINITY, f64::min);
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproxOptions {
    pub greedy: GreedyOptions,
    /// Use the exhaustive subset search instead of the greedy selector.
    pub brute_force: bool,
    /// Energy unit of the reported errors, in Hartree.
    pub chem_accuracy: f64,
    pub solver: SolverOptions,
}

impl Default for ApproxOptions {
    fn default() -> ApproxOptions {
        ApproxOptions {
            greedy: GreedyOptions::default(),
            brute_force: false,
            chem_accuracy: CHEMICAL_ACCURACY,
            solver: SolverOptions::default(),
        }
    }
}

/// Energies and error measures of the noncontextual and diagonal
/// approximations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApproximationReport {
    pub full_ground: f64,
    pub noncon_ground: f64,
    pub diag_ground: f64,
    /// `|noncon_ground - full_ground| / chem_accuracy`.
    pub eps_noncon: f64,
    /// `|diag_ground - full_ground| / chem_accuracy`.
    pub eps_diag: f64,
    pub chem_accuracy: f64,
    /// Labels of the selected sub-Hamiltonian, identity included if present.
    pub kept_terms: Vec<String>,
    /// Support sizes counting the identity string.
    pub full_terms: usize,
    pub noncon_terms: usize,
    /// `|R| = |G| + N` of the selected sub-Hamiltonian.
    pub generating_set_size: usize,
    pub solve_method: SolveMethod,
}

impl fmt::Display for ApproximationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "terms (full / noncontextual): {} / {}", self.full_terms, self.noncon_terms)?;
        writeln!(f, "generating set size |R|:      {}", self.generating_set_size)?;
        writeln!(f, "full ground energy:           {:.10}", self.full_ground)?;
        writeln!(
            f,
            "noncontextual ground energy:  {:.10} ({})",
            self.noncon_ground, self.solve_method
        )?;
        writeln!(f, "diagonal ground energy:       {:.10}", self.diag_ground)?;
        writeln!(f, "eps_noncon:                   {:.4}", self.eps_noncon)?;
        write!(f, "eps_diag:                     {:.4}", self.eps_diag)
    }
}

/// Selects a noncontextual sub-Hamiltonian and measures both approximations.
pub fn approximation_report(h: &Hamiltonian, opts: &ApproxOptions) -> Result<ApproximationReport, ApproxError> {
    if !(opts.chem_accuracy > 0.0 && opts.chem_accuracy.is_finite()) {
        return Err(ApproxError::InvalidUnit(opts.chem_accuracy));
    }
    let full_ground = oracle::ground_energy(h)?;
    let sub = if opts.brute_force {
        brute_force_noncontextual(h, &opts.solver)?
    } else {
        greedy_noncontextual(h, &opts.greedy)?
    };
    let model = NoncontextualModel::build(&sub)?;
    let result = model.solve(&opts.solver);
    let diag_ground = diagonal_ground_energy(&diagonal_subset(h), &opts.solver)?;

    let mut kept_terms = Vec::with_capacity(sub.support_size());
    if sub.has_identity_term() {
        kept_terms.push("I".repeat(h.num_qubits()));
    }
    kept_terms.extend(sub.terms().iter().map(|t| t.op.label()));
    Ok(ApproximationReport {
        full_ground,
        noncon_ground: result.energy,
        diag_ground,
        eps_noncon: (result.energy - full_ground).abs() / opts.chem_accuracy,
        eps_diag: (diag_ground - full_ground).abs() / opts.chem_accuracy,
        chem_accuracy: opts.chem_accuracy,
        kept_terms,
        full_terms: h.support_size(),
        noncon_terms: sub.support_size(),
        generating_set_size: model.generators.size(),
        solve_method: result.method,
    })
}
