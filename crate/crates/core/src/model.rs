//! The full pipeline from a Hamiltonian to its compiled objective.

use thiserror::Error;

use crate::epistemic::{compile_objective, EpistemicError, ObjectiveFunction};
use crate::generators::{build_generators, GeneratorError, GeneratorSet, TermDecomposition};
use crate::hamiltonian::Hamiltonian;
use crate::solver::{solve_ground, GroundResult, SolverOptions};
use crate::structure::{build_structure, NoncontextualStructure, StructureError};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Generator(#[from] GeneratorError),
    #[error(transparent)]
    Epistemic(#[from] EpistemicError),
}

/// Structure, generating set, per-term decompositions and objective of a
/// noncontextual Hamiltonian.
#[derive(Debug, Clone)]
pub struct NoncontextualModel {
    pub structure: NoncontextualStructure,
    pub generators: GeneratorSet,
    /// Aligned with `hamiltonian.terms()`.
    pub decompositions: Vec<TermDecomposition>,
    pub objective: ObjectiveFunction,
}

impl NoncontextualModel {
    pub fn build(h: &Hamiltonian) -> Result<NoncontextualModel, ModelError> {
        let ops = h.ops();
        let structure = build_structure(&ops)?;
        let (mut generators, decompositions) = build_generators(&structure, &ops)?;
        if ops.is_empty() {
            generators = GeneratorSet::new(h.num_qubits(), Vec::new(), Vec::new())?;
        }
        let objective = compile_objective(h, &generators, &decompositions)?;
        Ok(NoncontextualModel {
            structure,
            generators,
            decompositions,
            objective,
        })
    }

    pub fn solve(&self, opts: &SolverOptions) -> GroundResult {
        solve_ground(&self.objective, opts)
    }
}
