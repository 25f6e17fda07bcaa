//! Classical simulation of noncontextual Pauli Hamiltonians.

pub mod approx;
mod bits;
pub mod epistemic;
pub mod fixtures;
pub mod generators;
pub mod hamiltonian;
pub mod model;
pub mod oracle;
pub mod pauli;
pub mod solver;
pub mod structure;

pub use epistemic::{
    compile_objective, evaluate_objective, expectation_of_term, joint_distribution, marginal_expectations,
    EpistemicError, EpistemicState, ObjectiveFunction, ObjectiveRow, OntologyTable,
};
pub use generators::{build_generators, GeneratorError, GeneratorSet, TermDecomposition};
pub use hamiltonian::{load_hamiltonian, serialize_hamiltonian, Hamiltonian, HamiltonianError, PauliTerm};
pub use model::{ModelError, NoncontextualModel};
pub use pauli::{parse_pauli, PauliError, PauliOp, Phase};
pub use solver::{
    inner_minimize, reduce_for_q, solve_ground, verify_witness, GroundResult, ReducedCoefficients, SolveMethod,
    SolverOptions,
};
pub use structure::{build_structure, is_noncontextual, NoncontextualStructure, StructureError};
pub use approx::{
    approximation_report, brute_force_noncontextual, diagonal_subset, greedy_noncontextual, ApproxError,
    ApproxOptions, ApproximationReport, GreedyOptions, TieBreak,
};
pub use oracle::{ground_energy, ground_expectations, ground_state, to_matrix, DenseHamiltonian, OracleError, StateVector};
