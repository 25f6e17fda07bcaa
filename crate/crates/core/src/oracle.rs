//! Dense exact diagonalization of small Pauli Hamiltonians.
//!
//! Basis index bit `n - 1 - q` holds qubit `q`, so qubit 0 (the leftmost label
//! character) is the most significant tensor factor. A string acts as
//! `P|b⟩ = i^{#Y} (-1)^{|b ∧ z|} |b ⊕ x⟩`. Complex matrices are diagonalized
//! through the real symmetric embedding `[[Re, -Im], [Im, Re]]`.

mod eigen;

use thiserror::Error;

use crate::hamiltonian::Hamiltonian;
use crate::pauli::PauliOp;

/// Default qubit cap for dense construction.
pub const DEFAULT_MAX_QUBITS: usize = 12;

/// Accepted eigenpair residual relative to the matrix scale.
pub const RESIDUAL_TOL: f64 = 1e-10;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("{found} qubits exceed the dense oracle cap of {cap}")]
    TooLarge { found: usize, cap: usize },
    #[error("eigensolver did not converge")]
    NotConverged,
    #[error("ground eigenpair residual {0:e} exceeds tolerance")]
    Residual(f64),
    #[error("operator acts on {found} qubits, state has {expected}")]
    DimensionMismatch { expected: usize, found: usize },
}

/// Basis masks and phase of a Pauli string.
#[derive(Debug, Clone, Copy)]
struct Action {
    x: usize,
    z: usize,
    /// Power of `i` from the `Y` factors.
    y_phase: u32,
}

impl Action {
    fn of(op: &PauliOp) -> Action {
        let n = op.num_qubits();
        let mut x = 0;
        let mut z = 0;
        for q in 0..n {
            let bit = 1 << (n - 1 - q);
            if op.x_bit(q) {
                x |= bit;
            }
            if op.z_bit(q) {
                z |= bit;
            }
        }
        Action {
            x,
            z,
            y_phase: (op.y_count() % 4) as u32,
        }
    }

    /// `(target, re, im)` of `P|b⟩`.
    fn apply(&self, b: usize) -> (usize, f64, f64) {
        let flips = (b & self.z).count_ones() % 2;
        let sign = if flips == 1 { -1.0 } else { 1.0 };
        let (re, im) = match self.y_phase {
            0 => (1.0, 0.0),
            1 => (0.0, 1.0),
            2 => (-1.0, 0.0),
            _ => (0.0, -1.0),
        };
        (b ^ self.x, sign * re, sign * im)
    }
}

/// Complex Hermitian matrix stored as separate real and imaginary parts.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseHamiltonian {
    dim: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl DenseHamiltonian {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `(Re, Im)` of entry `(row, col)`.
    pub fn entry(&self, row: usize, col: usize) -> (f64, f64) {
        let k = row * self.dim + col;
        (self.re[k], self.im[k])
    }

    pub fn is_real(&self) -> bool {
        self.im.iter().all(|&v| v == 0.0)
    }

    /// Largest entrywise deviation from Hermiticity.
    pub fn hermiticity_error(&self) -> f64 {
        let d = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                let (a, b) = (i * d + j, j * d + i);
                worst = worst
                    .max((self.re[a] - self.re[b]).abs())
                    .max((self.im[a] + self.im[b]).abs());
            }
        }
        worst
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, other: &DenseHamiltonian) -> DenseHamiltonian {
        assert_eq!(self.dim, other.dim);
        let d = self.dim;
        let mut re = vec![0.0; d * d];
        let mut im = vec![0.0; d * d];
        for i in 0..d {
            for k in 0..d {
                let (ar, ai) = (self.re[i * d + k], self.im[i * d + k]);
                if ar == 0.0 && ai == 0.0 {
                    continue;
                }
                for j in 0..d {
                    let (br, bi) = (other.re[k * d + j], other.im[k * d + j]);
                    re[i * d + j] += ar * br - ai * bi;
                    im[i * d + j] += ar * bi + ai * br;
                }
            }
        }
        DenseHamiltonian { dim: d, re, im }
    }

    /// Largest entrywise distance to the identity matrix.
    pub fn distance_to_identity(&self) -> f64 {
        let d = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                let k = i * d + j;
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((self.re[k] - target).abs()).max(self.im[k].abs());
            }
        }
        worst
    }

    fn apply(&self, psi: &StateVector) -> StateVector {
        let d = self.dim;
        let mut out = StateVector::zeros(d);
        for i in 0..d {
            let (mut sr, mut si) = (0.0, 0.0);
            for j in 0..d {
                let (ar, ai) = (self.re[i * d + j], self.im[i * d + j]);
                sr += ar * psi.re[j] - ai * psi.im[j];
                si += ar * psi.im[j] + ai * psi.re[j];
            }
            out.re[i] = sr;
            out.im[i] = si;
        }
        out
    }

    fn scale(&self) -> f64 {
        self.re
            .iter()
            .zip(&self.im)
            .map(|(a, b)| a.abs() + b.abs())
            .fold(0.0, f64::max)
            * self.dim as f64
    }

    /// Eigenvalues ascending and eigenvectors (one per eigenvalue).
    fn eigh(&self) -> Result<(Vec<f64>, Vec<StateVector>), OracleError> {
        let d = self.dim;
        if self.is_real() {
            let (values, vectors) = eigen::symmetric_eigen(&self.re, d).ok_or(OracleError::NotConverged)?;
            let states = (0..d)
                .map(|k| StateVector {
                    re: (0..d).map(|i| vectors[i * d + k]).collect(),
                    im: vec![0.0; d],
                })
                .collect();
            return Ok((values, states));
        }
        let m = 2 * d;
        let mut big = vec![0.0; m * m];
        for i in 0..d {
            for j in 0..d {
                let (r, c) = (self.re[i * d + j], self.im[i * d + j]);
                big[i * m + j] = r;
                big[(i + d) * m + j + d] = r;
                big[i * m + j + d] = -c;
                big[(i + d) * m + j] = c;
            }
        }
        let (values, vectors) = eigen::symmetric_eigen(&big, m).ok_or(OracleError::NotConverged)?;
        // Every eigenvalue appears twice, as (u, v) and (-v, u).
        let mut out_values = Vec::with_capacity(d);
        let mut states = Vec::with_capacity(d);
        for k in (0..m).step_by(2) {
            out_values.push(values[k]);
            states.push(StateVector {
                re: (0..d).map(|i| vectors[i * m + k]).collect(),
                im: (0..d).map(|i| vectors[(i + d) * m + k]).collect(),
            });
        }
        Ok((out_values, states))
    }
}

/// A complex state vector in the computational basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl StateVector {
    pub fn zeros(dim: usize) -> StateVector {
        StateVector {
            re: vec![0.0; dim],
            im: vec![0.0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.re.len()
    }

    pub fn norm(&self) -> f64 {
        self.re.iter().chain(&self.im).map(|v| v * v).sum::<f64>().sqrt()
    }

    /// `⟨ψ|P|ψ⟩`, real for any Pauli string.
    pub fn expectation(&self, op: &PauliOp) -> Result<f64, OracleError> {
        let dim = 1usize << op.num_qubits();
        if dim != self.dim() {
            return Err(OracleError::DimensionMismatch {
                expected: self.dim().trailing_zeros() as usize,
                found: op.num_qubits(),
            });
        }
        let action = Action::of(op);
        let mut total = 0.0;
        for b in 0..dim {
            let (t, pr, pi) = action.apply(b);
            // conj(ψ_t) · phase · ψ_b, real part
            let (br, bi) = (self.re[b], self.im[b]);
            let (vr, vi) = (pr * br - pi * bi, pr * bi + pi * br);
            total += self.re[t] * vr + self.im[t] * vi;
        }
        Ok(total)
    }
}

/// Ground energy, a ground vector and spectral diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundState {
    pub energy: f64,
    pub vector: StateVector,
    /// Difference between the two lowest eigenvalues (0 for one level).
    pub gap: f64,
    /// `‖Hψ - Eψ‖`.
    pub residual: f64,
}

/// `identity_offset · I + Σ c · P`, capped at [`DEFAULT_MAX_QUBITS`].
pub fn to_matrix(h: &Hamiltonian) -> Result<DenseHamiltonian, OracleError> {
    to_matrix_capped(h, DEFAULT_MAX_QUBITS)
}

pub fn to_matrix_capped(h: &Hamiltonian, cap: usize) -> Result<DenseHamiltonian, OracleError> {
    let n = h.num_qubits();
    if n > cap {
        return Err(OracleError::TooLarge { found: n, cap });
    }
    let dim = 1usize << n;
    let mut re = vec![0.0; dim * dim];
    let mut im = vec![0.0; dim * dim];
    let offset = h.identity_offset();
    for b in 0..dim {
        re[b * dim + b] += offset;
    }
    for term in h.terms() {
        let action = Action::of(&term.op);
        for b in 0..dim {
            let (row, pr, pi) = action.apply(b);
            re[row * dim + b] += term.coefficient * pr;
            im[row * dim + b] += term.coefficient * pi;
        }
    }
    Ok(DenseHamiltonian { dim, re, im })
}

/// All eigenvalues, ascending.
pub fn spectrum(h: &Hamiltonian) -> Result<Vec<f64>, OracleError> {
    Ok(to_matrix(h)?.eigh()?.0)
}

pub fn ground_state(h: &Hamiltonian) -> Result<GroundState, OracleError> {
    let m = to_matrix(h)?;
    let (values, mut vectors) = m.eigh()?;
    let energy = values[0];
    let vector = vectors.swap_remove(0);
    let hv = m.apply(&vector);
    let residual = hv
        .re
        .iter()
        .zip(&vector.re)
        .chain(hv.im.iter().zip(&vector.im))
        .map(|(a, b)| (a - energy * b).powi(2))
        .sum::<f64>()
        .sqrt();
    if residual > RESIDUAL_TOL * (1.0 + m.scale()) {
        return Err(OracleError::Residual(residual));
    }
    let gap = values.get(1).map_or(0.0, |v| v - energy);
    Ok(GroundState {
        energy,
        vector,
        gap,
        residual,
    })
}

/// Smallest eigenvalue.
pub fn ground_energy(h: &Hamiltonian) -> Result<f64, OracleError> {
    Ok(ground_state(h)?.energy)
}

/// `⟨ψ|P|ψ⟩` for the computed ground vector. With a degenerate ground space
/// the values depend on which basis vector the eigensolver returns.
pub fn ground_expectations(h: &Hamiltonian, ops: &[PauliOp]) -> Result<Vec<f64>, OracleError> {
    let g = ground_state(h)?;
    ops.iter().map(|op| g.vector.expectation(op)).collect()
}
