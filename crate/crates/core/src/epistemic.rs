//! Epistemic states `(q, r)`, their joint distributions over ontic states, and
//! the classical energy objective.
//!
//! An ontic state assigns `±1` to every clique representative `C_i1` and every
//! generator `G_j`. The state `(q, r)` fixes `g_j = q_j` and draws each `c_i`
//! independently with `P(c_i) = ½|c_i + r_i|`, so `⟨G_j⟩ = q_j` and
//! `⟨C_i1⟩ = r_i`. The energy is then
//! `const + Σ_B (h_B + Σ_i h_Bi r_i) Π_{j∈J_B} q_j`.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::generators::{GeneratorSet, TermDecomposition};
use crate::hamiltonian::Hamiltonian;

/// Largest `N + |G|` for which a joint distribution is materialized.
pub const MAX_ONTIC_BITS: usize = 24;

/// Norm deviation accepted as exact.
pub const NORM_EXACT_TOL: f64 = 1e-12;
/// Norm deviation that is silently renormalized; anything larger is rejected.
pub const NORM_RENORMALIZE_TOL: f64 = 1e-6;

#[derive(Debug, Error, PartialEq)]
pub enum EpistemicError {
    #[error("q[{index}] = {value}, expected +1 or -1")]
    InvalidQ { index: usize, value: i64 },
    #[error("r has norm {0}, expected 1")]
    NotNormalized(f64),
    #[error("r[{0}] is not finite")]
    NonFinite(usize),
    #[error("{what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("joint distribution over {0} ontic bits exceeds the limit of {MAX_ONTIC_BITS}")]
    TableTooLarge(usize),
    #[error("probabilities sum to {0}, expected 1")]
    Unnormalized(f64),
    #[error("negative probability {value} at entry {index}")]
    NegativeProbability { index: usize, value: f64 },
    #[error("no decomposition supplied for term {0}")]
    MissingDecomposition(String),
}

/// `q ∈ {±1}^|G|` and a unit vector `r ∈ ℝ^N`.
#[derive(Debug, Clone, PartialEq)]
pub struct EpistemicState {
    q: Vec<i8>,
    r: Vec<f64>,
}

impl EpistemicState {
    /// Validates `q` and the norm of `r`. Norms within `1e-6` of one are
    /// rescaled; an empty `r` is accepted for `N = 0`.
    pub fn new(q: Vec<i8>, r: Vec<f64>) -> Result<EpistemicState, EpistemicError> {
        if let Some((index, &v)) = q.iter().enumerate().find(|(_, &v)| v != 1 && v != -1) {
            return Err(EpistemicError::InvalidQ {
                index,
                value: v.into(),
            });
        }
        if let Some(i) = r.iter().position(|v| !v.is_finite()) {
            return Err(EpistemicError::NonFinite(i));
        }
        if r.is_empty() {
            return Ok(EpistemicState { q, r });
        }
        let norm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        let dev = (norm - 1.0).abs();
        let r = if dev <= NORM_EXACT_TOL {
            r
        } else if dev <= NORM_RENORMALIZE_TOL {
            r.iter().map(|v| v / norm).collect()
        } else {
            return Err(EpistemicError::NotNormalized(norm));
        };
        Ok(EpistemicState { q, r })
    }

    /// Builds `q` from `±1` integers of any width.
    pub fn from_signs(q: &[i64], r: Vec<f64>) -> Result<EpistemicState, EpistemicError> {
        let q = q
            .iter()
            .enumerate()
            .map(|(index, &v)| match v {
                1 => Ok(1),
                -1 => Ok(-1),
                value => Err(EpistemicError::InvalidQ { index, value }),
            })
            .collect::<Result<Vec<i8>, _>>()?;
        EpistemicState::new(q, r)
    }

    pub fn q(&self) -> &[i8] {
        &self.q
    }

    pub fn r(&self) -> &[f64] {
        &self.r
    }

    pub fn num_generators(&self) -> usize {
        self.q.len()
    }

    pub fn num_cliques(&self) -> usize {
        self.r.len()
    }
}

/// Probabilities of all `2^(N+|G|)` ontic states.
///
/// Bit `i < N` of an index is set when `c_i = -1`; bit `N + j` is set when
/// `g_j = -1`.
#[derive(Debug, Clone, PartialEq)]
pub struct OntologyTable {
    num_cliques: usize,
    num_generators: usize,
    probabilities: Vec<f64>,
}

impl OntologyTable {
    /// Wraps explicit probabilities, checking size and sign.
    pub fn from_probabilities(
        num_cliques: usize,
        num_generators: usize,
        probabilities: Vec<f64>,
    ) -> Result<OntologyTable, EpistemicError> {
        let bits = num_cliques + num_generators;
        if bits > MAX_ONTIC_BITS {
            return Err(EpistemicError::TableTooLarge(bits));
        }
        if probabilities.len() != 1 << bits {
            return Err(EpistemicError::DimensionMismatch {
                what: "table entries",
                expected: 1 << bits,
                found: probabilities.len(),
            });
        }
        if let Some((index, &value)) = probabilities
            .iter()
            .enumerate()
            .find(|(_, &p)| !(p >= 0.0 && p.is_finite()))
        {
            return Err(EpistemicError::NegativeProbability { index, value });
        }
        Ok(OntologyTable {
            num_cliques,
            num_generators,
            probabilities,
        })
    }

    pub fn num_cliques(&self) -> usize {
        self.num_cliques
    }

    pub fn num_generators(&self) -> usize {
        self.num_generators
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    /// `(c, g)` labels of an index.
    pub fn ontic_state(&self, index: usize) -> (Vec<i8>, Vec<i8>) {
        let sign = |bit: usize| if (index >> bit) & 1 == 1 { -1 } else { 1 };
        let c = (0..self.num_cliques).map(sign).collect();
        let g = (0..self.num_generators).map(|j| sign(self.num_cliques + j)).collect();
        (c, g)
    }

    /// Probability of the ontic state with labels `c` and `g`.
    pub fn probability(&self, c: &[i8], g: &[i8]) -> f64 {
        assert_eq!(c.len(), self.num_cliques);
        assert_eq!(g.len(), self.num_generators);
        let index = c
            .iter()
            .chain(g)
            .enumerate()
            .fold(0usize, |acc, (bit, &v)| acc | (usize::from(v < 0) << bit));
        self.probabilities[index]
    }

    /// Compensated total probability.
    pub fn total(&self) -> f64 {
        neumaier_sum(self.probabilities.iter().copied())
    }
}

fn neumaier_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut compensation = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            compensation += (sum - t) + v;
        } else {
            compensation += (v - t) + sum;
        }
        sum = t;
    }
    sum + compensation
}

/// `P(c, g) = Π_j δ(g_j, q_j) · Π_i ½|c_i + r_i|`.
pub fn joint_distribution(
    s: &EpistemicState,
    generators: &GeneratorSet,
) -> Result<OntologyTable, EpistemicError> {
    check_dims(s, generators.generators().len(), generators.representatives().len())?;
    let (n_c, n_g) = (s.num_cliques(), s.num_generators());
    if n_c + n_g > MAX_ONTIC_BITS {
        return Err(EpistemicError::TableTooLarge(n_c + n_g));
    }
    let mut probabilities = vec![0.0; 1 << (n_c + n_g)];
    let g_index = s
        .q
        .iter()
        .enumerate()
        .fold(0usize, |acc, (j, &v)| acc | (usize::from(v < 0) << (n_c + j)));
    for c_bits in 0..(1usize << n_c) {
        let p = s.r.iter().enumerate().fold(1.0, |acc, (i, &r)| {
            let c = if (c_bits >> i) & 1 == 1 { -1.0 } else { 1.0 };
            acc * 0.5 * (c + r).abs()
        });
        probabilities[g_index | c_bits] = p;
    }
    OntologyTable::from_probabilities(n_c, n_g, probabilities)
}

/// Recovers `(⟨G_j⟩, ⟨C_i1⟩)` as `2p - 1` of each coordinate's `+1` marginal.
pub fn marginal_expectations(t: &OntologyTable) -> Result<(Vec<f64>, Vec<f64>), EpistemicError> {
    let total = t.total();
    if (total - 1.0).abs() > 1e-12 {
        return Err(EpistemicError::Unnormalized(total));
    }
    let marginal = |bit: usize| {
        let p = neumaier_sum(
            t.probabilities
                .iter()
                .enumerate()
                .filter(|(k, _)| (k >> bit) & 1 == 0)
                .map(|(_, &p)| p),
        );
        2.0 * p - 1.0
    };
    let q = (0..t.num_generators).map(|j| marginal(t.num_cliques + j)).collect();
    let r = (0..t.num_cliques).map(marginal).collect();
    Ok((q, r))
}

/// `⟨B⟩ = ε Π q_j`, times `r_i` for terms in clique `i`.
pub fn expectation_of_term(dec: &TermDecomposition, s: &EpistemicState) -> f64 {
    let mut value = f64::from(dec.sign);
    for &j in &dec.generators {
        value *= f64::from(s.q[j]);
    }
    if let Some(i) = dec.clique {
        value *= s.r[i];
    }
    value
}

/// One aggregated row of the objective.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveRow {
    /// Ascending generator indices `J_B`.
    pub generators: Vec<usize>,
    /// Coefficient of the term with no clique factor.
    pub h: f64,
    /// Coefficient multiplying `r_i`, one per clique.
    pub h_clique: Vec<f64>,
}

/// `const + Σ_B (h_B + Σ_i h_Bi r_i) Π_{j∈J_B} q_j`, rows sorted by `J_B`.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveFunction {
    pub constant: f64,
    pub num_generators: usize,
    pub num_cliques: usize,
    pub rows: Vec<ObjectiveRow>,
}

/// Folds every term `c · ε · Π G_j (· C_i1)` into the row keyed by `J_B`.
///
/// `decompositions[k]` must describe `h.terms()[k]`.
pub fn compile_objective(
    h: &Hamiltonian,
    generators: &GeneratorSet,
    decompositions: &[TermDecomposition],
) -> Result<ObjectiveFunction, EpistemicError> {
    if decompositions.len() < h.terms().len() {
        let missing = &h.terms()[decompositions.len()];
        return Err(EpistemicError::MissingDecomposition(missing.op.label()));
    }
    if decompositions.len() > h.terms().len() {
        return Err(EpistemicError::DimensionMismatch {
            what: "decompositions",
            expected: h.terms().len(),
            found: decompositions.len(),
        });
    }
    let num_generators = generators.generators().len();
    let num_cliques = generators.representatives().len();
    let mut rows: BTreeMap<Vec<usize>, ObjectiveRow> = BTreeMap::new();
    for (term, dec) in h.terms().iter().zip(decompositions) {
        let row = rows.entry(dec.generators.clone()).or_insert_with(|| ObjectiveRow {
            generators: dec.generators.clone(),
            h: 0.0,
            h_clique: vec![0.0; num_cliques],
        });
        let value = f64::from(dec.sign) * term.coefficient;
        match dec.clique {
            None => row.h += value,
            Some(i) => row.h_clique[i] += value,
        }
    }
    Ok(ObjectiveFunction {
        constant: h.identity_offset(),
        num_generators,
        num_cliques,
        rows: rows.into_values().collect(),
    })
}

fn check_dims(s: &EpistemicState, num_generators: usize, num_cliques: usize) -> Result<(), EpistemicError> {
    if s.num_generators() != num_generators {
        return Err(EpistemicError::DimensionMismatch {
            what: "q length",
            expected: num_generators,
            found: s.num_generators(),
        });
    }
    if s.num_cliques() != num_cliques {
        return Err(EpistemicError::DimensionMismatch {
            what: "r length",
            expected: num_cliques,
            found: s.num_cliques(),
        });
    }
    Ok(())
}

/// Energy of `s` under `f`.
pub fn evaluate_objective(f: &ObjectiveFunction, s: &EpistemicState) -> Result<f64, EpistemicError> {
    check_dims(s, f.num_generators, f.num_cliques)?;
    let mut energy = f.constant;
    for row in &f.rows {
        let mut value = row.h;
        for (h, r) in row.h_clique.iter().zip(&s.r) {
            value += h * r;
        }
        let negative = row.generators.iter().filter(|&&j| s.q[j] < 0).count() % 2 == 1;
        energy += if negative { -value } else { value };
    }
    Ok(energy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::build_generators;
    use crate::structure::build_structure;

    fn heh() -> (Hamiltonian, GeneratorSet, Vec<TermDecomposition>) {
        let h = Hamiltonian::from_labels(&[
            ("II", -1.46658),
            ("IZ", -0.39863),
            ("ZI", -0.39863),
            ("ZZ", 0.089735),
            ("XX", 0.099524),
        ])
        .unwrap();
        let s = build_structure(&h.ops()).unwrap();
        let (g, d) = build_generators(&s, &h.ops()).unwrap();
        (h, g, d)
    }

    #[test]
    fn state_validation() {
        assert!(EpistemicState::new(vec![1, -1], vec![0.6, 0.8]).is_ok());
        assert!(matches!(
            EpistemicState::new(vec![2], vec![]),
            Err(EpistemicError::InvalidQ { index: 0, value: 2 })
        ));
        assert!(matches!(
            EpistemicState::new(vec![], vec![0.5, 0.5]),
            Err(EpistemicError::NotNormalized(_))
        ));
        let s = EpistemicState::new(vec![], vec![1.0 + 5e-7]).unwrap();
        assert_eq!(s.r(), &[1.0]);
        assert!(EpistemicState::new(vec![], vec![]).is_ok());
        assert!(EpistemicState::from_signs(&[1, 0], vec![]).is_err());
    }

    #[test]
    fn heh_objective() {
        let (h, g, d) = heh();
        let f = compile_objective(&h, &g, &d).unwrap();
        assert_eq!(f.constant, -1.46658);
        assert_eq!(f.rows.len(), 2);
        assert_eq!(f.rows[0].generators, Vec::<usize>::new());
        assert_eq!(f.rows[0].h, 0.0);
        assert_eq!(f.rows[0].h_clique, vec![-0.39863, 0.099524]);
        assert_eq!(f.rows[1].generators, vec![0]);
        assert_eq!(f.rows[1].h, 0.089735);
        assert_eq!(f.rows[1].h_clique, vec![-0.39863, 0.0]);

        let s = EpistemicState::new(vec![1], vec![0.9922982949760547, -0.1238712791070418]).unwrap();
        let e = evaluate_objective(&f, &s).unwrap();
        assert!((e + 2.1803).abs() < 1e-4, "{e}");
    }

    #[test]
    fn identity_only() {
        let h = Hamiltonian::from_labels(&[("II", 0.5)]).unwrap();
        let s = build_structure(&h.ops()).unwrap();
        let (g, d) = build_generators(&s, &h.ops()).unwrap();
        let f = compile_objective(&h, &g, &d).unwrap();
        assert!(f.rows.is_empty());
        let st = EpistemicState::new(vec![], vec![]).unwrap();
        assert_eq!(evaluate_objective(&f, &st).unwrap(), 0.5);
    }

    #[test]
    fn missing_decomposition() {
        let (h, g, d) = heh();
        assert_eq!(
            compile_objective(&h, &g, &d[..2]),
            Err(EpistemicError::MissingDecomposition("ZZ".into()))
        );
    }

    #[test]
    fn term_expectations() {
        let s = EpistemicState::new(vec![1, -1], vec![0.5, 0.75f64.sqrt()]).unwrap();
        let dec = |sign, generators: Vec<usize>, clique| TermDecomposition {
            sign,
            generators,
            clique,
        };
        assert_eq!(expectation_of_term(&dec(1, vec![], Some(1)), &s), 0.75f64.sqrt());
        assert_eq!(expectation_of_term(&dec(1, vec![1], None), &s), -1.0);
        assert_eq!(expectation_of_term(&dec(-1, vec![0, 1], Some(0)), &s), 0.5);
    }

    #[test]
    fn joint_examples() {
        let (_, g, _) = heh();
        let s = EpistemicState::new(vec![1], vec![1.0, 0.0]).unwrap();
        let t = joint_distribution(&s, &g).unwrap();
        assert_eq!(t.probabilities().len(), 8);
        assert_eq!(t.probability(&[1, 1], &[1]), 0.5);
        assert_eq!(t.probability(&[1, -1], &[1]), 0.5);
        assert_eq!(t.probability(&[-1, 1], &[1]), 0.0);
        assert_eq!(t.probability(&[1, 1], &[-1]), 0.0);

        let h = Hamiltonian::from_labels(&[("X", 1.0), ("Z", 1.0)]).unwrap();
        let st = build_structure(&h.ops()).unwrap();
        let (g, _) = build_generators(&st, &h.ops()).unwrap();
        let v = 0.5f64.sqrt();
        let t = joint_distribution(&EpistemicState::new(vec![], vec![v, v]).unwrap(), &g).unwrap();
        let p = 0.5 * (1.0 + v);
        assert!((t.probability(&[1, 1], &[]) - p * p).abs() < 1e-15);
        assert!((t.probability(&[1, 1], &[]) - 0.7286).abs() < 1e-4);
        let (q, r) = marginal_expectations(&t).unwrap();
        assert!(q.is_empty());
        assert!((r[0] - v).abs() < 1e-15 && (r[1] - v).abs() < 1e-15);
    }

    #[test]
    fn uniform_and_point_tables() {
        let t = OntologyTable::from_probabilities(1, 1, vec![0.25; 4]).unwrap();
        assert_eq!(marginal_expectations(&t).unwrap(), (vec![0.0], vec![0.0]));
        let t = OntologyTable::from_probabilities(1, 1, vec![0.0, 0.0, 1.0, 0.0]).unwrap();
        assert_eq!(t.ontic_state(2), (vec![1], vec![-1]));
        assert_eq!(marginal_expectations(&t).unwrap(), (vec![-1.0], vec![1.0]));
        let t = OntologyTable::from_probabilities(1, 0, vec![0.5, 0.4]).unwrap();
        assert!(matches!(marginal_expectations(&t), Err(EpistemicError::Unnormalized(_))));
        assert!(OntologyTable::from_probabilities(1, 0, vec![1.5, -0.5]).is_err());
        assert!(OntologyTable::from_probabilities(25, 0, vec![]).is_err());
    }
}
