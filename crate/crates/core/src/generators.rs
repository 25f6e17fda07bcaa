//! Independent generating set `R = {C_i1} ∪ G` of a noncontextual set.
//!
//! `G′` collects the universal operators together with the signed products
//! `A_ij = C_ij · C_i1`. A multiplicative Gaussian elimination over the Pauli
//! rows of `G′` (pivoting on X, then Z, clearing Y with both pivots, falling
//! back to a Y pivot) yields an independent commuting set `G` and, by tracking
//! every row multiplication and its sign, a signed expansion of each input row
//! over `G`. Every Hamiltonian term is then `ε · Π_{j∈J} G_j` or
//! `ε · Π_{j∈J} G_j · C_i1`.

use std::fmt;

use thiserror::Error;

use crate::bits::BitSet;
use crate::pauli::{PauliOp, Phase};
use crate::structure::NoncontextualStructure;

#[derive(Debug, Error)]
pub enum GeneratorError {
    #[error("{0} and {1} do not commute")]
    NotCommuting(PauliOp, PauliOp),
    #[error("input row {0} carries an imaginary phase")]
    ImaginaryPhase(usize),
    #[error("internal consistency failure: {0}")]
    Consistency(String),
    #[error("{0} is not part of the noncontextual structure")]
    UnknownTerm(PauliOp),
    #[error("invalid generator set: {0}")]
    Invalid(String),
}

/// `sign · Π_{j∈generators} G_j · (C_{clique,1} if present)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TermDecomposition {
    pub sign: i8,
    /// Ascending indices into `G` (the set `J_B`).
    pub generators: Vec<usize>,
    pub clique: Option<usize>,
}

impl fmt::Display for TermDecomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} *", if self.sign < 0 { "-1" } else { "+1" })?;
        let mut factors: Vec<String> = self.generators.iter().map(|j| format!("G{}", j + 1)).collect();
        if let Some(i) = self.clique {
            factors.push(format!("C{}", i + 1));
        }
        if factors.is_empty() {
            factors.push("I".into());
        }
        write!(f, " {}", factors.join("*"))
    }
}

fn symplectic(op: &PauliOp) -> BitSet {
    BitSet::from_words(op.x_words().iter().chain(op.z_words()).copied().collect())
}

/// Row-reduced GF(2) basis remembering which inputs each row combines.
#[derive(Debug, Clone)]
struct Gf2Basis {
    width: usize,
    rows: Vec<(BitSet, BitSet, usize)>,
}

impl Gf2Basis {
    fn new(vectors: &[BitSet]) -> Gf2Basis {
        let mut basis = Gf2Basis {
            width: vectors.len(),
            rows: Vec::new(),
        };
        for (k, v) in vectors.iter().enumerate() {
            let mut combo = BitSet::new(vectors.len());
            combo.set(k);
            let (v, combo) = basis.reduce(v.clone(), combo);
            if let Some(pivot) = v.first_one() {
                basis.rows.push((v, combo, pivot));
            }
        }
        basis
    }

    fn reduce(&self, mut v: BitSet, mut combo: BitSet) -> (BitSet, BitSet) {
        for (row, row_combo, pivot) in &self.rows {
            if v.get(*pivot) {
                v.xor_with(row);
                combo.xor_with(row_combo);
            }
        }
        (v, combo)
    }

    fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Input indices whose XOR equals `v`, if `v` lies in the span.
    fn solve(&self, v: &BitSet) -> Option<Vec<usize>> {
        let (rest, combo) = self.reduce(v.clone(), BitSet::new(self.width));
        rest.is_zero().then(|| combo.ones().collect())
    }
}

/// GF(2) rank of the symplectic vectors equals the number of operators.
///
/// For a mutually commuting set this is independence in the sense that no
/// member is a product of the others.
pub fn verify_independent(ops: &[PauliOp]) -> bool {
    let vectors: Vec<BitSet> = ops.iter().map(symplectic).collect();
    Gf2Basis::new(&vectors).rank() == ops.len()
}

/// `G′`: the universal operators (phase +1) followed by `A_ij = C_ij · C_i1`
/// for every clique `i` and every non-representative member `j`.
pub fn build_gprime(structure: &NoncontextualStructure) -> Vec<(Phase, PauliOp)> {
    let mut out: Vec<(Phase, PauliOp)> = structure
        .universal()
        .iter()
        .map(|z| (Phase::ONE, z.clone()))
        .collect();
    for clique in structure.cliques() {
        let rep = &clique[0];
        for member in &clique[1..] {
            out.push(member.mul_with(rep));
        }
    }
    out
}

/// Output of [`reduce_to_independent`].
#[derive(Debug, Clone)]
pub struct Reduction {
    /// Independent commuting generators, ordered by pivot column.
    pub generators: Vec<PauliOp>,
    /// For each input row, `sign · Π G_j` equals the signed input.
    pub expansions: Vec<TermDecomposition>,
}

struct Row {
    op: PauliOp,
    sign: Phase,
}

/// Multiplicative Gaussian elimination of a commuting signed Pauli list.
pub fn reduce_to_independent(inputs: &[(Phase, PauliOp)]) -> Result<Reduction, GeneratorError> {
    for (i, (phase, a)) in inputs.iter().enumerate() {
        if !phase.is_real() {
            return Err(GeneratorError::ImaginaryPhase(i));
        }
        for (_, b) in &inputs[i + 1..] {
            if a.num_qubits() != b.num_qubits() || !a.commutes_with(b) {
                return Err(GeneratorError::NotCommuting(a.clone(), b.clone()));
            }
        }
    }
    let m = inputs.len();
    let Some(n) = inputs.first().map(|(_, op)| op.num_qubits()) else {
        return Ok(Reduction {
            generators: Vec::new(),
            expansions: Vec::new(),
        });
    };

    let mut rows: Vec<Row> = inputs
        .iter()
        .map(|(phase, op)| Row {
            op: op.clone(),
            sign: *phase,
        })
        .collect();
    // expressions[k]: the current rows whose product is the original input k.
    let mut expressions: Vec<BitSet> = (0..m)
        .map(|k| {
            let mut b = BitSet::new(m);
            b.set(k);
            b
        })
        .collect();
    let mut active = vec![true; m];
    let mut pivot_rows: Vec<usize> = Vec::new();

    // row[i] <- row[i] · row[k]
    let multiply = |rows: &mut Vec<Row>, expressions: &mut Vec<BitSet>, i: usize, k: usize| {
        let (phase, op) = rows[i].op.mul_with(&rows[k].op);
        if !phase.is_real() {
            return Err(GeneratorError::Consistency(format!(
                "rows {i} and {k} anticommute during elimination"
            )));
        }
        let sign = rows[i].sign * rows[k].sign * phase;
        rows[i] = Row { op, sign };
        // old_i = new_i · row_k
        for e in expressions.iter_mut() {
            if e.get(i) {
                e.toggle(k);
            }
        }
        Ok(())
    };

    for col in 0..n {
        let with = |rows: &Vec<Row>, active: &Vec<bool>, letter: char| -> Vec<usize> {
            (0..m)
                .filter(|&i| active[i] && rows[i].op.factor(col) == letter)
                .collect()
        };
        let x_rows = with(&rows, &active, 'X');
        let x_pivot = x_rows.first().copied();
        if let Some(k) = x_pivot {
            for &i in &x_rows[1..] {
                multiply(&mut rows, &mut expressions, i, k)?;
            }
        }
        let z_rows = with(&rows, &active, 'Z');
        let z_pivot = z_rows.first().copied();
        if let Some(l) = z_pivot {
            for &i in &z_rows[1..] {
                multiply(&mut rows, &mut expressions, i, l)?;
            }
        }
        let y_rows = with(&rows, &active, 'Y');
        let mut y_pivot = None;
        if let (Some(k), Some(l)) = (x_pivot, z_pivot) {
            for &i in &y_rows {
                multiply(&mut rows, &mut expressions, i, k)?;
                multiply(&mut rows, &mut expressions, i, l)?;
            }
        } else if let Some(&first) = y_rows.first() {
            y_pivot = Some(first);
            for &i in &y_rows[1..] {
                multiply(&mut rows, &mut expressions, i, first)?;
            }
        }
        for pivot in [x_pivot, y_pivot, z_pivot].into_iter().flatten() {
            debug_assert_ne!(rows[pivot].op.factor(col), 'I');
            active[pivot] = false;
            pivot_rows.push(pivot);
        }
        debug_assert!((0..m).all(|i| !active[i] || rows[i].op.factor(col) == 'I'));
    }

    debug_assert!((0..m).all(|i| !active[i] || rows[i].op.is_identity()));
    let generators: Vec<PauliOp> = pivot_rows.iter().map(|&r| rows[r].op.clone()).collect();
    let mut generator_index = vec![None; m];
    for (j, &r) in pivot_rows.iter().enumerate() {
        generator_index[r] = Some(j);
    }

    let mut expansions = Vec::with_capacity(m);
    for (k, expr) in expressions.iter().enumerate() {
        let mut sign = Phase::ONE;
        let mut indices = Vec::new();
        for r in expr.ones() {
            sign = sign * rows[r].sign;
            if let Some(j) = generator_index[r] {
                indices.push(j);
            }
        }
        indices.sort_unstable();
        let dec = TermDecomposition {
            sign: sign.sign().expect("row signs stay real"),
            generators: indices,
            clique: None,
        };
        let (phase, op) = product(&generators, &dec, None, n);
        if op != inputs[k].1 || phase != inputs[k].0 {
            return Err(GeneratorError::Consistency(format!(
                "input row {k} ({}{}) reconstructs as {phase}{op}",
                inputs[k].0, inputs[k].1
            )));
        }
        expansions.push(dec);
    }
    Ok(Reduction {
        generators,
        expansions,
    })
}

/// `sign · Π G_j · (rep)` as a phase and an unsigned string.
fn product(
    generators: &[PauliOp],
    dec: &TermDecomposition,
    rep: Option<&PauliOp>,
    n: usize,
) -> (Phase, PauliOp) {
    let mut phase = Phase::from_sign(dec.sign);
    let mut acc = PauliOp::identity(n);
    for &j in &dec.generators {
        let (p, next) = acc.mul_with(&generators[j]);
        phase = phase * p;
        acc = next;
    }
    if let Some(rep) = rep {
        let (p, next) = acc.mul_with(rep);
        phase = phase * p;
        acc = next;
    }
    (phase, acc)
}

/// `G` together with the clique representatives.
#[derive(Debug, Clone)]
pub struct GeneratorSet {
    n: usize,
    generators: Vec<PauliOp>,
    representatives: Vec<PauliOp>,
    basis: Gf2Basis,
}

impl GeneratorSet {
    /// Validates independence and the commutation pattern of `R`.
    pub fn new(
        n: usize,
        generators: Vec<PauliOp>,
        representatives: Vec<PauliOp>,
    ) -> Result<GeneratorSet, GeneratorError> {
        let all = generators.iter().chain(&representatives);
        if let Some(op) = all.clone().find(|op| op.num_qubits() != n) {
            return Err(GeneratorError::Invalid(format!("{op} does not act on {n} qubits")));
        }
        for (i, g) in generators.iter().enumerate() {
            for other in generators[i + 1..].iter().chain(&representatives) {
                if !g.commutes_with(other) {
                    return Err(GeneratorError::NotCommuting(g.clone(), other.clone()));
                }
            }
        }
        for (i, a) in representatives.iter().enumerate() {
            for b in &representatives[i + 1..] {
                if a.commutes_with(b) {
                    return Err(GeneratorError::Invalid(format!(
                        "representatives {a} and {b} commute"
                    )));
                }
            }
        }
        if !verify_independent(&generators) {
            return Err(GeneratorError::Invalid("generators are dependent".into()));
        }
        let bound = if representatives.is_empty() { n } else { n.saturating_sub(1) };
        if generators.len() > bound || generators.len() + representatives.len() > 2 * n + 1 {
            return Err(GeneratorError::Invalid(format!(
                "|G| = {} and N = {} exceed the bounds for {n} qubits",
                generators.len(),
                representatives.len()
            )));
        }
        let vectors: Vec<BitSet> = generators.iter().map(symplectic).collect();
        Ok(GeneratorSet {
            n,
            basis: Gf2Basis::new(&vectors),
            generators,
            representatives,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    /// The independent commuting generators `G_j`.
    pub fn generators(&self) -> &[PauliOp] {
        &self.generators
    }

    /// The clique representatives `C_i1`.
    pub fn representatives(&self) -> &[PauliOp] {
        &self.representatives
    }

    /// `|R| = |G| + N`.
    pub fn size(&self) -> usize {
        self.generators.len() + self.representatives.len()
    }

    /// Evaluates a decomposition back to `(phase, string)`.
    pub fn reconstruct(&self, dec: &TermDecomposition) -> (Phase, PauliOp) {
        let rep = dec.clique.map(|i| &self.representatives[i]);
        product(&self.generators, dec, rep, self.n)
    }

    /// Decomposes any element of `⟨G⟩` or `⟨G⟩ · C_i1` by a GF(2) solve,
    /// fixing the sign with one exact multiplication. `None` if `op` lies
    /// outside the generated set.
    pub fn decompose(&self, op: &PauliOp) -> Option<TermDecomposition> {
        if op.num_qubits() != self.n {
            return None;
        }
        let candidates = std::iter::once(None).chain((0..self.representatives.len()).map(Some));
        for clique in candidates {
            let target = match clique {
                None => op.clone(),
                Some(i) => op.mul_with(&self.representatives[i]).1,
            };
            let Some(generators) = self.basis.solve(&symplectic(&target)) else {
                continue;
            };
            let mut dec = TermDecomposition {
                sign: 1,
                generators,
                clique,
            };
            let (phase, result) = self.reconstruct(&dec);
            debug_assert_eq!(&result, op);
            dec.sign = phase.sign()?;
            return Some(dec);
        }
        None
    }
}

/// Builds `R` for a noncontextual set and decomposes each of `terms` over it.
///
/// Every decomposition is checked by explicit multiplication before return.
pub fn build_generators(
    structure: &NoncontextualStructure,
    terms: &[PauliOp],
) -> Result<(GeneratorSet, Vec<TermDecomposition>), GeneratorError> {
    let n = terms
        .first()
        .or_else(|| structure.universal().first())
        .or_else(|| structure.cliques().first().map(|c| &c[0]))
        .map_or(0, |op| op.num_qubits());
    let gprime = build_gprime(structure);
    let reduction = reduce_to_independent(&gprime)?;
    let set = GeneratorSet::new(n, reduction.generators, structure.representatives())?;

    let clique_offsets: Vec<usize> = structure
        .cliques()
        .iter()
        .scan(structure.universal().len(), |acc, c| {
            let start = *acc;
            *acc += c.len() - 1;
            Some(start)
        })
        .collect();

    let mut decompositions = Vec::with_capacity(terms.len());
    for op in terms {
        let dec = if let Ok(k) = structure.universal().binary_search(op) {
            reduction.expansions[k].clone()
        } else if let Some((i, j)) = structure.clique_position(op) {
            if j == 0 {
                TermDecomposition {
                    sign: 1,
                    generators: Vec::new(),
                    clique: Some(i),
                }
            } else {
                TermDecomposition {
                    clique: Some(i),
                    ..reduction.expansions[clique_offsets[i] + j - 1].clone()
                }
            }
        } else {
            return Err(GeneratorError::UnknownTerm(op.clone()));
        };
        let (phase, rebuilt) = set.reconstruct(&dec);
        if phase != Phase::ONE || &rebuilt != op {
            return Err(GeneratorError::Consistency(format!(
                "{op} decomposes as {dec} = {phase}{rebuilt}"
            )));
        }
        decompositions.push(dec);
    }
    Ok((set, decompositions))
}
