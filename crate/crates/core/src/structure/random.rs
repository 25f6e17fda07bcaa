//! Seeded generator of noncontextual test Hamiltonians.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::StructureError;
use crate::hamiltonian::Hamiltonian;
use crate::pauli::PauliOp;

/// The `2m + 1` pairwise anticommuting strings `Z..ZX`, `Z..ZY` on each of
/// `m` qubits plus `Z..Z`, placed on qubits `offset..offset + m` of `n`.
fn ladder_family(n: usize, offset: usize, m: usize) -> Vec<PauliOp> {
    let mut family = Vec::with_capacity(2 * m + 1);
    for k in 0..m {
        for (x, z) in [(true, false), (true, true)] {
            let mut op = PauliOp::identity(n);
            for j in 0..k {
                op.set(offset + j, false, true);
            }
            op.set(offset + k, x, z);
            family.push(op);
        }
    }
    let mut all_z = PauliOp::identity(n);
    for j in 0..m {
        all_z.set(offset + j, false, true);
    }
    family.push(all_z);
    family
}

/// Applies a random sequence of Clifford conjugations to every operator,
/// acting on the symplectic bits only. Commutation relations are preserved.
fn scramble<R: Rng>(ops: &mut [PauliOp], n: usize, rng: &mut R) {
    let moves = 3 * n * (n + 1);
    for _ in 0..moves {
        let kind = if n > 1 { rng.gen_range(0..4) } else { rng.gen_range(0..2) };
        let a = rng.gen_range(0..n);
        let b = if n > 1 {
            (a + rng.gen_range(1..n)) % n
        } else {
            a
        };
        for op in ops.iter_mut() {
            let (xa, za) = (op.x_bit(a), op.z_bit(a));
            match kind {
                // Hadamard
                0 => op.set(a, za, xa),
                // Phase gate
                1 => op.set(a, xa, za ^ xa),
                // CNOT a -> b
                2 => {
                    let (xb, zb) = (op.x_bit(b), op.z_bit(b));
                    op.set(b, xb ^ xa, zb);
                    op.set(a, xa, za ^ zb);
                }
                // SWAP
                _ => {
                    let (xb, zb) = (op.x_bit(b), op.z_bit(b));
                    op.set(a, xb, zb);
                    op.set(b, xa, za);
                }
            }
        }
    }
}

/// `count` pairwise anticommuting strings on `n` qubits, `count <= 2n + 1`.
pub fn random_anticommuting_family<R: Rng>(
    n: usize,
    count: usize,
    rng: &mut R,
) -> Result<Vec<PauliOp>, StructureError> {
    if n == 0 || count > 2 * n + 1 {
        return Err(StructureError::Infeasible(format!(
            "{count} anticommuting strings do not fit on {n} qubits (at most 2n+1)"
        )));
    }
    let mut family = ladder_family(n, 0, n);
    family.shuffle(rng);
    family.truncate(count);
    scramble(&mut family, n, rng);
    Ok(family)
}

fn product_of(gens: &[PauliOp], subset: &[bool], n: usize) -> PauliOp {
    gens.iter()
        .zip(subset)
        .filter(|(_, &used)| used)
        .fold(PauliOp::identity(n), |acc, (g, _)| acc.mul_with(g).1)
}

/// Random Hamiltonian whose support is noncontextual with `cliques` cliques
/// and an independent generator set of size `generators`.
///
/// Each clique member is an anticommuting ladder string times a random product
/// of generators; the universal set holds the generators and some of their
/// products. Everything is then conjugated by a random Clifford. A request for
/// a single clique yields a fully commuting set, since one commuting family
/// commutes with everything else and is absorbed into the universal set.
/// Coefficients (including the identity offset) are uniform in `[-1, 1]`.
pub fn random_noncontextual_instance(
    n: usize,
    cliques: usize,
    generators: usize,
    seed: u64,
) -> Result<Hamiltonian, StructureError> {
    if n == 0 {
        return Err(StructureError::Infeasible("need at least one qubit".into()));
    }
    if generators > n || (cliques >= 1 && generators >= n) {
        return Err(StructureError::Infeasible(format!(
            "{generators} generators leave no room for {cliques} cliques on {n} qubits"
        )));
    }
    let free = n - generators;
    if cliques > 2 * free + 1 {
        return Err(StructureError::Infeasible(format!(
            "{cliques} cliques exceed 2m+1 = {} for m = {free} free qubits",
            2 * free + 1
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gens: Vec<PauliOp> = (0..generators)
        .map(|j| {
            let mut g = PauliOp::identity(n);
            g.set(j, false, true);
            g
        })
        .collect();
    let random_subset = |rng: &mut ChaCha8Rng| -> Vec<bool> {
        (0..generators).map(|_| rng.gen_bool(0.5)).collect()
    };

    let mut seen: HashSet<PauliOp> = HashSet::new();
    let mut ops: Vec<PauliOp> = Vec::new();
    for g in &gens {
        seen.insert(g.clone());
        ops.push(g.clone());
    }
    if generators >= 2 {
        for _ in 0..rng.gen_range(0..=generators) {
            let p = product_of(&gens, &random_subset(&mut rng), n);
            if !p.is_identity() && seen.insert(p.clone()) {
                ops.push(p);
            }
        }
    }

    let mut family = ladder_family(n, generators, free);
    family.shuffle(&mut rng);
    family.truncate(cliques);
    let max_members = if generators == 0 { 1 } else { 3 };
    for gamma in &family {
        let members = rng.gen_range(1..=max_members);
        let mut added = 0;
        for attempt in 0..(4 * max_members) {
            if added == members {
                break;
            }
            let subset = if attempt == 0 {
                vec![false; generators]
            } else {
                random_subset(&mut rng)
            };
            let member = gamma.mul_with(&product_of(&gens, &subset, n)).1;
            if seen.insert(member.clone()) {
                ops.push(member);
                added += 1;
            }
        }
    }

    scramble(&mut ops, n, &mut rng);
    ops.shuffle(&mut rng);
    let mut h = Hamiltonian::new(n);
    h.set_identity_offset(Some(rng.gen_range(-1.0..=1.0)));
    for op in ops {
        let c = rng.gen_range(-1.0..=1.0);
        h.push(op, c).expect("generated strings are distinct and non-identity");
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::{build_structure, is_noncontextual};

    #[test]
    fn ladder_is_anticommuting() {
        for m in 1..5 {
            let fam = ladder_family(m, 0, m);
            assert_eq!(fam.len(), 2 * m + 1);
            for (i, a) in fam.iter().enumerate() {
                for (j, b) in fam.iter().enumerate() {
                    assert_eq!(a.commutes_with(b), i == j);
                }
            }
        }
    }

    #[test]
    fn single_clique_request() {
        let h = random_noncontextual_instance(3, 1, 2, 7).unwrap();
        assert!(is_noncontextual(&h.ops()));
    }

    #[test]
    fn three_anticommuting_on_two_qubits() {
        let h = random_noncontextual_instance(2, 3, 0, 1).unwrap();
        assert_eq!(h.terms().len(), 3);
        let s = build_structure(&h.ops()).unwrap();
        assert_eq!(s.num_cliques(), 3);
        assert!(s.universal().is_empty());
    }

    #[test]
    fn infeasible_requests() {
        assert!(matches!(
            random_noncontextual_instance(2, 6, 0, 3),
            Err(StructureError::Infeasible(_))
        ));
        assert!(random_noncontextual_instance(2, 2, 2, 0).is_err());
        assert!(random_noncontextual_instance(2, 0, 3, 0).is_err());
        assert!(random_noncontextual_instance(0, 0, 0, 0).is_err());
        assert!(random_noncontextual_instance(2, 0, 2, 0).is_ok());
    }

    #[test]
    fn deterministic_in_seed() {
        let a = random_noncontextual_instance(4, 3, 2, 42).unwrap();
        let b = random_noncontextual_instance(4, 3, 2, 42).unwrap();
        assert_eq!(a, b);
        let c = random_noncontextual_instance(4, 3, 2, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn requested_clique_count() {
        for seed in 0..50 {
            for (n, cl, g) in [(3, 2, 1), (4, 5, 1), (5, 3, 2), (2, 5, 0)] {
                let h = random_noncontextual_instance(n, cl, g, seed).unwrap();
                let s = build_structure(&h.ops()).unwrap();
                assert_eq!(s.num_cliques(), cl, "n={n} N={cl} g={g} seed={seed}");
            }
        }
    }

    #[test]
    fn family_errors() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(random_anticommuting_family(2, 6, &mut rng).is_err());
        assert_eq!(random_anticommuting_family(2, 5, &mut rng).unwrap().len(), 5);
    }
}
