//! Property tests for Pauli algebra and the key-value file format.

use ncpauli::hamiltonian::{load_hamiltonian, serialize_hamiltonian};
use ncpauli::oracle::to_matrix;
use ncpauli::{Hamiltonian, PauliOp, Phase};
use num_complex::Complex64;
use proptest::prelude::*;

fn label(n: usize) -> impl Strategy<Value = String> {
    prop::collection::vec(prop::sample::select(vec!['I', 'X', 'Y', 'Z']), n).prop_map(|v| v.into_iter().collect())
}

fn op(n: usize) -> impl Strategy<Value = PauliOp> {
    label(n).prop_map(|l| l.parse().unwrap())
}

/// Kronecker product of single-qubit matrices, built independently of the oracle.
fn kron_matrix(op: &PauliOp) -> Vec<Vec<Complex64>> {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let mut m = vec![vec![one]];
    for c in op.label().chars() {
        let p = match c {
            'I' => [[one, zero], [zero, one]],
            'X' => [[zero, one], [one, zero]],
            'Y' => [[zero, -i], [i, zero]],
            _ => [[one, zero], [zero, -one]],
        };
        let d = m.len();
        let mut next = vec![vec![zero; 2 * d]; 2 * d];
        for (r, row) in m.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                for a in 0..2 {
                    for b in 0..2 {
                        next[2 * r + a][2 * c + b] = v * p[a][b];
                    }
                }
            }
        }
        m = next;
    }
    m
}

fn matmul(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    let d = a.len();
    (0..d)
        .map(|r| (0..d).map(|c| (0..d).map(|k| a[r][k] * b[k][c]).sum()).collect())
        .collect()
}

fn phase_value(p: Phase) -> Complex64 {
    let (re, im) = p.as_complex();
    Complex64::new(f64::from(re), f64::from(im))
}

#[test]
fn all_two_qubit_products_match_matrices() {
    let labels: Vec<String> = ["I", "X", "Y", "Z"]
        .iter()
        .flat_map(|a| ["I", "X", "Y", "Z"].iter().map(move |b| format!("{a}{b}")))
        .collect();
    for a in &labels {
        for b in &labels {
            let (pa, pb): (PauliOp, PauliOp) = (a.parse().unwrap(), b.parse().unwrap());
            let (phase, prod) = pa.multiply(&pb).unwrap();
            let lhs = matmul(&kron_matrix(&pa), &kron_matrix(&pb));
            let rhs = kron_matrix(&prod);
            for r in 0..4 {
                for c in 0..4 {
                    assert!((lhs[r][c] - phase_value(phase) * rhs[r][c]).norm() < 1e-15, "{a}*{b}");
                }
            }
            let oracle = to_matrix(&Hamiltonian::from_labels(&[(a, 1.0)]).unwrap()).unwrap();
            let k = kron_matrix(&pa);
            for (r, row) in k.iter().enumerate() {
                for (c, v) in row.iter().enumerate() {
                    let (re, im) = oracle.entry(r, c);
                    assert_eq!(Complex64::new(re, im), *v, "{a}");
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn product_phase_matches_matrices(a in op(3), b in op(3)) {
        let (phase, prod) = a.multiply(&b).unwrap();
        let lhs = matmul(&kron_matrix(&a), &kron_matrix(&b));
        let rhs = kron_matrix(&prod);
        for r in 0..8 {
            for c in 0..8 {
                prop_assert!((lhs[r][c] - phase_value(phase) * rhs[r][c]).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn commutation_is_symmetric_and_matches_products(a in op(5), b in op(5)) {
        let ab = a.multiply(&b).unwrap();
        let ba = b.multiply(&a).unwrap();
        prop_assert_eq!(&ab.1, &ba.1);
        let commute = a.commutes(&b).unwrap();
        prop_assert_eq!(commute, b.commutes(&a).unwrap());
        prop_assert_eq!(commute, ab.0 == ba.0);
        if !commute {
            prop_assert_eq!(ab.0, -ba.0);
        }
    }

    #[test]
    fn multiplication_is_associative(a in op(70), b in op(70), c in op(70)) {
        let (p1, ab) = a.multiply(&b).unwrap();
        let (p2, left) = ab.multiply(&c).unwrap();
        let (p3, bc) = b.multiply(&c).unwrap();
        let (p4, right) = a.multiply(&bc).unwrap();
        prop_assert_eq!(left, right);
        prop_assert_eq!(p1 * p2, p3 * p4);
    }

    #[test]
    fn squares_are_identity(a in op(9)) {
        let (phase, sq) = a.multiply(&a).unwrap();
        prop_assert_eq!(phase, Phase::ONE);
        prop_assert!(sq.is_identity());
    }

    #[test]
    fn labels_round_trip(l in label(67)) {
        let p: PauliOp = l.parse().unwrap();
        prop_assert_eq!(p.label(), l);
    }

    #[test]
    fn ordering_follows_labels(a in label(4), b in label(4)) {
        let key = |s: &str| s.chars().map(|c| "IXYZ".find(c).unwrap()).collect::<Vec<_>>();
        let (pa, pb): (PauliOp, PauliOp) = (a.parse().unwrap(), b.parse().unwrap());
        prop_assert_eq!(pa.cmp(&pb), key(&a).cmp(&key(&b)));
    }

    #[test]
    fn file_format_round_trips(
        terms in prop::collection::btree_map(label(4), -1e3f64..1e3, 0..20),
    ) {
        let pairs: Vec<(&str, f64)> = terms.iter().map(|(k, v)| (k.as_str(), *v)).collect();
        let h = Hamiltonian::from_labels(&pairs).unwrap();
        let back = load_hamiltonian(&serialize_hamiltonian(&h)).unwrap();
        prop_assert_eq!(back.terms().len(), h.terms().len());
        for (x, y) in back.terms().iter().zip(h.terms()) {
            prop_assert_eq!(&x.op, &y.op);
            prop_assert_eq!(x.coefficient.to_bits(), y.coefficient.to_bits());
        }
        prop_assert_eq!(back.identity_offset().to_bits(), h.identity_offset().to_bits());
    }
}
