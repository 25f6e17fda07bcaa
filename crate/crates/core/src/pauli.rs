//! n-qubit Pauli strings in packed symplectic form.
//!
//! A [`PauliOp`] is an unsigned tensor product of `I`, `X`, `Y`, `Z`, stored as
//! two bit vectors: the X components and the Z components. `Y` sets both bits
//! and denotes the Hermitian operator `Y = iXZ`. Products of two strings carry
//! an exact [`Phase`] (a power of `i`), never a float.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Mul, Neg};
use std::str::FromStr;

use thiserror::Error;

const WORD_BITS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PauliError {
    #[error("empty Pauli label")]
    Empty,
    /// `position` is 1-based.
    #[error("invalid character {found:?} at position {position} (expected one of I, X, Y, Z)")]
    InvalidChar { position: usize, found: char },
    #[error("qubit count mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
}

/// A power of `i`: one of `+1`, `+i`, `-1`, `-i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_exponent(k: i64) -> Phase {
        Phase(k.rem_euclid(4) as u8)
    }

    /// The exponent `k` in `i^k`, in `0..4`.
    pub fn exponent(self) -> u8 {
        self.0
    }

    pub fn is_real(self) -> bool {
        self.0.is_multiple_of(2)
    }

    /// `Some(+1)` or `Some(-1)` for real phases, `None` for `±i`.
    pub fn sign(self) -> Option<i8> {
        match self.0 {
            0 => Some(1),
            2 => Some(-1),
            _ => None,
        }
    }

    pub fn from_sign(sign: i8) -> Phase {
        if sign < 0 {
            Phase::MINUS_ONE
        } else {
            Phase::ONE
        }
    }

    pub fn conj(self) -> Phase {
        Phase((4 - self.0) % 4)
    }

    /// `(re, im)` of the phase as exact small integers.
    pub fn as_complex(self) -> (i8, i8) {
        match self.0 {
            0 => (1, 0),
            1 => (0, 1),
            2 => (-1, 0),
            _ => (0, -1),
        }
    }
}

impl Mul for Phase {
    type Output = Phase;
    fn mul(self, rhs: Phase) -> Phase {
        Phase((self.0 + rhs.0) % 4)
    }
}

impl Neg for Phase {
    type Output = Phase;
    fn neg(self) -> Phase {
        Phase((self.0 + 2) % 4)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self.0 {
            0 => "+1",
            1 => "+i",
            2 => "-1",
            _ => "-i",
        })
    }
}

/// Unsigned n-qubit Pauli string. Qubit 0 is the leftmost label character.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliOp {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
}

fn words_for(n: usize) -> usize {
    n.div_ceil(WORD_BITS)
}

impl PauliOp {
    pub fn identity(n: usize) -> PauliOp {
        PauliOp {
            n,
            x: vec![0; words_for(n)],
            z: vec![0; words_for(n)],
        }
    }

    /// Builds a string from explicit bit vectors; both slices must have the same length.
    pub fn from_bits(x: &[bool], z: &[bool]) -> Result<PauliOp, PauliError> {
        if x.len() != z.len() {
            return Err(PauliError::DimensionMismatch {
                left: x.len(),
                right: z.len(),
            });
        }
        let mut op = PauliOp::identity(x.len());
        for q in 0..x.len() {
            op.set(q, x[q], z[q]);
        }
        Ok(op)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn x_bit(&self, qubit: usize) -> bool {
        assert!(qubit < self.n, "qubit {qubit} out of range for {} qubits", self.n);
        (self.x[qubit / WORD_BITS] >> (qubit % WORD_BITS)) & 1 == 1
    }

    pub fn z_bit(&self, qubit: usize) -> bool {
        assert!(qubit < self.n, "qubit {qubit} out of range for {} qubits", self.n);
        (self.z[qubit / WORD_BITS] >> (qubit % WORD_BITS)) & 1 == 1
    }

    /// Sets the (x, z) bits of one qubit.
    pub fn set(&mut self, qubit: usize, x: bool, z: bool) {
        assert!(qubit < self.n, "qubit {qubit} out of range for {} qubits", self.n);
        let (w, b) = (qubit / WORD_BITS, qubit % WORD_BITS);
        let mask = 1u64 << b;
        self.x[w] = (self.x[w] & !mask) | ((x as u64) << b);
        self.z[w] = (self.z[w] & !mask) | ((z as u64) << b);
    }

    /// Single-qubit factor as a label character.
    pub fn factor(&self, qubit: usize) -> char {
        match (self.x_bit(qubit), self.z_bit(qubit)) {
            (false, false) => 'I',
            (true, false) => 'X',
            (true, true) => 'Y',
            (false, true) => 'Z',
        }
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().chain(&self.z).all(|&w| w == 0)
    }

    /// True iff every factor is `I` or `Z`.
    pub fn is_diagonal(&self) -> bool {
        self.x.iter().all(|&w| w == 0)
    }

    /// Number of non-identity factors.
    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(x, z)| (x | z).count_ones() as usize)
            .sum()
    }

    /// Number of `Y` factors.
    pub fn y_count(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(x, z)| (x & z).count_ones() as usize)
            .sum()
    }

    pub(crate) fn x_words(&self) -> &[u64] {
        &self.x
    }

    pub(crate) fn z_words(&self) -> &[u64] {
        &self.z
    }

    /// Symplectic vector `(x | z)` as `2n` bits: x bits at `0..n`, z bits at `n..2n`.
    pub fn symplectic_bits(&self) -> Vec<bool> {
        (0..self.n)
            .map(|q| self.x_bit(q))
            .chain((0..self.n).map(|q| self.z_bit(q)))
            .collect()
    }

    fn check_width(&self, other: &PauliOp) -> Result<(), PauliError> {
        if self.n == other.n {
            Ok(())
        } else {
            Err(PauliError::DimensionMismatch {
                left: self.n,
                right: other.n,
            })
        }
    }

    /// Whether the two strings commute as matrices (symplectic form is zero).
    pub fn commutes(&self, other: &PauliOp) -> Result<bool, PauliError> {
        self.check_width(other)?;
        Ok(self.commutes_with(other))
    }

    /// Panicking variant of [`PauliOp::commutes`] for callers that already
    /// guarantee equal widths.
    pub(crate) fn commutes_with(&self, other: &PauliOp) -> bool {
        debug_assert_eq!(self.n, other.n);
        let mut parity = 0u32;
        for w in 0..self.x.len() {
            parity ^= ((self.x[w] & other.z[w]) ^ (self.z[w] & other.x[w])).count_ones();
        }
        parity.is_multiple_of(2)
    }

    /// Matrix product `self · other = phase · result`.
    pub fn multiply(&self, other: &PauliOp) -> Result<(Phase, PauliOp), PauliError> {
        self.check_width(other)?;
        Ok(self.mul_with(other))
    }

    pub(crate) fn mul_with(&self, other: &PauliOp) -> (Phase, PauliOp) {
        debug_assert_eq!(self.n, other.n);
        let mut exponent: i64 = 0;
        let mut out = PauliOp::identity(self.n);
        for w in 0..self.x.len() {
            let (x1, z1, x2, z2) = (self.x[w], self.z[w], other.x[w], other.z[w]);
            let (y1, xo1, zo1) = (x1 & z1, x1 & !z1, !x1 & z1);
            let (y2, xo2, zo2) = (x2 & z2, x2 & !z2, !x2 & z2);
            // XY = iZ, YZ = iX, ZX = iY and the reversed orders give -i.
            let plus = (xo1 & y2) | (y1 & zo2) | (zo1 & xo2);
            let minus = (y1 & xo2) | (zo1 & y2) | (xo1 & zo2);
            exponent += plus.count_ones() as i64 - minus.count_ones() as i64;
            out.x[w] = x1 ^ x2;
            out.z[w] = z1 ^ z2;
        }
        (Phase::from_exponent(exponent), out)
    }

    pub fn label(&self) -> String {
        (0..self.n).map(|q| self.factor(q)).collect()
    }

    fn factor_rank(&self, qubit: usize) -> u8 {
        match self.factor(qubit) {
            'I' => 0,
            'X' => 1,
            'Y' => 2,
            _ => 3,
        }
    }
}

impl FromStr for PauliOp {
    type Err = PauliError;

    fn from_str(label: &str) -> Result<PauliOp, PauliError> {
        if label.is_empty() {
            return Err(PauliError::Empty);
        }
        let chars: Vec<char> = label.chars().collect();
        let mut op = PauliOp::identity(chars.len());
        for (q, &c) in chars.iter().enumerate() {
            let (x, z) = match c {
                'I' => (false, false),
                'X' => (true, false),
                'Y' => (true, true),
                'Z' => (false, true),
                found => {
                    return Err(PauliError::InvalidChar {
                        position: q + 1,
                        found,
                    })
                }
            };
            op.set(q, x, z);
        }
        Ok(op)
    }
}

/// Parses a label such as `"XZIY"`.
pub fn parse_pauli(label: &str) -> Result<PauliOp, PauliError> {
    label.parse()
}

impl fmt::Display for PauliOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl fmt::Debug for PauliOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliOp({})", self.label())
    }
}

/// Lexicographic order on labels with `I < X < Y < Z`; shorter strings first.
impl Ord for PauliOp {
    fn cmp(&self, other: &PauliOp) -> Ordering {
        self.n.cmp(&other.n).then_with(|| {
            (0..self.n)
                .map(|q| self.factor_rank(q).cmp(&other.factor_rank(q)))
                .find(|o| o.is_ne())
                .unwrap_or(Ordering::Equal)
        })
    }
}

impl PartialOrd for PauliOp {
    fn partial_cmp(&self, other: &PauliOp) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
