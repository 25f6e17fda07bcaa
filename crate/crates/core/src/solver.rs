//! Minimization of the classical objective over epistemic states.
//!
//! For fixed `q` the objective is `h0 + a·r`, minimized over the unit sphere
//! by `r = -a/|a|` with value `h0 - |a|`. The remaining search is over
//! `q ∈ {±1}^|G|`: exhaustive in Gray-code order up to a threshold, seeded
//! multi-restart steepest descent beyond it.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::epistemic::{evaluate_objective, EpistemicError, EpistemicState, ObjectiveFunction};

/// `h0 + a·r` for a fixed `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedCoefficients {
    pub h0: f64,
    pub a: Vec<f64>,
    pub norm: f64,
    /// `a / norm`, empty when `norm == 0`.
    pub unit: Vec<f64>,
}

impl ReducedCoefficients {
    fn new(h0: f64, a: Vec<f64>) -> ReducedCoefficients {
        let norm = a.iter().map(|v| v * v).sum::<f64>().sqrt();
        let unit = if norm > 0.0 {
            a.iter().map(|v| v / norm).collect()
        } else {
            Vec::new()
        };
        ReducedCoefficients { h0, a, norm, unit }
    }
}

/// Sums every row with its parity `Π_{j∈J_B} q_j`.
pub fn reduce_for_q(f: &ObjectiveFunction, q: &[i8]) -> ReducedCoefficients {
    assert_eq!(q.len(), f.num_generators, "q length");
    let mut h0 = f.constant;
    let mut a = vec![0.0; f.num_cliques];
    for row in &f.rows {
        let m = if row.generators.iter().filter(|&&j| q[j] < 0).count() % 2 == 1 {
            -1.0
        } else {
            1.0
        };
        h0 += m * row.h;
        for (ai, h) in a.iter_mut().zip(&row.h_clique) {
            *ai += m * h;
        }
    }
    ReducedCoefficients::new(h0, a)
}

/// `(r*, h0 - |a|)`; `r* = e_1` when `a = 0`, empty when there are no cliques.
pub fn inner_minimize(rc: &ReducedCoefficients) -> (Vec<f64>, f64) {
    if rc.a.is_empty() {
        return (Vec::new(), rc.h0);
    }
    if rc.norm > 0.0 {
        (rc.unit.iter().map(|u| -u).collect(), rc.h0 - rc.norm)
    } else {
        let mut r = vec![0.0; rc.a.len()];
        r[0] = 1.0;
        (r, rc.h0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveMethod {
    Exhaustive,
    LocalSearch,
}

impl fmt::Display for SolveMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolveMethod::Exhaustive => "exhaustive",
            SolveMethod::LocalSearch => "local-search",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolverOptions {
    /// Largest `|G|` searched exhaustively.
    pub exhaustive_threshold: usize,
    /// Restarts of the local search.
    pub restarts: usize,
    pub seed: u64,
}

impl Default for SolverOptions {
    fn default() -> SolverOptions {
        SolverOptions {
            exhaustive_threshold: 22,
            restarts: 64,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundResult {
    /// `evaluate_objective` at the witness.
    pub energy: f64,
    pub witness: EpistemicState,
    pub method: SolveMethod,
    pub q_evaluations: u64,
}

fn tie_tolerance(f: &ObjectiveFunction) -> f64 {
    let l1: f64 = f
        .rows
        .iter()
        .map(|r| r.h.abs() + r.h_clique.iter().map(|h| h.abs()).sum::<f64>())
        .sum();
    1e-12 * (1.0 + f.constant.abs() + l1)
}

/// `a` precedes `b` in the order `+1 < -1`, compared from generator 0.
fn mask_precedes(a: u64, b: u64) -> bool {
    let diff = a ^ b;
    diff != 0 && a & (diff & diff.wrapping_neg()) == 0
}

fn q_from_mask(mask: u64, len: usize) -> Vec<i8> {
    (0..len).map(|j| if (mask >> j) & 1 == 1 { -1 } else { 1 }).collect()
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    energy: f64,
    mask: u64,
}

fn better(c: Candidate, best: Option<Candidate>, tol: f64) -> bool {
    match best {
        None => true,
        Some(b) => c.energy < b.energy - tol || (c.energy <= b.energy + tol && mask_precedes(c.mask, b.mask)),
    }
}

/// Incremental `h0` and `a` along a Gray-code walk.
struct GrayWalker<'a> {
    f: &'a ObjectiveFunction,
    rows_of: &'a [Vec<usize>],
    mask: u64,
    signs: Vec<f64>,
    h0: f64,
    a: Vec<f64>,
}

impl<'a> GrayWalker<'a> {
    fn new(f: &'a ObjectiveFunction, rows_of: &'a [Vec<usize>], mask: u64) -> GrayWalker<'a> {
        let mut w = GrayWalker {
            f,
            rows_of,
            mask,
            signs: vec![1.0; f.rows.len()],
            h0: 0.0,
            a: vec![0.0; f.num_cliques],
        };
        w.refresh();
        w
    }

    fn refresh(&mut self) {
        self.h0 = self.f.constant;
        self.a.iter_mut().for_each(|v| *v = 0.0);
        for (row, sign) in self.f.rows.iter().zip(self.signs.iter_mut()) {
            let odd = row.generators.iter().filter(|&&j| (self.mask >> j) & 1 == 1).count() % 2 == 1;
            *sign = if odd { -1.0 } else { 1.0 };
            self.h0 += *sign * row.h;
            for (ai, h) in self.a.iter_mut().zip(&row.h_clique) {
                *ai += *sign * h;
            }
        }
    }

    fn flip(&mut self, j: usize) {
        self.mask ^= 1 << j;
        for &k in &self.rows_of[j] {
            let row = &self.f.rows[k];
            self.signs[k] = -self.signs[k];
            let twice = 2.0 * self.signs[k];
            self.h0 += twice * row.h;
            for (ai, h) in self.a.iter_mut().zip(&row.h_clique) {
                *ai += twice * h;
            }
        }
    }

    fn energy(&self) -> f64 {
        self.h0 - self.a.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

const REFRESH_PERIOD: u64 = 256;
const SEGMENT_BITS: usize = 6;
const PARALLEL_MIN_BITS: usize = 16;

fn gray(k: u64) -> u64 {
    k ^ (k >> 1)
}

/// Best candidate over Gray-code positions `start..end`.
fn scan_segment(f: &ObjectiveFunction, rows_of: &[Vec<usize>], start: u64, end: u64, tol: f64) -> Candidate {
    let mut walker = GrayWalker::new(f, rows_of, gray(start));
    let mut best = Candidate {
        energy: walker.energy(),
        mask: walker.mask,
    };
    for k in (start + 1)..end {
        walker.flip(k.trailing_zeros() as usize);
        if (k - start).is_multiple_of(REFRESH_PERIOD) {
            walker.refresh();
        }
        let c = Candidate {
            energy: walker.energy(),
            mask: walker.mask,
        };
        if better(c, Some(best), tol) {
            best = c;
        }
    }
    best
}

fn exhaustive(f: &ObjectiveFunction) -> (u64, u64) {
    let g = f.num_generators;
    let mut rows_of = vec![Vec::new(); g];
    for (k, row) in f.rows.iter().enumerate() {
        for &j in &row.generators {
            rows_of[j].push(k);
        }
    }
    let tol = tie_tolerance(f);
    let total = 1u64 << g;
    let segments = if g >= PARALLEL_MIN_BITS { 1u64 << SEGMENT_BITS } else { 1 };
    let len = total / segments;
    let results: Vec<Candidate> = (0..segments)
        .into_par_iter()
        .map(|s| scan_segment(f, &rows_of, s * len, (s + 1) * len, tol))
        .collect();
    let mut best = None;
    for c in results {
        if better(c, best, tol) {
            best = Some(c);
        }
    }
    (best.expect("at least one assignment").mask, total)
}

fn reduced_energy(f: &ObjectiveFunction, q: &[i8]) -> f64 {
    inner_minimize(&reduce_for_q(f, q)).1
}

/// `a` precedes `b` in the order `+1 < -1`.
fn q_precedes(a: &[i8], b: &[i8]) -> bool {
    a.iter().zip(b).find(|(x, y)| x != y).is_some_and(|(x, _)| *x > 0)
}

fn local_search(f: &ObjectiveFunction, opts: &SolverOptions) -> (Vec<i8>, u64) {
    let g = f.num_generators;
    let tol = tie_tolerance(f);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut evaluations = 0u64;
    let mut best: Option<(f64, Vec<i8>)> = None;
    for _ in 0..opts.restarts.max(1) {
        let mut q: Vec<i8> = (0..g).map(|_| if rng.gen_bool(0.5) { -1 } else { 1 }).collect();
        let mut energy = reduced_energy(f, &q);
        evaluations += 1;
        loop {
            let mut step: Option<(f64, usize)> = None;
            for j in 0..g {
                q[j] = -q[j];
                let e = reduced_energy(f, &q);
                q[j] = -q[j];
                evaluations += 1;
                if e < energy - tol && step.is_none_or(|(se, _)| e < se) {
                    step = Some((e, j));
                }
            }
            match step {
                Some((e, j)) => {
                    q[j] = -q[j];
                    energy = e;
                }
                None => break,
            }
        }
        let replace = match &best {
            None => true,
            Some((be, bq)) => energy < be - tol || (energy <= be + tol && q_precedes(&q, bq)),
        };
        if replace {
            best = Some((energy, q));
        }
    }
    (best.expect("at least one restart").1, evaluations)
}

/// Minimizes the objective over all epistemic states.
pub fn solve_ground(f: &ObjectiveFunction, opts: &SolverOptions) -> GroundResult {
    let g = f.num_generators;
    let (q, method, q_evaluations) = if g <= opts.exhaustive_threshold.min(63) {
        let (mask, count) = exhaustive(f);
        (q_from_mask(mask, g), SolveMethod::Exhaustive, count)
    } else {
        let (q, count) = local_search(f, opts);
        (q, SolveMethod::LocalSearch, count)
    };
    let (r, _) = inner_minimize(&reduce_for_q(f, &q));
    let witness = EpistemicState::new(q, r).expect("minimizer is a valid state");
    let energy = evaluate_objective(f, &witness).expect("dimensions match");
    GroundResult {
        energy,
        witness,
        method,
        q_evaluations,
    }
}

/// Whether the witness certifies an energy strictly below `threshold`.
pub fn verify_witness(f: &ObjectiveFunction, s: &EpistemicState, threshold: f64) -> Result<bool, EpistemicError> {
    Ok(evaluate_objective(f, s)? < threshold)
}
