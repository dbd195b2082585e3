//! Minimal solutions of the degree equation: given a prime `p` and degrees
//! `d_1, ..., d_N`, compute
//!
//! ```text
//! mu = min { j_1 + ... + j_N :  sum_i d_i * j_i = 0 (mod p-1),
//!            0 <= j_i <= p-1, not all j_i zero }
//! ```
//!
//! together with a witness tuple. Two independent solvers are provided: an
//! exhaustive scan over tuples ([`mu_brute`], small inputs only) and a
//! breadth-first search over residues modulo `p - 1` ([`mu_bfs`]). Every
//! result is re-checked against the defining congruence before it is
//! returned.

use serde::Serialize;
use thiserror::Error;

use crate::modarith::Prime;

/// Caps for the exhaustive scan: the tuple space is `p^N`.
const BRUTE_MAX_N: usize = 2;
const BRUTE_MAX_P: u64 = 2000;

/// Cap for the residue graph walked by the BFS.
const BFS_MAX_P: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("degree list must be nonempty")]
    NoDegrees,
    #[error("degree {degree} outside [1, {max}] for p = {p}")]
    DegreeOutOfRange { degree: u64, max: u64, p: u64 },
    #[error("exhaustive scan limited to N <= {BRUTE_MAX_N} degrees and p <= {BRUTE_MAX_P}; got N = {n}, p = {p}")]
    BruteTooLarge { p: u64, n: usize },
    #[error("residue search limited to p <= {BFS_MAX_P}; got p = {p}")]
    BfsTooLarge { p: u64 },
    #[error("solver invariant broken for p = {p}: {detail}")]
    SelfCheckFailed { p: u64, detail: String },
}

/// A degree tuple to minimize over, validated against its prime.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MuProblem {
    p: Prime,
    degrees: Vec<u64>,
}

impl MuProblem {
    /// Degrees must each lie in `[1, p-2]`; repeats are allowed (they model
    /// polynomials that happen to share a monomial degree across instances).
    pub fn new(p: Prime, degrees: Vec<u64>) -> Result<Self, SolverError> {
        if degrees.is_empty() {
            return Err(SolverError::NoDegrees);
        }
        let max = p.value() - 2;
        for &d in &degrees {
            if d == 0 || d > max {
                return Err(SolverError::DegreeOutOfRange { degree: d, max, p: p.value() });
            }
        }
        Ok(MuProblem { p, degrees })
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn degrees(&self) -> &[u64] {
        &self.degrees
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    BruteForce,
    Bfs,
}

/// The minimum, one tuple attaining it, and which solver produced it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MuResult {
    pub value: u64,
    pub witness: Vec<u64>,
    pub method: Method,
}

/// True iff `witness` is a feasible (not necessarily minimal) solution of
/// `problem` with cost exactly `value`.
pub fn witness_is_valid(problem: &MuProblem, value: u64, witness: &[u64]) -> bool {
    let m = problem.p.phi();
    if witness.len() != problem.degrees.len() {
        return false;
    }
    if witness.iter().all(|&j| j == 0) {
        return false;
    }
    if witness.iter().any(|&j| j > problem.p.value() - 1) {
        return false;
    }
    if witness.iter().sum::<u64>() != value {
        return false;
    }
    let dot: u64 = problem
        .degrees
        .iter()
        .zip(witness)
        .map(|(&d, &j)| (d % m) * (j % m) % m)
        .sum::<u64>();
    dot % m == 0
}

fn self_check(problem: &MuProblem, result: &MuResult) -> Result<(), SolverError> {
    if witness_is_valid(problem, result.value, &result.witness) {
        Ok(())
    } else {
        Err(SolverError::SelfCheckFailed {
            p: problem.p.value(),
            detail: format!(
                "witness {:?} does not attain value {} for degrees {:?}",
                result.witness, result.value, problem.degrees
            ),
        })
    }
}

/// Exhaustive scan over all tuples `0 <= j_i <= p-1`, keeping the best cost
/// and, among minimizers, the lexicographically smallest tuple.
///
/// Restricted to `N <= 2` and `p <= 2000`; beyond that use [`mu_bfs`].
pub fn mu_brute(problem: &MuProblem) -> Result<MuResult, SolverError> {
    let p = problem.p.value();
    let n = problem.degrees.len();
    if n > BRUTE_MAX_N || p > BRUTE_MAX_P {
        return Err(SolverError::BruteTooLarge { p, n });
    }
    let m = problem.p.phi();
    let mut best: Option<(u64, Vec<u64>)> = None;
    // Ascending lexicographic scan with strict improvement keeps the first,
    // i.e. lexicographically smallest, witness among equal-cost minimizers.
    match problem.degrees[..] {
        [d1] => {
            for j1 in 0..=(p - 1) {
                if j1 == 0 {
                    continue;
                }
                if (d1 * j1) % m == 0 && best.as_ref().is_none_or(|(c, _)| j1 < *c) {
                    best = Some((j1, vec![j1]));
                }
            }
        }
        [d1, d2] => {
            for j1 in 0..=(p - 1) {
                for j2 in 0..=(p - 1) {
                    if j1 == 0 && j2 == 0 {
                        continue;
                    }
                    let cost = j1 + j2;
                    if (d1 * j1 + d2 * j2) % m == 0
                        && best.as_ref().is_none_or(|(c, _)| cost < *c)
                    {
                        best = Some((cost, vec![j1, j2]));
                    }
                }
            }
        }
        _ => unreachable!("N capped at {BRUTE_MAX_N}"),
    }
    // A solution always exists: j = ((p-1)/gcd(d, p-1), 0, ...) works.
    let (value, witness) = best.expect("degree equation always has a nonzero solution");
    let result = MuResult { value, witness, method: Method::BruteForce };
    self_check(problem, &result)?;
    Ok(result)
}

/// Breadth-first search on the residues modulo `p - 1`.
///
/// Nodes are residues; an edge steps from `r` to `(r + d_i) mod (p-1)` at
/// unit cost, which increments `j_i`. The first time residue 0 is reached
/// from a nonempty tuple, the BFS depth is the minimum. The per-coordinate
/// cap `j_i <= p - 1` never binds: the single-degree solution shows the
/// minimum is at most `p - 1`, so no coordinate of a minimal tuple can
/// exceed it (it is still checked afterwards).
///
/// Neighbors are expanded in degree-index order from a queue seeded in that
/// same order, so the recovered witness is deterministic.
pub fn mu_bfs(problem: &MuProblem) -> Result<MuResult, SolverError> {
    let p = problem.p.value();
    if p > BFS_MAX_P {
        return Err(SolverError::BfsTooLarge { p });
    }
    let m = problem.p.phi();
    let degrees = &problem.degrees;

    // parent[r] = (previous residue, degree index used), set once when r is
    // first discovered.
    let mut parent: Vec<Option<(u64, usize)>> = vec![None; m as usize];
    let mut dist: Vec<Option<u64>> = vec![None; m as usize];
    let mut queue = std::collections::VecDeque::new();

    // Seed with one step from the empty tuple: residues d_i at distance 1.
    // None of them is 0 (degrees lie in [1, p-2]), so the all-zero tuple is
    // never offered as a solution.
    let mut found: Option<u64> = None;
    for (idx, &d) in degrees.iter().enumerate() {
        let r = d % m;
        debug_assert_ne!(r, 0, "degrees are in [1, p-2]");
        if dist[r as usize].is_none() {
            dist[r as usize] = Some(1);
            parent[r as usize] = Some((u64::MAX, idx));
            queue.push_back(r);
        }
    }

    while let Some(r) = queue.pop_front() {
        if found.is_some() {
            break;
        }
        let d_here = dist[r as usize].expect("queued nodes have a distance");
        for (idx, &d) in degrees.iter().enumerate() {
            let next = (r + d) % m;
            if dist[next as usize].is_none() {
                dist[next as usize] = Some(d_here + 1);
                parent[next as usize] = Some((r, idx));
                if next == 0 {
                    found = Some(d_here + 1);
                    break;
                }
                queue.push_back(next);
            }
        }
    }

    let value = found
        .or(dist[0])
        .expect("residue 0 is reachable: (p-1)/gcd(d_1, p-1) steps of d_1 land on it");

    // Walk the parent chain from 0 back to the seed, counting steps per
    // degree index.
    let mut witness = vec![0u64; degrees.len()];
    let mut cursor = 0u64;
    loop {
        let (prev, idx) = parent[cursor as usize].expect("chain stays inside discovered nodes");
        witness[idx] += 1;
        if prev == u64::MAX {
            break;
        }
        cursor = prev;
    }

    let result = MuResult { value, witness, method: Method::Bfs };
    self_check(problem, &result)?;
    Ok(result)
}
