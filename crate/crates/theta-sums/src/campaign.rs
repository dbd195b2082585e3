//! Bulk verification sweeps over ranges of primes, with deterministic,
//! machine-readable reports.
//!
//! Three sweeps are provided:
//!
//! * [`sweep_conjecture`]: checks `mu_p(d1, d2) <= (p-1)/2` for every degree
//!   pair, optionally cross-checking the two solvers against each other.
//! * [`sweep_theorem1`]: checks the divisibility bound
//!   `theta_valuation(S_p(a x^d1 + b x^d2)) >= mu_p(d1, d2)` with exact
//!   cyclotomic arithmetic.
//! * [`sweep_witness`]: runs the constructive witness procedure everywhere
//!   and confirms every output lands under `(p-1)/2`.
//!
//! Work is partitioned one task per prime; tasks share nothing, and results
//! are merged in prime order, so reports are byte-identical no matter how
//! many threads run them. Violations never abort a sweep: they are collected
//! into rows with `ok = false` and counted in the summary, because the whole
//! point is to surface counterexamples if any exist.

use std::io::{self, Write};
use std::time::{Duration, Instant};

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::cyclotomic::Valuation;
use crate::expsum::SparsePoly;
use crate::modarith::{primes_in_range, Prime};
use crate::musolver::{mu_bfs, mu_brute, MuProblem, SolverError};
use crate::witness::{check_witness, constructive_witness, Branch, WitnessError};

/// Default ceiling on a sweep's estimated work, in abstract operation units
/// (one unit is roughly one small arithmetic step). Chosen so that anything
/// under it finishes in at most tens of minutes on one core; larger requests
/// error out instead of silently running for hours.
pub const DEFAULT_WORK_BUDGET: u64 = 200_000_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepConfig {
    /// Worker threads for per-prime tasks; 0 means one per machine core.
    pub threads: usize,
    /// Estimated-work ceiling; see [`DEFAULT_WORK_BUDGET`].
    pub budget: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig { threads: 0, budget: DEFAULT_WORK_BUDGET }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SweepError {
    #[error("invalid prime range [{lo}, {hi}]: need 5 <= lo <= hi")]
    InvalidRange { lo: u64, hi: u64 },
    #[error("sweep too large: estimated {estimated} work units exceed the budget of {budget}; shrink the range or raise the budget")]
    RangeTooLarge { estimated: u64, budget: u64 },
    #[error("the `all` coefficient policy is capped at p <= {max}; got {hi} (use the diagonal policy for larger primes)")]
    AllCoeffsTooLarge { hi: u64, max: u64 },
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Witness(#[from] WitnessError),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

/// Which solver(s) a conjecture sweep runs per degree pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverChoice {
    Bfs,
    Brute,
    /// Run both and treat any disagreement as a violation.
    Both,
}

impl SolverChoice {
    pub fn as_str(self) -> &'static str {
        match self {
            SolverChoice::Bfs => "bfs",
            SolverChoice::Brute => "brute",
            SolverChoice::Both => "both",
        }
    }
}

impl std::fmt::Display for SolverChoice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for SolverChoice {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

/// Coefficient coverage for the bound sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoeffPolicy {
    /// Every pair `(a, b)` in `[1, p-1]^2`. Exhaustive but quadratic; capped
    /// at `p <= 31`.
    All,
    /// The single representative `a = b = 1`, usable at much larger primes.
    Diagonal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ConjectureRow {
    pub p: u64,
    pub d1: u64,
    pub d2: u64,
    pub mu: u64,
    pub bound: u64,
    pub ok: bool,
    pub j1: u64,
    pub j2: u64,
    pub method: SolverChoice,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Theorem1Row {
    pub p: u64,
    pub d1: u64,
    pub d2: u64,
    pub a: u64,
    pub b: u64,
    pub nu_theta: Valuation,
    pub mu: u64,
    pub ok: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct WitnessRow {
    pub p: u64,
    pub d1: u64,
    pub d2: u64,
    pub i: u64,
    pub j: u64,
    pub branch: Branch,
    pub doublings: u32,
    pub reflected: bool,
    pub fallback: bool,
    pub sum_ok: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
pub struct BranchCounts {
    pub gcd_d1: u64,
    pub gcd_d2: u64,
    pub doubling: u64,
}

/// Aggregates reported alongside every sweep. Fields that only apply to one
/// sweep kind are `None` elsewhere and omitted from serialized output.
///
/// `elapsed` is wall-clock and deliberately not serialized: reports must be
/// byte-identical across reruns and thread counts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSummary {
    pub rows_checked: u64,
    pub violations: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fallbacks: Option<u64>,
    #[serde(
        skip_serializing_if = "Option::is_none",
        serialize_with = "serialize_ratio"
    )]
    pub max_mu_ratio: Option<Ratio<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub equality_count: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub branch_counts: Option<BranchCounts>,
    #[serde(skip)]
    pub elapsed: Duration,
}

fn serialize_ratio<S: Serializer>(
    ratio: &Option<Ratio<u64>>,
    serializer: S,
) -> Result<S::Ok, S::Error> {
    match ratio {
        Some(r) => serializer.collect_str(r),
        None => serializer.serialize_none(),
    }
}

fn validate_range(lo: u64, hi: u64) -> Result<(), SweepError> {
    if lo < 5 || lo > hi {
        return Err(SweepError::InvalidRange { lo, hi });
    }
    Ok(())
}

/// Number of degree pairs `1 <= d1 < d2 <= p-2`.
fn degree_pairs(p: u64) -> u64 {
    let k = p - 2;
    k * (k - 1) / 2
}

/// Closed-form row count of a conjecture or witness sweep over `[lo, hi]`.
pub fn pair_row_count(lo: u64, hi: u64) -> u64 {
    primes_in_range(lo, hi).iter().map(|p| degree_pairs(p.value())).sum()
}

/// Closed-form row count of a bound sweep over `[lo, hi]`.
pub fn theorem1_row_count(lo: u64, hi: u64, policy: CoeffPolicy) -> u64 {
    primes_in_range(lo, hi)
        .iter()
        .map(|p| {
            let coeffs = match policy {
                CoeffPolicy::All => (p.value() - 1) * (p.value() - 1),
                CoeffPolicy::Diagonal => 1,
            };
            degree_pairs(p.value()) * coeffs
        })
        .sum()
}

fn check_budget(estimated: u64, config: &SweepConfig) -> Result<(), SweepError> {
    if estimated > config.budget {
        return Err(SweepError::RangeTooLarge { estimated, budget: config.budget });
    }
    Ok(())
}

/// Runs one task per prime, preserving prime order in the output no matter
/// how the tasks are scheduled. `threads == 1` does not touch rayon at all,
/// `threads == 0` uses the global pool, anything else gets a dedicated pool.
fn run_per_prime<R, F>(
    primes: &[Prime],
    threads: usize,
    task: F,
) -> Result<Vec<R>, SweepError>
where
    R: Send,
    F: Fn(Prime) -> Result<Vec<R>, SweepError> + Sync,
{
    let nested: Vec<Vec<R>> = match threads {
        1 => primes.iter().map(|&p| task(p)).collect::<Result<_, _>>()?,
        0 => primes.par_iter().map(|&p| task(p)).collect::<Result<_, _>>()?,
        n => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| SweepError::Internal(format!("thread pool: {e}")))?;
            pool.install(|| {
                primes.par_iter().map(|&p| task(p)).collect::<Result<_, _>>()
            })?
        }
    };
    Ok(nested.into_iter().flatten().collect())
}

/// Checks `mu_p(d1, d2) <= (p-1)/2` for every prime in `[p_lo, p_hi]` and
/// every pair `1 <= d1 < d2 <= p-2`.
///
/// Rows come out in `(p, d1, d2)` lexicographic order. With
/// [`SolverChoice::Both`], the row's `mu` and witness come from the
/// exhaustive solver, and a value disagreement between the two solvers marks
/// the row as a violation even when the bound holds.
pub fn sweep_conjecture(
    p_lo: u64,
    p_hi: u64,
    solver: SolverChoice,
    config: &SweepConfig,
) -> Result<(Vec<ConjectureRow>, SweepSummary), SweepError> {
    validate_range(p_lo, p_hi)?;
    let primes = primes_in_range(p_lo, p_hi);
    let estimated: u64 = primes
        .iter()
        .map(|p| {
            let pv = p.value();
            let per_pair = match solver {
                SolverChoice::Bfs => 2 * (pv - 1),
                SolverChoice::Brute => pv * pv,
                SolverChoice::Both => pv * pv + 2 * (pv - 1),
            };
            degree_pairs(pv).saturating_mul(per_pair)
        })
        .sum();
    check_budget(estimated, config)?;

    let start = Instant::now();
    let rows = run_per_prime(&primes, config.threads, |pr| {
        let pv = pr.value();
        let bound = pr.half();
        let mut rows = Vec::with_capacity(degree_pairs(pv) as usize);
        for d1 in 1..=(pv - 2) {
            for d2 in (d1 + 1)..=(pv - 2) {
                let problem = MuProblem::new(pr, vec![d1, d2])?;
                let (mu, j1, j2, solvers_agree) = match solver {
                    SolverChoice::Bfs => {
                        let r = mu_bfs(&problem)?;
                        (r.value, r.witness[0], r.witness[1], true)
                    }
                    SolverChoice::Brute => {
                        let r = mu_brute(&problem)?;
                        (r.value, r.witness[0], r.witness[1], true)
                    }
                    SolverChoice::Both => {
                        let exhaustive = mu_brute(&problem)?;
                        let search = mu_bfs(&problem)?;
                        (
                            exhaustive.value,
                            exhaustive.witness[0],
                            exhaustive.witness[1],
                            exhaustive.value == search.value,
                        )
                    }
                };
                if !check_witness(pr, d1, d2, j1, j2) {
                    return Err(SweepError::Internal(format!(
                        "solver witness failed revalidation at p={pv}, d=({d1},{d2})"
                    )));
                }
                rows.push(ConjectureRow {
                    p: pv,
                    d1,
                    d2,
                    mu,
                    bound,
                    ok: mu <= bound && solvers_agree,
                    j1,
                    j2,
                    method: solver,
                });
            }
        }
        Ok(rows)
    })?;

    let violations = rows.iter().filter(|r| !r.ok).count() as u64;
    let max_mu_ratio = rows.iter().map(|r| Ratio::new(r.mu, r.bound)).max();
    let summary = SweepSummary {
        rows_checked: rows.len() as u64,
        violations,
        fallbacks: None,
        max_mu_ratio,
        equality_count: None,
        branch_counts: None,
        elapsed: start.elapsed(),
    };
    Ok((rows, summary))
}

const ALL_COEFFS_MAX_P: u64 = 31;

/// Checks the divisibility bound `theta_valuation(S_p(F)) >= mu_p(d1, d2)`
/// for binomials `F = a x^d1 + b x^d2`, with exact cyclotomic arithmetic.
///
/// Coefficient coverage is controlled by `policy`; [`CoeffPolicy::All`] is
/// quadratic in `p` and therefore capped at `p_hi <= 31`. An infinite
/// valuation (the sum is zero) satisfies the bound vacuously. The summary's
/// `equality_count` reports how many rows attain the bound exactly.
pub fn sweep_theorem1(
    p_lo: u64,
    p_hi: u64,
    policy: CoeffPolicy,
    config: &SweepConfig,
) -> Result<(Vec<Theorem1Row>, SweepSummary), SweepError> {
    validate_range(p_lo, p_hi)?;
    if policy == CoeffPolicy::All && p_hi > ALL_COEFFS_MAX_P {
        return Err(SweepError::AllCoeffsTooLarge { hi: p_hi, max: ALL_COEFFS_MAX_P });
    }
    let primes = primes_in_range(p_lo, p_hi);
    let estimated: u64 = primes
        .iter()
        .map(|p| {
            let pv = p.value();
            let coeff_pairs = match policy {
                CoeffPolicy::All => (pv - 1) * (pv - 1),
                CoeffPolicy::Diagonal => 1,
            };
            // per (a, b): p evaluations plus the quadratic basis transform
            let per_coeff_pair = 2 * (pv - 1) * (pv - 1) + 2 * pv;
            degree_pairs(pv)
                .saturating_mul(coeff_pairs.saturating_mul(per_coeff_pair) + 2 * (pv - 1))
        })
        .sum();
    check_budget(estimated, config)?;

    let start = Instant::now();
    let rows = run_per_prime(&primes, config.threads, |pr| {
        let pv = pr.value();
        let mut rows = Vec::new();
        for d1 in 1..=(pv - 2) {
            for d2 in (d1 + 1)..=(pv - 2) {
                let mu = mu_bfs(&MuProblem::new(pr, vec![d1, d2])?)?.value;
                let coeff_pairs: Vec<(u64, u64)> = match policy {
                    CoeffPolicy::All => (1..pv)
                        .flat_map(|a| (1..pv).map(move |b| (a, b)))
                        .collect(),
                    CoeffPolicy::Diagonal => vec![(1, 1)],
                };
                for (a, b) in coeff_pairs {
                    let f = SparsePoly::new(pr, [(a, d1), (b, d2)]).map_err(|e| {
                        SweepError::Internal(format!(
                            "binomial construction at p={pv}: {e}"
                        ))
                    })?;
                    let nu_theta = f.sum_valuation();
                    rows.push(Theorem1Row {
                        p: pv,
                        d1,
                        d2,
                        a,
                        b,
                        nu_theta,
                        mu,
                        ok: nu_theta.at_least(mu),
                    });
                }
            }
        }
        Ok(rows)
    })?;

    let violations = rows.iter().filter(|r| !r.ok).count() as u64;
    let equality_count =
        rows.iter().filter(|r| r.nu_theta == Valuation::Finite(r.mu)).count() as u64;
    let summary = SweepSummary {
        rows_checked: rows.len() as u64,
        violations,
        fallbacks: None,
        max_mu_ratio: None,
        equality_count: Some(equality_count),
        branch_counts: None,
        elapsed: start.elapsed(),
    };
    Ok((rows, summary))
}

/// Runs the constructive witness procedure on every degree pair of every
/// prime in range, recording the branch taken and whether the result stayed
/// under `(p-1)/2`.
pub fn sweep_witness(
    p_lo: u64,
    p_hi: u64,
    config: &SweepConfig,
) -> Result<(Vec<WitnessRow>, SweepSummary), SweepError> {
    validate_range(p_lo, p_hi)?;
    let primes = primes_in_range(p_lo, p_hi);
    let estimated: u64 =
        primes.iter().map(|p| degree_pairs(p.value()).saturating_mul(16)).sum();
    check_budget(estimated, config)?;

    let start = Instant::now();
    let rows = run_per_prime(&primes, config.threads, |pr| {
        let pv = pr.value();
        let half = pr.half();
        let mut rows = Vec::with_capacity(degree_pairs(pv) as usize);
        for d1 in 1..=(pv - 2) {
            for d2 in (d1 + 1)..=(pv - 2) {
                let w = constructive_witness(pr, d1, d2)?;
                let congruent = check_witness(pr, d1, d2, w.i, w.j);
                rows.push(WitnessRow {
                    p: pv,
                    d1,
                    d2,
                    i: w.i,
                    j: w.j,
                    branch: w.branch,
                    doublings: w.doublings,
                    reflected: w.reflected,
                    fallback: w.fallback,
                    sum_ok: congruent && w.sum() <= half,
                });
            }
        }
        Ok(rows)
    })?;

    let violations = rows.iter().filter(|r| !r.sum_ok).count() as u64;
    let fallbacks = rows.iter().filter(|r| r.fallback).count() as u64;
    let mut branch_counts = BranchCounts::default();
    for row in &rows {
        match row.branch {
            Branch::GcdD1 => branch_counts.gcd_d1 += 1,
            Branch::GcdD2 => branch_counts.gcd_d2 += 1,
            Branch::Doubling => branch_counts.doubling += 1,
        }
    }
    let summary = SweepSummary {
        rows_checked: rows.len() as u64,
        violations,
        fallbacks: Some(fallbacks),
        max_mu_ratio: None,
        equality_count: None,
        branch_counts: Some(branch_counts),
        elapsed: start.elapsed(),
    };
    Ok((rows, summary))
}

/// A report row that knows its CSV form. JSON comes from `Serialize`, with
/// identical field names.
pub trait ReportRow: Serialize {
    fn csv_header() -> &'static str;
    fn csv_line(&self) -> String;
}

impl ReportRow for ConjectureRow {
    fn csv_header() -> &'static str {
        "p,d1,d2,mu,bound,ok,j1,j2,method"
    }

    fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.p, self.d1, self.d2, self.mu, self.bound, self.ok, self.j1, self.j2,
            self.method
        )
    }
}

impl ReportRow for Theorem1Row {
    fn csv_header() -> &'static str {
        "p,d1,d2,a,b,nu_theta,mu,ok"
    }

    fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.p, self.d1, self.d2, self.a, self.b, self.nu_theta, self.mu, self.ok
        )
    }
}

impl ReportRow for WitnessRow {
    fn csv_header() -> &'static str {
        "p,d1,d2,i,j,branch,doublings,reflected,fallback,sum_ok"
    }

    fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.p,
            self.d1,
            self.d2,
            self.i,
            self.j,
            self.branch,
            self.doublings,
            self.reflected,
            self.fallback,
            self.sum_ok
        )
    }
}

/// Writes rows as CSV: mandatory header, UTF-8, LF line endings.
pub fn write_csv<R: ReportRow>(mut out: impl Write, rows: &[R]) -> io::Result<()> {
    writeln!(out, "{}", R::csv_header())?;
    for row in rows {
        writeln!(out, "{}", row.csv_line())?;
    }
    Ok(())
}

/// Writes rows as JSON Lines: one object per row, then a final
/// `{"summary": ...}` object.
pub fn write_jsonl<R: ReportRow>(
    mut out: impl Write,
    rows: &[R],
    summary: &SweepSummary,
) -> io::Result<()> {
    for row in rows {
        serde_json::to_writer(&mut out, row)?;
        out.write_all(b"\n")?;
    }
    serde_json::to_writer(&mut out, &serde_json::json!({ "summary": summary }))?;
    out.write_all(b"\n")?;
    Ok(())
}
