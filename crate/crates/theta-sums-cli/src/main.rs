//! Command-line front end for the `theta-sums` library.
//!
//! Single computations (`mu`, `witness`, `expsum`) print one result to
//! standard output, optionally as JSON. Range verification (`sweep`) writes
//! a CSV or JSON-lines report to `--out` and a one-line summary to standard
//! output. `selftest` runs the embedded fixtures end to end.
//!
//! Exit codes: 0 success, 1 usage or parse error, 2 sweep completed but
//! found violations, 3 internal invariant failure.

mod poly;

use std::fs::File;
use std::io::{BufWriter, Write as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use poly::{parse_poly, poly_to_text};
use theta_sums::campaign::{
    self, CoeffPolicy, ReportRow, SolverChoice, SweepConfig, SweepError, SweepSummary,
};
use theta_sums::{
    check_witness, constructive_witness, mu_bfs, mu_brute, CycInt, MuProblem, Prime,
    SolverError, SparsePoly, Valuation, WitnessError,
};

const EXIT_OK: u8 = 0;
const EXIT_USAGE: u8 = 1;
const EXIT_VIOLATIONS: u8 = 2;
const EXIT_INTERNAL: u8 = 3;

#[derive(Parser)]
#[command(
    name = "theta-sums",
    version,
    about = "Exact divisibility checks for exponential sums over prime fields"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Minimal total weight of a nonzero solution of d1*j1 + .. + dN*jN = 0 mod p-1
    Mu {
        /// Prime modulus, at least 5
        #[arg(long)]
        p: u64,
        /// Comma-separated degree list, each in [1, p-2]
        #[arg(long, value_delimiter = ',', required = true)]
        degrees: Vec<u64>,
        /// Solver: bfs scales to large p, brute is the oracle, both cross-checks
        #[arg(long, value_enum, default_value_t = MethodArg::Bfs)]
        method: MethodArg,
        /// Emit one JSON object instead of the human-readable line
        #[arg(long)]
        json: bool,
    },
    /// Construct a small witness pair for two distinct degrees
    Witness {
        /// Prime modulus, at least 5
        #[arg(long)]
        p: u64,
        /// First degree, in [1, p-2]
        #[arg(long)]
        d1: u64,
        /// Second degree, in [1, p-2], distinct from d1
        #[arg(long)]
        d2: u64,
        /// Emit one JSON object instead of the human-readable line
        #[arg(long)]
        json: bool,
    },
    /// Exponential sum of a polynomial: coefficients and valuations
    Expsum {
        /// Prime modulus, at least 5
        #[arg(long)]
        p: u64,
        /// Polynomial over F_p, e.g. "2*x^3 + 3*x^7"
        #[arg(long)]
        poly: String,
        /// Emit one JSON object instead of the human-readable lines
        #[arg(long)]
        json: bool,
    },
    /// Check a claim over every prime in a range, writing a report file
    Sweep {
        /// Which claim to check
        #[arg(value_enum)]
        kind: SweepKind,
        /// Smallest prime to include, at least 5
        #[arg(long)]
        pmin: u64,
        /// Largest prime to include
        #[arg(long)]
        pmax: u64,
        /// Solver for conjecture sweeps (ignored by the other kinds)
        #[arg(long, value_enum, default_value_t = MethodArg::Bfs)]
        method: MethodArg,
        /// Coefficient policy for theorem1 sweeps (ignored by the other kinds)
        #[arg(long, value_enum, default_value_t = CoeffsArg::All)]
        coeffs: CoeffsArg,
        /// Worker threads; 0 means machine parallelism.
        /// The THETA_SUMS_THREADS environment variable overrides this flag.
        #[arg(long, default_value_t = 0)]
        threads: usize,
        /// Report format
        #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
        format: FormatArg,
        /// Report file path
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the embedded fixtures end to end; exits 3 on any failure
    Selftest,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Bfs,
    Brute,
    Both,
}

impl MethodArg {
    fn as_str(self) -> &'static str {
        match self {
            MethodArg::Bfs => "bfs",
            MethodArg::Brute => "brute",
            MethodArg::Both => "both",
        }
    }
}

impl From<MethodArg> for SolverChoice {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Bfs => SolverChoice::Bfs,
            MethodArg::Brute => SolverChoice::Brute,
            MethodArg::Both => SolverChoice::Both,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SweepKind {
    Conjecture,
    Theorem1,
    Witness,
}

impl SweepKind {
    fn as_str(self) -> &'static str {
        match self {
            SweepKind::Conjecture => "conjecture",
            SweepKind::Theorem1 => "theorem1",
            SweepKind::Witness => "witness",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CoeffsArg {
    All,
    Diag,
}

impl From<CoeffsArg> for CoeffPolicy {
    fn from(c: CoeffsArg) -> Self {
        match c {
            CoeffsArg::All => CoeffPolicy::All,
            CoeffsArg::Diag => CoeffPolicy::Diagonal,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Jsonl,
}

/// A diagnostic bound for standard error, plus the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl ToString) -> Self {
        Failure { code: EXIT_USAGE, message: message.to_string() }
    }

    fn internal(message: impl ToString) -> Self {
        Failure { code: EXIT_INTERNAL, message: message.to_string() }
    }
}

fn solver_failure(e: SolverError) -> Failure {
    match e {
        SolverError::SelfCheckFailed { .. } => Failure::internal(e),
        _ => Failure::usage(e),
    }
}

fn witness_failure(e: WitnessError) -> Failure {
    match e {
        WitnessError::Solver(inner) => solver_failure(inner),
        _ => Failure::usage(e),
    }
}

fn sweep_failure(e: SweepError) -> Failure {
    match e {
        SweepError::Solver(inner) => solver_failure(inner),
        SweepError::Witness(inner) => witness_failure(inner),
        SweepError::Internal(_) => Failure::internal(e),
        _ => Failure::usage(e),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version land here too; only real errors exit 1
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    let result = match cli.command {
        Command::Mu { p, degrees, method, json } => cmd_mu(p, degrees, method, json),
        Command::Witness { p, d1, d2, json } => cmd_witness(p, d1, d2, json),
        Command::Expsum { p, poly, json } => cmd_expsum(p, &poly, json),
        Command::Sweep { kind, pmin, pmax, method, coeffs, threads, format, out } => {
            cmd_sweep(kind, pmin, pmax, method, coeffs, threads, format, &out)
        }
        Command::Selftest => cmd_selftest(),
    };

    match result {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn cmd_mu(p: u64, degrees: Vec<u64>, method: MethodArg, json: bool) -> Result<u8, Failure> {
    let p = Prime::new(p).map_err(Failure::usage)?;
    let problem = MuProblem::new(p, degrees).map_err(solver_failure)?;
    let result = match method {
        MethodArg::Bfs => mu_bfs(&problem).map_err(solver_failure)?,
        MethodArg::Brute => mu_brute(&problem).map_err(solver_failure)?,
        MethodArg::Both => {
            let brute = mu_brute(&problem).map_err(solver_failure)?;
            let bfs = mu_bfs(&problem).map_err(solver_failure)?;
            if brute.value != bfs.value {
                return Err(Failure::internal(format!(
                    "solver disagreement at p={p}: brute-force found {}, BFS found {}",
                    brute.value, bfs.value
                )));
            }
            brute
        }
    };

    if json {
        // for two degrees, mirror the conjecture report row schema
        let object = match (problem.degrees(), result.witness.as_slice()) {
            ([d1, d2], [j1, j2]) => serde_json::json!({
                "p": p.value(),
                "d1": d1,
                "d2": d2,
                "mu": result.value,
                "bound": p.half(),
                "ok": result.value <= p.half(),
                "j1": j1,
                "j2": j2,
                "method": method.as_str(),
            }),
            _ => serde_json::json!({
                "p": p.value(),
                "degrees": problem.degrees(),
                "mu": result.value,
                "witness": result.witness,
                "method": method.as_str(),
            }),
        };
        println!("{object}");
    } else {
        let witness: Vec<String> = result.witness.iter().map(u64::to_string).collect();
        println!(
            "mu={} witness=({}) method={}",
            result.value,
            witness.join(","),
            method.as_str()
        );
    }
    Ok(EXIT_OK)
}

fn cmd_witness(p: u64, d1: u64, d2: u64, json: bool) -> Result<u8, Failure> {
    let p = Prime::new(p).map_err(Failure::usage)?;
    let w = constructive_witness(p, d1, d2).map_err(witness_failure)?;
    if !check_witness(p, d1, d2, w.i, w.j) {
        return Err(Failure::internal(format!(
            "constructed witness ({},{}) fails its congruence at p={p} d1={d1} d2={d2}",
            w.i, w.j
        )));
    }
    let sum_ok = w.sum() <= p.half();

    if json {
        println!(
            "{}",
            serde_json::json!({
                "p": p.value(),
                "d1": d1,
                "d2": d2,
                "i": w.i,
                "j": w.j,
                "branch": w.branch,
                "doublings": w.doublings,
                "reflected": w.reflected,
                "fallback": w.fallback,
                "sum_ok": sum_ok,
            })
        );
    } else {
        println!(
            "(i,j)=({},{}) branch={} reflected={} doublings={} fallback={} sum={} bound={}",
            w.i,
            w.j,
            w.branch,
            w.reflected,
            w.doublings,
            w.fallback,
            w.sum(),
            p.half()
        );
    }
    Ok(EXIT_OK)
}

fn cmd_expsum(p: u64, poly_text: &str, json: bool) -> Result<u8, Failure> {
    let p = Prime::new(p).map_err(Failure::usage)?;
    let f = parse_poly(poly_text, p).map_err(Failure::usage)?;
    let sum = f.exp_sum();
    let nu_theta = sum.theta_valuation();
    let nu_p = match nu_theta {
        Valuation::Finite(_) => {
            sum.p_adic_valuation().map_err(Failure::internal)?.to_string()
        }
        Valuation::Infinite => "inf".to_string(),
    };
    let coeffs: Vec<String> = sum.coeffs().iter().map(|c| c.to_string()).collect();

    if json {
        println!(
            "{}",
            serde_json::json!({
                "p": p.value(),
                "poly": poly_to_text(&f),
                "coeffs": coeffs,
                "nu_theta": nu_theta,
                "nu_p": nu_p,
            })
        );
    } else {
        println!("poly={}", poly_to_text(&f));
        println!("coeffs=[{}]", coeffs.join(","));
        println!("nu_theta={nu_theta} nu_p={nu_p}");
    }
    Ok(EXIT_OK)
}

/// `--threads`, unless `THETA_SUMS_THREADS` is set, which wins.
fn effective_threads(flag: usize) -> Result<usize, Failure> {
    match std::env::var("THETA_SUMS_THREADS") {
        Ok(raw) => raw.trim().parse::<usize>().map_err(|_| {
            Failure::usage(format!(
                "THETA_SUMS_THREADS must be a non-negative integer, got {raw:?}"
            ))
        }),
        Err(std::env::VarError::NotPresent) => Ok(flag),
        Err(e) => Err(Failure::usage(format!("THETA_SUMS_THREADS: {e}"))),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    kind: SweepKind,
    pmin: u64,
    pmax: u64,
    method: MethodArg,
    coeffs: CoeffsArg,
    threads: usize,
    format: FormatArg,
    out: &Path,
) -> Result<u8, Failure> {
    let threads = effective_threads(threads)?;
    let config = SweepConfig { threads, budget: campaign::DEFAULT_WORK_BUDGET };

    let summary = match kind {
        SweepKind::Conjecture => {
            let (rows, summary) =
                campaign::sweep_conjecture(pmin, pmax, method.into(), &config)
                    .map_err(sweep_failure)?;
            write_report(out, format, &rows, &summary)?;
            summary
        }
        SweepKind::Theorem1 => {
            let (rows, summary) =
                campaign::sweep_theorem1(pmin, pmax, coeffs.into(), &config)
                    .map_err(sweep_failure)?;
            write_report(out, format, &rows, &summary)?;
            summary
        }
        SweepKind::Witness => {
            let (rows, summary) =
                campaign::sweep_witness(pmin, pmax, &config).map_err(sweep_failure)?;
            write_report(out, format, &rows, &summary)?;
            summary
        }
    };

    println!("{}", summary_line(kind, &summary, out));
    if summary.violations > 0 {
        Ok(EXIT_VIOLATIONS)
    } else {
        Ok(EXIT_OK)
    }
}

fn write_report<R: ReportRow>(
    path: &Path,
    format: FormatArg,
    rows: &[R],
    summary: &SweepSummary,
) -> Result<(), Failure> {
    let file = File::create(path)
        .map_err(|e| Failure::usage(format!("cannot create {}: {e}", path.display())))?;
    let mut out = BufWriter::new(file);
    let written = match format {
        FormatArg::Csv => campaign::write_csv(&mut out, rows),
        FormatArg::Jsonl => campaign::write_jsonl(&mut out, rows, summary),
    };
    written
        .and_then(|()| out.flush())
        .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))
}

fn summary_line(kind: SweepKind, summary: &SweepSummary, out: &Path) -> String {
    let mut line = format!(
        "sweep={} rows={} violations={}",
        kind.as_str(),
        summary.rows_checked,
        summary.violations
    );
    if let Some(fallbacks) = summary.fallbacks {
        line.push_str(&format!(" fallbacks={fallbacks}"));
    }
    if let Some(ratio) = &summary.max_mu_ratio {
        line.push_str(&format!(" max_mu_ratio={ratio}"));
    }
    if let Some(equal) = summary.equality_count {
        line.push_str(&format!(" equality={equal}"));
    }
    if let Some(branches) = &summary.branch_counts {
        line.push_str(&format!(
            " branches=gcd_d1:{},gcd_d2:{},doubling:{}",
            branches.gcd_d1, branches.gcd_d2, branches.doubling
        ));
    }
    line.push_str(&format!(
        " elapsed={:.2}s out={}",
        summary.elapsed.as_secs_f64(),
        out.display()
    ));
    line
}

fn cmd_selftest() -> Result<u8, Failure> {
    type Check = fn() -> Result<Option<String>, String>;
    let checks: [(&str, Check); 6] = [
        ("witness examples", selftest_witness_examples),
        ("witness erratum replacement", selftest_erratum),
        ("minimal solutions", selftest_mu_fixtures),
        ("valuation anchors", selftest_valuation_anchors),
        ("gauss sums two ways", selftest_gauss),
        ("witness sweep 5..=499", selftest_witness_sweep),
    ];

    let mut failures = 0u32;
    for (name, run) in checks {
        match run() {
            Ok(finding) => {
                println!("ok - {name}");
                if let Some(note) = finding {
                    println!("finding - {note}");
                }
            }
            Err(why) => {
                failures += 1;
                println!("FAIL - {name}: {why}");
            }
        }
    }

    if failures > 0 {
        Err(Failure::internal(format!("selftest: {failures} check(s) failed")))
    } else {
        Ok(EXIT_OK)
    }
}

fn selftest_witness_examples() -> Result<Option<String>, String> {
    let cases = [(5u64, 2u64, 3u64, 2u64, 0u64), (11, 3, 7, 1, 1), (11, 7, 9, 3, 1)];
    for (p, d1, d2, i, j) in cases {
        let prime = Prime::new(p).map_err(|e| e.to_string())?;
        let w = constructive_witness(prime, d1, d2).map_err(|e| e.to_string())?;
        if (w.i, w.j) != (i, j) {
            return Err(format!(
                "({p},{d1},{d2}): expected (i,j)=({i},{j}), got ({},{})",
                w.i, w.j
            ));
        }
        if !check_witness(prime, d1, d2, w.i, w.j) {
            return Err(format!("({p},{d1},{d2}): witness fails its congruence"));
        }
        if w.sum() > prime.half() {
            return Err(format!(
                "({p},{d1},{d2}): sum {} exceeds bound {}",
                w.sum(),
                prime.half()
            ));
        }
    }
    Ok(None)
}

fn selftest_erratum() -> Result<Option<String>, String> {
    let p = Prime::new(7).map_err(|e| e.to_string())?;
    // (2,1) is not a witness for degrees (2,3): 2*2 + 3*1 = 7 = 1 mod 6
    if check_witness(p, 2, 3, 2, 1) {
        return Err("(2,1) wrongly accepted at (7,2,3)".into());
    }
    let w = constructive_witness(p, 2, 3).map_err(|e| e.to_string())?;
    if !check_witness(p, 2, 3, w.i, w.j) {
        return Err(format!("replacement ({},{}) fails its congruence", w.i, w.j));
    }
    if w.sum() > p.half() {
        return Err(format!(
            "replacement ({},{}) has sum {} above bound {}",
            w.i,
            w.j,
            w.sum(),
            p.half()
        ));
    }
    Ok(None)
}

fn selftest_mu_fixtures() -> Result<Option<String>, String> {
    let cases: [(u64, &[u64], u64); 5] = [
        (5, &[2, 3], 2),
        (7, &[2, 3], 2),
        (11, &[3, 7], 2),
        (11, &[7, 9], 4),
        (13, &[2], 6),
    ];
    for (p, degrees, expected) in cases {
        let prime = Prime::new(p).map_err(|e| e.to_string())?;
        let problem = MuProblem::new(prime, degrees.to_vec()).map_err(|e| e.to_string())?;
        let brute = mu_brute(&problem).map_err(|e| e.to_string())?;
        let bfs = mu_bfs(&problem).map_err(|e| e.to_string())?;
        if brute.value != expected || bfs.value != expected {
            return Err(format!(
                "p={p} degrees={degrees:?}: expected {expected}, brute {} bfs {}",
                brute.value, bfs.value
            ));
        }
    }
    // the documented answer for p=7, degrees 2,3: minimum 2 at the
    // lexicographically least witness (0,2)
    let prime = Prime::new(7).unwrap();
    let problem = MuProblem::new(prime, vec![2, 3]).unwrap();
    let r = mu_brute(&problem).map_err(|e| e.to_string())?;
    if r.witness != vec![0, 2] {
        return Err(format!("expected witness (0,2), got {:?}", r.witness));
    }
    Ok(None)
}

fn selftest_valuation_anchors() -> Result<Option<String>, String> {
    for p in [5u64, 7, 11, 13, 17] {
        let prime = Prime::new(p).map_err(|e| e.to_string())?;
        let constant_p = CycInt::constant(prime, p);
        if constant_p.theta_valuation() != Valuation::Finite(p - 1) {
            return Err(format!("valuation of the constant {p} is not {}", p - 1));
        }
        if CycInt::theta(prime).theta_valuation() != Valuation::Finite(1) {
            return Err(format!("p={p}: valuation of theta is not 1"));
        }
        if CycInt::zero(prime).theta_valuation() != Valuation::Infinite {
            return Err(format!("p={p}: valuation of 0 is not infinite"));
        }
    }
    Ok(None)
}

fn selftest_gauss() -> Result<Option<String>, String> {
    for p in [5u64, 13, 17, 29] {
        let prime = Prime::new(p).map_err(|e| e.to_string())?;
        let f = SparsePoly::new(prime, [(1, 2)]).map_err(|e| e.to_string())?;
        let sum = f.exp_sum();
        let expected = (p - 1) / 2;

        // route one: valuation of the sum, pinned to the congruence minimum
        if sum.theta_valuation() != Valuation::Finite(expected) {
            return Err(format!("p={p}: quadratic sum valuation is not {expected}"));
        }
        let problem = MuProblem::new(prime, vec![2]).map_err(|e| e.to_string())?;
        let mu = mu_bfs(&problem).map_err(|e| e.to_string())?.value;
        if mu != expected {
            return Err(format!("p={p}: congruence minimum {mu}, expected {expected}"));
        }

        // route two: exact squaring; these p are 1 mod 4, so the square is +p
        let square = sum.mul(&sum).map_err(|e| e.to_string())?;
        if square != CycInt::constant(prime, p) {
            return Err(format!("p={p}: squared sum is not the constant {p}"));
        }
    }
    Ok(None)
}

fn selftest_witness_sweep() -> Result<Option<String>, String> {
    let config = SweepConfig::default();
    let (rows, summary) =
        campaign::sweep_witness(5, 499, &config).map_err(|e| e.to_string())?;
    if summary.violations > 0 {
        return Err(format!("{} rows violate the sum bound", summary.violations));
    }
    let expected_rows = campaign::pair_row_count(5, 499);
    if summary.rows_checked != expected_rows {
        return Err(format!(
            "row count {} does not match the closed form {expected_rows}",
            summary.rows_checked
        ));
    }
    let fallbacks = summary.fallbacks.unwrap_or(0);
    Ok(Some(format!(
        "fallbacks={fallbacks} across {} witness rows (expected 0)",
        rows.len()
    )))
}
