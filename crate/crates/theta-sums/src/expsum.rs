//! Sparse polynomials over `F_p` without constant term, and their
//! exponential sums `S_p(F) = sum_(x in F_p) xi^(F(x))` as exact cyclotomic
//! integers.

use num_bigint::BigInt;
use thiserror::Error;

use crate::cyclotomic::{CycInt, Valuation};
use crate::modarith::{mod_mul, mod_pow, Prime};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExpSumError {
    #[error("coefficient {coeff} outside [1, {max}] for p = {p}")]
    CoeffOutOfRange { coeff: u64, max: u64, p: u64 },
    #[error("exponent {exponent} outside [1, {max}] for p = {p}")]
    ExponentOutOfRange { exponent: u64, max: u64, p: u64 },
    #[error("exponent {exponent} appears more than once")]
    DuplicateExponent { exponent: u64 },
    #[error("polynomial needs at least one term")]
    Empty,
}

/// One monomial `coeff * x^exponent`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Term {
    pub coeff: u64,
    pub exponent: u64,
}

/// `F(x) = sum_i a_i x^(d_i)` with `a_i in [1, p-1]`, pairwise distinct
/// `d_i in [1, p-2]`, terms kept sorted by exponent.
///
/// No constant term: adding one only multiplies the exponential sum by a
/// root of unity, so it is excluded at the type level. The exponent cap
/// `p - 2` keeps `x -> x^d` from degenerating (Fermat: `x^(p-1) = 1`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparsePoly {
    p: Prime,
    terms: Vec<Term>,
}

impl SparsePoly {
    pub fn new(
        p: Prime,
        terms: impl IntoIterator<Item = (u64, u64)>,
    ) -> Result<Self, ExpSumError> {
        let pv = p.value();
        let mut out: Vec<Term> = Vec::new();
        for (coeff, exponent) in terms {
            if coeff == 0 || coeff > pv - 1 {
                return Err(ExpSumError::CoeffOutOfRange { coeff, max: pv - 1, p: pv });
            }
            if exponent == 0 || exponent > pv - 2 {
                return Err(ExpSumError::ExponentOutOfRange {
                    exponent,
                    max: pv - 2,
                    p: pv,
                });
            }
            if out.iter().any(|t| t.exponent == exponent) {
                return Err(ExpSumError::DuplicateExponent { exponent });
            }
            out.push(Term { coeff, exponent });
        }
        if out.is_empty() {
            return Err(ExpSumError::Empty);
        }
        out.sort_by_key(|t| t.exponent);
        Ok(SparsePoly { p, terms: out })
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// The exponent list `(d_1, ..., d_N)`, ascending.
    pub fn degrees(&self) -> Vec<u64> {
        self.terms.iter().map(|t| t.exponent).collect()
    }

    /// `F(x)` for `x in [0, p-1]`.
    pub fn eval(&self, x: u64) -> u64 {
        let p = self.p.value();
        let mut acc = 0u64;
        for t in &self.terms {
            acc = (acc + mod_mul(t.coeff, mod_pow(x, t.exponent, p), p)) % p;
        }
        acc
    }

    /// The exponential sum `S_p(F) = sum_(x=0..p-1) xi^(F(x))`, exactly.
    ///
    /// Tallies how often each residue occurs as `F(x)`, then converts the
    /// tally to basis coefficients in one step: a hit on residue `p - 1`
    /// contributes `-(1 + xi + ... + xi^(p-2))`.
    pub fn exp_sum(&self) -> CycInt {
        let p = self.p.value();
        let mut counts = vec![0u64; p as usize];
        for x in 0..p {
            counts[self.eval(x) as usize] += 1;
        }
        debug_assert_eq!(counts.iter().sum::<u64>(), p);
        let top = counts[(p - 1) as usize] as i64;
        let coeffs = counts[..(p - 1) as usize]
            .iter()
            .map(|&c| BigInt::from(c as i64 - top))
            .collect();
        CycInt::from_coeffs(self.p, coeffs)
    }

    /// `theta_valuation(exp_sum(F))`.
    pub fn sum_valuation(&self) -> Valuation {
        self.exp_sum().theta_valuation()
    }

    /// The twist `F(cx)`: each `a_i` becomes `a_i * c^(d_i) mod p`.
    ///
    /// For `c` in `[1, p-1]` this permutes `F_p`, so the exponential sum is
    /// unchanged; the valuation is therefore an invariant of the degree
    /// tuple and the coefficient orbit, not of one particular `F`.
    pub fn twist(&self, c: u64) -> SparsePoly {
        let p = self.p.value();
        assert!(c >= 1 && c < p, "twist scalar must be a unit: got {c} for p = {p}");
        let terms = self
            .terms
            .iter()
            .map(|t| Term {
                coeff: mod_mul(t.coeff, mod_pow(c, t.exponent, p), p),
                exponent: t.exponent,
            })
            .collect();
        SparsePoly { p: self.p, terms }
    }
}
