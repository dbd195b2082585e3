//! The ring `Z[xi]` for `xi` a primitive `p`-th root of unity, and the
//! valuation attached to the prime element `theta = 1 - xi`.
//!
//! Elements are stored on the power basis `xi^0, ..., xi^(p-2)` with
//! arbitrary-precision coefficients; `xi^(p-1)` is eliminated through
//! `1 + xi + ... + xi^(p-1) = 0`. All arithmetic is exact. `theta` generates
//! the unique prime above `p`, with `theta^(p-1)` and `p` associates, so the
//! valuation `nu` here satisfies `nu(p) = p - 1`.

use std::fmt;
use std::ops::Add;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::modarith::Prime;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CyclotomicError {
    #[error("modulus mismatch: left element has p = {left}, right has p = {right}")]
    ModulusMismatch { left: u64, right: u64 },
    #[error("inexact division while peeling a theta factor; dividend was not divisible")]
    InexactDivision,
    #[error("the zero element has no finite valuation")]
    ZeroElement,
}

/// Order of vanishing at `theta`: a natural number, or infinite for zero.
///
/// `Finite(a) < Finite(b)` iff `a < b`, and every finite value is below
/// `Infinite`, matching the ultrametric convention `nu(0) = +inf`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(u64),
    Infinite,
}

impl Valuation {
    pub fn is_finite(self) -> bool {
        matches!(self, Valuation::Finite(_))
    }

    /// True when the valuation is `>= bound` (always true for `Infinite`).
    pub fn at_least(self, bound: u64) -> bool {
        match self {
            Valuation::Finite(v) => v >= bound,
            Valuation::Infinite => true,
        }
    }
}

impl Add for Valuation {
    type Output = Valuation;

    fn add(self, rhs: Valuation) -> Valuation {
        match (self, rhs) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
            _ => Valuation::Infinite,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => v.fmt(f),
            Valuation::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Valuation {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Valuation::Finite(v) => serializer.serialize_u64(*v),
            Valuation::Infinite => serializer.serialize_str("inf"),
        }
    }
}

/// An element of `Z[xi]` on the power basis, with `p - 1` coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycInt {
    p: Prime,
    coeffs: Vec<BigInt>,
}

impl CycInt {
    pub fn zero(p: Prime) -> Self {
        CycInt { p, coeffs: vec![BigInt::zero(); p.phi() as usize] }
    }

    pub fn one(p: Prime) -> Self {
        Self::constant(p, 1)
    }

    pub fn constant(p: Prime, n: impl Into<BigInt>) -> Self {
        let mut out = Self::zero(p);
        out.coeffs[0] = n.into();
        out
    }

    /// `theta = 1 - xi`, the prime element the valuation is taken at.
    pub fn theta(p: Prime) -> Self {
        let mut out = Self::constant(p, 1);
        out.coeffs[1] = BigInt::from(-1);
        out
    }

    /// `xi^e` for any integer exponent, reduced through `xi^p = 1` and the
    /// basis relation `xi^(p-1) = -(1 + xi + ... + xi^(p-2))`.
    pub fn from_exponent(p: Prime, e: i64) -> Self {
        let r = e.rem_euclid(p.value() as i64) as u64;
        let mut out = Self::zero(p);
        if r == p.phi() {
            for c in &mut out.coeffs {
                *c = BigInt::from(-1);
            }
        } else {
            out.coeffs[r as usize] = BigInt::one();
        }
        out
    }

    /// Wraps explicit basis coefficients; `coeffs.len()` must be `p - 1`.
    pub fn from_coeffs(p: Prime, coeffs: Vec<BigInt>) -> Self {
        assert_eq!(
            coeffs.len(),
            p.phi() as usize,
            "need exactly p - 1 basis coefficients"
        );
        CycInt { p, coeffs }
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Sum of the basis coefficients, i.e. the representative evaluated at
    /// `xi = 1`. Divisibility by `theta` is equivalent to `p` dividing this.
    pub fn coeff_sum(&self) -> BigInt {
        self.coeffs.iter().sum()
    }

    fn check_same_p(&self, rhs: &CycInt) -> Result<(), CyclotomicError> {
        if self.p == rhs.p {
            Ok(())
        } else {
            Err(CyclotomicError::ModulusMismatch {
                left: self.p.value(),
                right: rhs.p.value(),
            })
        }
    }

    pub fn add(&self, rhs: &CycInt) -> Result<CycInt, CyclotomicError> {
        self.check_same_p(rhs)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&rhs.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(CycInt { p: self.p, coeffs })
    }

    pub fn sub(&self, rhs: &CycInt) -> Result<CycInt, CyclotomicError> {
        self.check_same_p(rhs)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&rhs.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Ok(CycInt { p: self.p, coeffs })
    }

    pub fn neg(&self) -> CycInt {
        CycInt { p: self.p, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    /// Schoolbook product: convolve exponents modulo `p`, then fold the
    /// `xi^(p-1)` bucket back onto the basis.
    pub fn mul(&self, rhs: &CycInt) -> Result<CycInt, CyclotomicError> {
        self.check_same_p(rhs)?;
        let p = self.p.value() as usize;
        let mut acc = vec![BigInt::zero(); p];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                acc[(i + j) % p] += a * b;
            }
        }
        // xi^(p-1) = -(1 + xi + ... + xi^(p-2))
        let top = acc.pop().expect("p >= 5");
        for c in &mut acc {
            *c -= &top;
        }
        Ok(CycInt { p: self.p, coeffs: acc })
    }

    /// Rewrites the element on the basis `theta^0, ..., theta^(p-2)` by
    /// substituting `xi = 1 - theta` and expanding binomially.
    pub fn theta_expansion(&self) -> ThetaExpansion {
        ThetaExpansion { p: self.p, coeffs: signed_binomial_transform(&self.coeffs) }
    }

    /// The order of vanishing of this element at `theta`, via the expansion
    /// coefficients.
    ///
    /// Write the element as `sum_k b_k theta^k` over `k = 0..p-2`. Each
    /// nonzero term has valuation `k + (p-1) * v_p(b_k)`, because an integer
    /// `b` carries valuation `(p-1) * v_p(b)` (the prime `p` is totally
    /// ramified, `nu(p) = p - 1`). Those candidate values are pairwise
    /// distinct: they differ in their residue `k` modulo `p - 1`. A sum of
    /// terms with pairwise distinct valuations has valuation exactly the
    /// minimum, so no cancellation correction is needed.
    pub fn theta_valuation(&self) -> Valuation {
        let expansion = self.theta_expansion();
        let p = self.p.value();
        let phi = self.p.phi();
        let mut best: Option<u64> = None;
        for (k, b) in expansion.coeffs.iter().enumerate() {
            let k = k as u64;
            // Terms at index >= k have valuation >= k; once the running
            // minimum is that small, later terms cannot improve on it.
            if best.is_some_and(|v| v <= k) {
                break;
            }
            if b.is_zero() {
                continue;
            }
            let candidate = k + phi * padic_valuation_int(b, p);
            best = Some(best.map_or(candidate, |v| v.min(candidate)));
        }
        match best {
            Some(v) => Valuation::Finite(v),
            None => Valuation::Infinite,
        }
    }

    /// Independent check of [`CycInt::theta_valuation`]: repeatedly performs
    /// exact division by `theta` until the quotient is no longer divisible,
    /// and counts the steps.
    ///
    /// Division uses `theta * prod_(e=2..p-1) (1 - xi^e) = p`: multiply by
    /// the cofactor, then divide every coefficient by `p`. A remainder in
    /// that integer division means the divisibility test and the ring
    /// arithmetic disagree, which is a bug, hence an error rather than a
    /// panic.
    pub fn theta_valuation_oracle(&self) -> Result<Valuation, CyclotomicError> {
        if self.is_zero() {
            return Ok(Valuation::Infinite);
        }
        let p = self.p;
        let big_p = BigInt::from(p.value());
        let mut cofactor = CycInt::one(p);
        for e in 2..p.value() {
            let factor = CycInt::one(p).sub(&CycInt::from_exponent(p, e as i64))?;
            cofactor = cofactor.mul(&factor)?;
        }
        let mut current = self.clone();
        let mut count = 0u64;
        while !current.is_zero() && (&current.coeff_sum() % &big_p).is_zero() {
            let mut lifted = current.mul(&cofactor)?;
            for c in &mut lifted.coeffs {
                let (q, r) = c.div_rem(&big_p);
                if !r.is_zero() {
                    return Err(CyclotomicError::InexactDivision);
                }
                *c = q;
            }
            current = lifted;
            count += 1;
        }
        Ok(Valuation::Finite(count))
    }

    /// The valuation normalized so that `nu(p) = 1`, i.e.
    /// `theta_valuation / (p - 1)` as an exact rational.
    pub fn p_adic_valuation(&self) -> Result<Ratio<u64>, CyclotomicError> {
        match self.theta_valuation() {
            Valuation::Finite(v) => Ok(Ratio::new(v, self.p.phi())),
            Valuation::Infinite => Err(CyclotomicError::ZeroElement),
        }
    }
}

/// An element written on the basis `theta^0, ..., theta^(p-2)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThetaExpansion {
    p: Prime,
    coeffs: Vec<BigInt>,
}

impl ThetaExpansion {
    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Substitutes `theta = 1 - xi` back, recovering the power-basis form.
    /// The substitution in either direction is the same signed transform.
    pub fn to_cyc(&self) -> CycInt {
        CycInt { p: self.p, coeffs: signed_binomial_transform(&self.coeffs) }
    }
}

/// Given `c_0..c_(n-1)` with `f(x) = sum c_i x^i`, returns the coefficients
/// of `f(1 - y)`: `t_k = (-1)^k * sum_(i>=k) c_i * binom(i, k)`.
///
/// Binomials come from a running Pascal row, so the whole transform is
/// additions only; no factorials, no overflow anywhere.
fn signed_binomial_transform(coeffs: &[BigInt]) -> Vec<BigInt> {
    let n = coeffs.len();
    let mut out = vec![BigInt::zero(); n];
    // row holds binom(i, 0..=i) for the current i.
    let mut row: Vec<BigInt> = Vec::with_capacity(n);
    for (i, c) in coeffs.iter().enumerate() {
        if i == 0 {
            row.push(BigInt::one());
        } else {
            row.push(BigInt::one());
            for k in (1..i).rev() {
                let left = row[k - 1].clone();
                row[k] += left;
            }
        }
        if !c.is_zero() {
            for (k, b) in row.iter().enumerate() {
                out[k] += c * b;
            }
        }
    }
    for (k, t) in out.iter_mut().enumerate() {
        if k % 2 == 1 {
            *t = -&*t;
        }
    }
    out
}

/// Multiplicity of the prime `p` in the nonzero integer `b`.
fn padic_valuation_int(b: &BigInt, p: u64) -> u64 {
    debug_assert!(!b.is_zero());
    let big_p = BigInt::from(p);
    let mut rest = b.abs();
    let mut count = 0u64;
    loop {
        let (q, r) = rest.div_rem(&big_p);
        if !r.is_zero() {
            return count;
        }
        rest = q;
        count += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: u64) -> Prime {
        Prime::new(v).unwrap()
    }

    fn cyc(pv: u64, coeffs: &[i64]) -> CycInt {
        CycInt::from_coeffs(p(pv), coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    #[test]
    fn exponent_reduction() {
        assert_eq!(CycInt::from_exponent(p(5), 0), cyc(5, &[1, 0, 0, 0]));
        assert_eq!(CycInt::from_exponent(p(5), 3), cyc(5, &[0, 0, 0, 1]));
        // xi^4 falls off the basis: xi^4 = -(1 + xi + xi^2 + xi^3)
        assert_eq!(CycInt::from_exponent(p(5), 4), cyc(5, &[-1, -1, -1, -1]));
        assert_eq!(CycInt::from_exponent(p(5), 5), cyc(5, &[1, 0, 0, 0]));
        assert_eq!(CycInt::from_exponent(p(5), -1), CycInt::from_exponent(p(5), 4));
        assert_eq!(CycInt::from_exponent(p(5), -7), CycInt::from_exponent(p(5), 3));
    }

    #[test]
    fn mul_folds_top_power() {
        // xi^2 * xi^3 = xi^5 = 1
        let a = CycInt::from_exponent(p(5), 2);
        let b = CycInt::from_exponent(p(5), 3);
        assert_eq!(a.mul(&b).unwrap(), CycInt::one(p(5)));

        // (1 - xi)(1 + xi + xi^2 + xi^3) = 1 - xi^4 = 2 + xi + xi^2 + xi^3
        let theta = CycInt::theta(p(5));
        let ones = cyc(5, &[1, 1, 1, 1]);
        assert_eq!(theta.mul(&ones).unwrap(), cyc(5, &[2, 1, 1, 1]));
    }

    #[test]
    fn theta_times_all_conjugates_is_p() {
        // theta * prod_(e=2..p-1)(1 - xi^e) = p, the identity the division
        // oracle relies on.
        for pv in [5u64, 7, 11] {
            let pr = p(pv);
            let mut prod = CycInt::theta(pr);
            for e in 2..pv {
                let factor = CycInt::one(pr).sub(&CycInt::from_exponent(pr, e as i64)).unwrap();
                prod = prod.mul(&factor).unwrap();
            }
            assert_eq!(prod, CycInt::constant(pr, pv as i64));
        }
    }

    #[test]
    fn mismatched_moduli_error() {
        let a = CycInt::one(p(5));
        let b = CycInt::one(p(7));
        assert_eq!(
            a.add(&b),
            Err(CyclotomicError::ModulusMismatch { left: 5, right: 7 })
        );
        assert!(a.mul(&b).is_err());
        assert!(a.sub(&b).is_err());
    }

    #[test]
    fn expansion_fixtures() {
        // xi = 1 - theta
        let xi = CycInt::from_exponent(p(5), 1);
        assert_eq!(
            xi.theta_expansion().coeffs(),
            &[BigInt::from(1), BigInt::from(-1), BigInt::from(0), BigInt::from(0)]
        );
        // constants are fixed by the substitution
        let five = CycInt::constant(p(5), 5);
        assert_eq!(
            five.theta_expansion().coeffs(),
            &[BigInt::from(5), BigInt::from(0), BigInt::from(0), BigInt::from(0)]
        );
        // theta is its own expansion
        let theta = CycInt::theta(p(5));
        assert_eq!(
            theta.theta_expansion().coeffs(),
            &[BigInt::from(0), BigInt::from(1), BigInt::from(0), BigInt::from(0)]
        );
    }

    #[test]
    fn expansion_round_trips() {
        for pv in [5u64, 7, 13] {
            let pr = p(pv);
            for e in 0..pv as i64 {
                let x = CycInt::from_exponent(pr, e);
                assert_eq!(x.theta_expansion().to_cyc(), x);
            }
        }
        let x = cyc(7, &[4, -17, 0, 3, 25, -1]);
        assert_eq!(x.theta_expansion().to_cyc(), x);
    }

    #[test]
    fn valuation_anchors() {
        for pv in [5u64, 7, 11, 13, 17] {
            let pr = p(pv);
            assert_eq!(CycInt::zero(pr).theta_valuation(), Valuation::Infinite);
            assert_eq!(CycInt::one(pr).theta_valuation(), Valuation::Finite(0));
            assert_eq!(CycInt::theta(pr).theta_valuation(), Valuation::Finite(1));
            // p is totally ramified: nu(p) = p - 1
            assert_eq!(
                CycInt::constant(pr, pv as i64).theta_valuation(),
                Valuation::Finite(pv - 1)
            );
            // units 1 - xi^e for e coprime to p have valuation 1
            assert_eq!(
                CycInt::one(pr)
                    .sub(&CycInt::from_exponent(pr, 2))
                    .unwrap()
                    .theta_valuation(),
                Valuation::Finite(1)
            );
        }
    }

    #[test]
    fn valuation_is_additive_on_products() {
        let pr = p(7);
        let samples = [
            CycInt::theta(pr),
            CycInt::constant(pr, 7),
            CycInt::constant(pr, 14),
            cyc(7, &[1, 2, 3, 4, 5, 6]),
            CycInt::from_exponent(pr, 3),
        ];
        for a in &samples {
            for b in &samples {
                let prod = a.mul(b).unwrap();
                assert_eq!(
                    prod.theta_valuation(),
                    a.theta_valuation() + b.theta_valuation()
                );
            }
        }
    }

    #[test]
    fn oracle_agrees_on_fixtures() {
        let pr = p(5);
        let cases = [
            CycInt::zero(pr),
            CycInt::one(pr),
            CycInt::theta(pr),
            CycInt::constant(pr, 5),
            CycInt::constant(pr, 50),
            CycInt::theta(pr).mul(&CycInt::theta(pr)).unwrap(),
            cyc(5, &[-1, 0, -2, -2]),
            cyc(5, &[3, 1, 4, 1]),
        ];
        for x in &cases {
            assert_eq!(
                x.theta_valuation_oracle().unwrap(),
                x.theta_valuation(),
                "disagreement on {x:?}"
            );
        }
    }

    #[test]
    fn p_adic_normalization() {
        let pr = p(5);
        assert_eq!(
            CycInt::constant(pr, 5).p_adic_valuation().unwrap(),
            Ratio::new(1, 1)
        );
        assert_eq!(
            CycInt::theta(pr).p_adic_valuation().unwrap(),
            Ratio::new(1, 4)
        );
        assert_eq!(
            CycInt::zero(pr).p_adic_valuation(),
            Err(CyclotomicError::ZeroElement)
        );
    }

    #[test]
    fn valuation_ordering_and_display() {
        assert!(Valuation::Finite(3) < Valuation::Finite(4));
        assert!(Valuation::Finite(u64::MAX) < Valuation::Infinite);
        assert!(Valuation::Infinite.at_least(u64::MAX));
        assert!(Valuation::Finite(4).at_least(4));
        assert!(!Valuation::Finite(3).at_least(4));
        assert_eq!(Valuation::Finite(12).to_string(), "12");
        assert_eq!(Valuation::Infinite.to_string(), "inf");
        assert_eq!(serde_json::to_string(&Valuation::Finite(2)).unwrap(), "2");
        assert_eq!(serde_json::to_string(&Valuation::Infinite).unwrap(), "\"inf\"");
    }
}
