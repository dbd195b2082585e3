//! Primes and modular arithmetic on `u64`.
//!
//! Everything downstream works with odd primes `p >= 5`; the [`Prime`] newtype
//! makes that precondition unforgeable. Arithmetic helpers widen to `u128`
//! internally, so they are exact for all `u64` inputs.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModArithError {
    #[error("{0} is not a prime >= 5")]
    NotPrime(u64),
    #[error("{a} is not invertible modulo {modulus}")]
    NotInvertible { a: u64, modulus: u64 },
}

/// A validated prime `p >= 5`.
///
/// Primes 2 and 3 are excluded: the degree ranges `[1, p-2]` and the bound
/// `(p-1)/2` used downstream are empty or degenerate below 5.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Prime(u64);

impl Prime {
    pub fn new(value: u64) -> Result<Self, ModArithError> {
        if value >= 5 && is_prime(value) {
            Ok(Prime(value))
        } else {
            Err(ModArithError::NotPrime(value))
        }
    }

    pub fn value(self) -> u64 {
        self.0
    }

    /// `p - 1`, the modulus of the degree equation and the degree of the
    /// cyclotomic extension.
    pub fn phi(self) -> u64 {
        self.0 - 1
    }

    /// `(p - 1) / 2`, the target ceiling for minimal witnesses.
    pub fn half(self) -> u64 {
        (self.0 - 1) / 2
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Deterministic trial division; fine for the `u64` range this crate sweeps.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    if n % 3 == 0 {
        return n == 3;
    }
    let mut d = 5u64;
    while d * d <= n {
        if n % d == 0 || n % (d + 2) == 0 {
            return false;
        }
        d += 6;
    }
    true
}

/// All primes `p` with `lo <= p <= hi` and `p >= 5`, ascending.
pub fn primes_in_range(lo: u64, hi: u64) -> Vec<Prime> {
    (lo.max(5)..=hi).filter(|&n| is_prime(n)).map(Prime).collect()
}

pub fn gcd(a: u64, b: u64) -> u64 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn mod_mul(a: u64, b: u64, modulus: u64) -> u64 {
    debug_assert!(modulus > 0);
    ((a as u128 * b as u128) % modulus as u128) as u64
}

pub fn mod_pow(base: u64, exp: u64, modulus: u64) -> u64 {
    debug_assert!(modulus > 0);
    if modulus == 1 {
        return 0;
    }
    let mut acc = 1u64;
    let mut base = base % modulus;
    let mut exp = exp;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mod_mul(acc, base, modulus);
        }
        base = mod_mul(base, base, modulus);
        exp >>= 1;
    }
    acc
}

/// The inverse of `a` modulo `modulus`, in `[1, modulus-1]`.
///
/// Errors when `gcd(a, modulus) > 1`; the modulus here is usually `p - 1`,
/// which is composite, so non-invertible inputs are an expected case and not
/// a panic.
pub fn mod_inverse(a: u64, modulus: u64) -> Result<u64, ModArithError> {
    debug_assert!(modulus >= 2);
    let a_red = a % modulus;
    // Extended Euclid on (modulus, a): old_r tracks the gcd, old_t the
    // Bezout coefficient of a.
    let (mut old_r, mut r) = (modulus as i128, a_red as i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r != 1 {
        return Err(ModArithError::NotInvertible { a, modulus });
    }
    Ok(old_t.rem_euclid(modulus as i128) as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_rejects_small_and_composite() {
        for bad in [0, 1, 2, 3, 4, 6, 9, 15, 25, 91, 1_000_000] {
            assert_eq!(Prime::new(bad), Err(ModArithError::NotPrime(bad)), "{bad}");
        }
        for good in [5, 7, 11, 499, 999_983] {
            assert_eq!(Prime::new(good).unwrap().value(), good);
        }
    }

    #[test]
    fn primes_in_range_matches_sieve() {
        // Independent oracle: sieve of Eratosthenes up to 100.
        let mut sieve = vec![true; 101];
        sieve[0] = false;
        sieve[1] = false;
        for i in 2..=100usize {
            if sieve[i] {
                for j in (i * i..=100).step_by(i) {
                    sieve[j] = false;
                }
            }
        }
        let expected: Vec<u64> =
            (5..=100).filter(|&n| sieve[n as usize]).collect();
        assert_eq!(expected.len(), 23);
        let got: Vec<u64> = primes_in_range(5, 100).iter().map(|p| p.value()).collect();
        assert_eq!(got, expected);
        // The floor at 5 applies no matter how low the range starts.
        assert_eq!(primes_in_range(0, 100), primes_in_range(5, 100));
        assert!(primes_in_range(24, 28).is_empty());
    }

    #[test]
    fn gcd_basics() {
        assert_eq!(gcd(12, 18), 6);
        assert_eq!(gcd(7, 10), 1);
        assert_eq!(gcd(0, 5), 5);
        assert_eq!(gcd(5, 0), 5);
        assert_eq!(gcd(2, 4), 2);
        assert_eq!(gcd(9, 10), 1);
    }

    #[test]
    fn mod_inverse_known_values() {
        assert_eq!(mod_inverse(9, 10), Ok(9));
        assert_eq!(mod_inverse(7, 10), Ok(3));
        assert_eq!(mod_inverse(1, 12), Ok(1));
        assert_eq!(mod_inverse(3, 10), Ok(7));
        assert_eq!(
            mod_inverse(4, 10),
            Err(ModArithError::NotInvertible { a: 4, modulus: 10 })
        );
        assert_eq!(
            mod_inverse(0, 7),
            Err(ModArithError::NotInvertible { a: 0, modulus: 7 })
        );
        // Reduction happens before inversion.
        assert_eq!(mod_inverse(19, 10), Ok(9));
    }

    #[test]
    fn mod_inverse_is_total_on_units() {
        for m in 2..200u64 {
            for a in 1..m {
                match mod_inverse(a, m) {
                    Ok(inv) => {
                        assert_eq!(gcd(a, m), 1);
                        assert!((1..m).contains(&inv));
                        assert_eq!(mod_mul(a, inv, m), 1 % m);
                    }
                    Err(_) => assert_ne!(gcd(a, m), 1),
                }
            }
        }
    }

    #[test]
    fn mod_pow_matches_naive() {
        for m in [5u64, 6, 97, 1_000_003] {
            for base in [0u64, 1, 2, 3, m - 1, m + 7] {
                let mut naive = 1 % m;
                for exp in 0..40u64 {
                    assert_eq!(mod_pow(base, exp, m), naive, "base {base} exp {exp} mod {m}");
                    naive = mod_mul(naive, base % m, m);
                }
            }
        }
    }

    #[test]
    fn mod_mul_no_overflow_near_u64_max() {
        let m = u64::MAX - 58; // large odd modulus
        let a = m - 1;
        assert_eq!(mod_mul(a, a, m), 1);
    }
}
