//! Exact arithmetic for exponential sums over prime fields.
//!
//! The crate is organized bottom-up:
//!
//! * [`modarith`] - primes and modular arithmetic on `u64`
//! * [`cyclotomic`] - the ring `Z[xi]` for a prime-order root of unity `xi`,
//!   with the theta-adic valuation attached to `theta = 1 - xi`
//! * [`expsum`] - sparse polynomials over `F_p` and their exponential sums
//! * [`musolver`] - minimal solutions of the degree equation
//!   `sum_i d_i * j_i = 0 (mod p-1)`
//! * [`witness`] - constructive small witnesses for two-term degree equations
//! * [`campaign`] - bulk verification sweeps over prime ranges, with CSV and
//!   JSON Lines report writers
//!
//! Everything is computed with exact integer arithmetic; there are no floats
//! and no modular shortcuts in the cyclotomic layer.

pub mod campaign;
pub mod cyclotomic;
pub mod expsum;
pub mod modarith;
pub mod musolver;
pub mod witness;

pub use cyclotomic::{CycInt, CyclotomicError, ThetaExpansion, Valuation};
pub use expsum::{ExpSumError, SparsePoly};
pub use modarith::{ModArithError, Prime};
pub use musolver::{mu_bfs, mu_brute, MuProblem, MuResult, SolverError};
pub use witness::{check_witness, constructive_witness, Branch, WitnessError, WitnessResult};
