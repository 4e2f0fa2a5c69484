//! Arbitrary-precision numerics backing verification.

pub mod constants;
pub mod gamma;
pub mod real;

pub use constants::{euler_gamma_value, ln2, pi, zeta, NumConst, GUARD_BITS};
pub use real::Real;
