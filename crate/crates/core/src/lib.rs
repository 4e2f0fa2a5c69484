//! Symbolic extraction of Euler-type harmonic sum identities from
//! hypergeometric summation theorems, with high-precision numeric checks.

pub mod arith;
pub mod catalog;
pub mod corpus;
pub mod engine;
pub mod error;
pub mod harmonic;
pub mod numeric;
pub mod poly;
pub mod series;
pub mod theorem;
pub mod verify;
pub mod zeta;

pub use error::{Error, Result};
