//! Splitting-type statistics of random monic polynomials over finite fields
//! whose coefficients are drawn from structured subsets of `F_q`.

pub mod arith;
pub mod charsum;
pub mod cli;
pub mod error;
pub mod field;
pub mod poly;
pub mod report;
pub mod sets;
pub mod splitting;
pub mod stats;
pub mod verify;

pub use error::{Error, Result};
pub use field::{FieldElement, FieldSpec};
pub use poly::Poly;
pub use splitting::SplittingType;
