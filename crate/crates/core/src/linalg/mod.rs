//! Exact integer linear algebra: Smith and Hermite forms, finitely presented
//! abelian groups and their homomorphisms.

mod fpab;
mod hnf;
mod intmat;
mod snf;
mod sparse;

pub use fpab::{iso, iso_odd, AbMap, FpAb, Subgroup};
pub use hnf::hnf;
pub use intmat::{normalize_row as normalize, IntMat, SparseRow};
pub use snf::{invariant_factors, snf, SmithForm};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("relation {relation} of the source is not sent to zero")]
    NotAHomomorphism { relation: usize },
    #[error("parse error: {0}")]
    Parse(String),
}

/// Largest odd divisor of `n` (0 stays 0).
pub fn odd_part_u64(mut n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    while n.is_multiple_of(2) {
        n /= 2;
    }
    n
}
