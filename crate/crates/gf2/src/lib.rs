//! Exact linear algebra over GF(2), plain and equivariant.
//!
//! Two layers live here. The first is a dense bit-packed matrix type with
//! rank / kernel / solve (`bitmat`). The second is sparse linear algebra over
//! the group algebra 𝔽₂[Σₖ] of a symmetric group: permutation tables,
//! group-ring vectors and matrices, and a Gauss solver that eliminates on
//! single-permutation pivots and descends to smaller symmetric groups when it
//! runs out of them (`solve`).

pub mod bitmat;
pub mod gr;
pub mod perm;
pub mod solve;

pub use bitmat::{Gf2Matrix, Gf2Vec};
pub use gr::{GrElem, GrVector, GroupRingMatrix};
pub use perm::{Perm, PermTables};
pub use solve::{equivariant_solve, expand_scalars, expand_vector, SolveOutcome};

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum Gf2Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("group order parameter {0} out of range 1..=9")]
    BadGroupOrder(usize),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("malformed input: {0}")]
    Malformed(String),
}
