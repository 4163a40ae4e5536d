//! Fox-Neuwirth trees for configuration spaces of ℝ³ and the truncated
//! multicomplex structure on their mod-2 chain complexes.
//!
//! A tree is a permutation of {1..n} together with n−1 depth indices in
//! {0,1,2}; it indexes one cell of a CW model of the configuration space of
//! n points. Chains are mod-2 sets of trees. On top of the trees live the
//! cosimplicial poset maps, the Fox polynomial engine that encodes how
//! spectator points distribute when a point is doubled, and the four
//! differentials D₀..D₃ satisfying Σ_{i+j=k} DᵢDⱼ = 0 for k ≤ 3.

pub mod chain;
pub mod cosimp;
pub mod diff;
pub mod eqmat;
pub mod eval;
pub mod m2;
pub mod poly;
pub mod poset;
pub mod tree;
pub mod verify;

pub use chain::FnChain;
pub use cosimp::{coface, coface_multi, codegeneracy, shift_union};
pub use diff::{d0, d1, d1_at, d2, d2_at, d3, d3_at, d_multiset, DiffIndex};
pub use poset::poset_leq;
pub use tree::{enumerate_depth_vectors, enumerate_trees, trinomial, DepthVector, FnTree};

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FoxError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("point counts differ: {0} vs {1}")]
    PointMismatch(usize, usize),
    #[error("too many points: {0} (limit {max})", max = tree::MAX_POINTS)]
    TooManyPoints(usize),
    #[error("index {0} out of range for {1} points")]
    IndexOutOfRange(usize, usize),
    #[error("relabeling map is not injective")]
    NonInjective,
    #[error("monomial violates condition {0}: {1}")]
    InvalidMonomial(u8, String),
    #[error("assignment support overlaps monomial or another cloud: label {0}")]
    SupportOverlap(u16),
    #[error("variable {0} missing from monomial")]
    MissingVariable(String),
    #[error("{0}")]
    Invalid(String),
}
