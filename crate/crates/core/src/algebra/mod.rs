//! Exact arithmetic in `ℂ[G]` and `M_k(ℂ[N])`.

mod element;
mod matrix;

pub use element::{GroupAlgebra, GroupAlgebraElement, Term};
pub use matrix::MatrixOverGroupAlgebra;

use thiserror::Error;

use crate::group::GroupError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("operand does not belong to this group algebra: {0}")]
    MixedGroup(#[source] GroupError),
    #[error("matrix size mismatch: {0} vs {1}")]
    Size(usize, usize),
}
