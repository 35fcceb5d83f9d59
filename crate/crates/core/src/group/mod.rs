//! Describable discrete groups: finitely generated abelian atoms, finite
//! multiplication tables, semidirect products `ℤ^r ⋊ H`, and construction
//! trees built from extensions and increasing unions.

mod abelian;
mod description;
mod finite;
mod lattice;
mod semidirect;
mod series;

pub use abelian::{AbelianElement, FGAbelianGroup};
pub use description::{
    DeclaredTag, DeclaredTags, GroupDescription, GroupNode, GroupProperty, HirschLength,
    IncreasingUnion, UnionLimit,
};
pub use finite::FiniteGroupTable;
pub use lattice::IntMatrix;
pub use semidirect::{SemidirectElement, SemidirectProductGroup, TranslationCenter};
pub use series::{normalize_normal_series, NormalSeries, SeriesLabel};

use std::fmt::Debug;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid torsion factors: {0}")]
    TorsionFactors(String),
    #[error("invalid multiplication table: {0}")]
    Table(String),
    #[error("invalid action: {0}")]
    Action(String),
    #[error("invalid description: {0}")]
    Description(String),
    #[error("unsupported description: {0}")]
    Unsupported(String),
    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),
}

/// Group law on a concrete element representation.
///
/// Elements passed to `op`/`inverse` are assumed to satisfy `check`.
pub trait GroupLaw {
    type Elem: Clone + Ord + Debug;

    fn identity(&self) -> Self::Elem;
    fn op(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inverse(&self, a: &Self::Elem) -> Self::Elem;
    /// Shape/range validation of an element against this group.
    fn check(&self, a: &Self::Elem) -> Result<(), GroupError>;

    /// `g x g⁻¹`
    fn conjugate(&self, g: &Self::Elem, x: &Self::Elem) -> Self::Elem {
        self.op(&self.op(g, x), &self.inverse(g))
    }

    fn is_identity(&self, a: &Self::Elem) -> bool {
        *a == self.identity()
    }
}
