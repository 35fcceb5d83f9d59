//! Real-rank-zero obstruction certificates for group C*-algebras of
//! describable discrete groups.
//!
//! Groups are given as trees of finitely generated abelian groups, finite
//! multiplication tables, semidirect products `ℤⁿ ⋊ H`, extensions and
//! increasing unions. The crate embeds `ℂ[G]` into matrices over `ℂ[N]` for a
//! finite-index abelian normal subgroup `N`, evaluates those matrices over the
//! dual of `N`, measures the oscillation of fiber norms, and combines the
//! result with a closure-rule engine into a certificate.

pub mod algebra;
pub mod cli;
pub mod coeff;
pub mod embedding;
pub mod engine;
pub mod group;
pub mod io;
pub mod oscillation;
pub mod stock;

/// Seed used by every randomized routine unless overridden.
pub const DEFAULT_SEED: u64 = 0x0005_eed0_f0cc;
