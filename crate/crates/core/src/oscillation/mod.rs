//! Fiber evaluation over Pontryagin duals of finitely generated abelian
//! groups and the oscillation invariant
//!
//! `ω(a) = sup over components Y of sup_{x,y ∈ Y} | ‖π_x(a)‖ − ‖π_y(a)‖ |`.
//!
//! The dual of `ℤ^r ⊕ ⨁ ℤ/nᵢ` is a disjoint union of `∏ nᵢ` tori `𝕋^r`, one per
//! torsion character. Two evaluation routes exist: a closed form for
//! `diag(β(d₁), …, β(d_k))` and grid sampling with local refinement for
//! everything else. Sampled values are lower brackets of the suprema.

mod audit;
mod bracket;
mod dual;
mod exact;
mod fiber;
mod sampled;
mod surface;

pub use audit::{
    finite_spectrum_zero_oscillation_audit, lipschitz_audit, ConjugatedDiagonalField,
    LipschitzAudit, ZeroOscillationAudit,
};
pub use bracket::{finite_spectrum_distance_bracket, DistanceBracket};
pub use dual::{character_value, DEFAULT_COMPONENTS_CAP, Character, ComponentSelection, DualDescription};
pub use exact::{oscillation_exact, oscillation_exact_beta_diagonal, recognize_beta_diagonal, BetaDiagonal};
pub use fiber::{evaluate_fiber, spectral_norm, CompiledMatrix, FiberMatrix};
pub use sampled::{oscillation_sampled, oscillation_sampled_with_surface, sample_field, NormMode, SampleRun, SamplingConfig};
pub use surface::{format_sig12, write_surface_csv, SurfacePoint};

use serde::Serialize;
use thiserror::Error;

use crate::group::GroupError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OscillationError {
    #[error("shape mismatch: {0}")]
    Shape(#[from] GroupError),
    #[error("fiber evaluation needs an abelian normal subgroup: {0}")]
    NonAbelian(String),
    #[error("non-finite matrix entry")]
    NonFinite,
    #[error("element is not self-adjoint; request singular-value mode explicitly")]
    NotSelfAdjoint,
    #[error("input is not of the form diag(β(d₁), …, β(d_k)); use the sampled path")]
    NotBetaDiagonal,
    #[error("{count} components exceed the cap of {cap}; enumerate or sample components")]
    TooManyComponents { count: u128, cap: usize },
    #[error("invalid sampling configuration: {0}")]
    Config(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimateMethod {
    ExactDiagonal,
    Sampled,
    /// `r = 0`: every component is a point.
    ZeroDimensional,
}

/// Extremes of the fiber norm on one connected component.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComponentExtrema {
    pub component: Vec<u64>,
    pub max_norm: f64,
    pub min_norm: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub argmax: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub argmin: Option<Vec<f64>>,
}

/// Sampling parameters actually used for an estimate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridSpec {
    pub grid: usize,
    pub points_per_axis: usize,
    pub refine: usize,
    pub zoom: usize,
    pub refinement_skipped: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OscillationEstimate {
    pub method: EstimateMethod,
    pub omega_lower: f64,
    pub omega_upper: f64,
    pub per_component: Vec<ComponentExtrema>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    pub components_total: u128,
    pub component_sampled: bool,
    pub evaluations: u64,
}

impl OscillationEstimate {
    pub fn is_exact(&self) -> bool {
        matches!(self.method, EstimateMethod::ExactDiagonal | EstimateMethod::ZeroDimensional)
    }
}
