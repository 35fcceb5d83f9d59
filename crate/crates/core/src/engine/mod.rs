//! Property tags, closure rules and the obstruction verdict.

mod lambda;
mod rules;
mod tags;
mod verdict;

use thiserror::Error;

use crate::embedding::EmbeddingError;
use crate::group::{GroupError, GroupProperty};
use crate::oscillation::OscillationError;

pub use lambda::{lambda_max_locally_finite, MaxLocallyFiniteNormal};
pub use rules::{anchor, replay_strongly_not_fs, strongly_not_fs_derive, StronglyNotFsDerivation, TraceStep};
pub use tags::{derive_tags, NodeTags, Premise, PropertyTagSet, Provenance, Tag};
pub use verdict::{
    replay_certificate, rr0_obstruction_analyze, AnalysisConfig, Confidence, ObstructionCertificate, OmegaSummary,
    StageOmega, Timings, VerdictKind, Witness, WitnessSource,
};

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("inconsistent tags at {path}: {property} is both {first} and {second}")]
    InconsistentTags { path: String, property: GroupProperty, first: String, second: String },
    #[error("tag derivation did not reach a fixed point within {0} rounds")]
    NoFixedPoint(usize),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("internal error: {0}")]
    Internal(String),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Oscillation(#[from] OscillationError),
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
}
