//! Constructing graphs with prescribed invariants: simple purely infinite
//! and AF building blocks, the gluing adjustment, and the full pipeline for
//! augmented invariants with a round-trip check.

mod af;
mod glue;
mod pi;
mod pipeline;
pub mod targets;

pub use af::{induced_scale, realize_af_scaled, InducedScale};
pub use glue::{glue, GlueProblem, GlueResult};
pub use pi::{realize_pi_simple, verify_pi, PiRealization};
pub use pipeline::{synthesize, synthesize_with, SynthOptions, SynthesisResult};

use crate::extension::ExtensionError;
use crate::sixterm::SixtermError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SynthError {
    #[error("no dominating row pair: {0}")]
    NoDominance(String),
    #[error("lift not solvable: {0}")]
    UnsolvableZ(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("construction failed: {0}")]
    ConstructionFailed(String),
    #[error("bad base point: {0}")]
    BadBasePoint(String),
    #[error("unsupported certificate: {0}")]
    UnsupportedCertificate(String),
    #[error("hypotheses fail: {0}")]
    HypothesisFailure(String),
    #[error("verification failed:\n{0}")]
    VerificationFailed(String),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error(transparent)]
    Sixterm(#[from] SixtermError),
    #[error(transparent)]
    Extension(#[from] ExtensionError),
}
