//! Assurance-case graphs and their evaluation.
//!
//! A case is parsed (see [`format`]) into an immutable [`CaseGraph`], checked
//! structurally, then evaluated for logical validity, probabilistic
//! confidence, confirmation measures of its evidence and residual risk.

pub mod confidence;
pub mod format;
pub mod measures;
pub mod model;
pub mod report;
pub mod risk;
pub mod structure;
pub mod validity;

pub use model::{build_graph, BuildError, CaseGraph, Node, NodeId, NodeKind};
pub use structure::{affected_claim, structural_check, StructuralFinding};
pub use validity::{
    assess_validity, soundness_gate, Assessment, AssessmentMap, LeafInputs, Soundness,
};
