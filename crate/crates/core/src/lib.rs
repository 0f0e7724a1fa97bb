//! Motion codes: a 9-bit mechanical embedding of manipulation actions.
//!
//! - [`taxonomy`] defines the code itself, its string and bit images, the
//!   class-index view used for classification, and the decision-tree encoder.
//! - [`codebook`] maps verbs to codes and ranks verbs by code distance.
//! - [`metrics`] holds code distances and accuracy reports.
//! - [`predictor`] trains and runs the per-component classifier over
//!   precomputed visual features, with optional noun embeddings.

pub mod codebook;
pub mod metrics;
pub mod predictor;
pub mod taxonomy;

pub use codebook::{Codebook, CodebookEntry, CodebookError, Neighbor};
pub use metrics::{component_distance, evaluate, hamming, within_k_accuracy, EvalReport};
pub use taxonomy::{
    enumerate_all, CodeError, Component, ComponentClasses, ContactDuration, Engagement,
    InteractionType, MotionCode, PassiveMotion, Recurrence, TaxonomyAnswers, TrajectoryDof,
};
