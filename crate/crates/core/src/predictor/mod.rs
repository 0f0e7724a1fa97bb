//! Motion-code prediction from precomputed per-modality feature vectors.
//!
//! Each modality (RGB and optical flow) owns five affine softmax heads, one
//! per taxonomy component. The heads are trained independently per modality
//! on the summed cross-entropy of the five components, and their output
//! distributions are averaged at inference time (late fusion). Visual
//! features may be extended with the mean embedding of the record's nouns.

mod embedding;
mod features;
mod model;
mod synth;
mod train;

use thiserror::Error;

pub use embedding::{EmbeddingTable, NounEmbedding};
pub use features::{build_features, read_records, write_records, FeatureRecord, Modality};
pub use model::{
    fuse, ComponentProbs, Example, HeadParams, ModalityHeads, ModelConfig, Prediction,
    PredictorModel,
};
pub use synth::{inject_noun_noise, noun_token, synth_dataset, SynthConfig, SynthData};
pub use train::{train, EpochStats, Optimizer, TrainConfig};

#[derive(Debug, Error)]
pub enum PredictorError {
    #[error("dimension mismatch for {what}: expected {expected}, got {got}")]
    DimensionMismatch {
        what: String,
        expected: usize,
        got: usize,
    },
    #[error("batch is empty")]
    EmptyBatch,
    #[error("record {0:?} has no motion code label")]
    UnlabeledRecord(String),
    #[error("noun features requested but no embedding table was supplied")]
    MissingEmbeddings,
    #[error("vocabulary needs at least 2 tokens, got {0}")]
    VocabularyTooSmall(usize),
    #[error("{what} dimension {got} is too small (need at least {min})")]
    DimensionTooSmall {
        what: &'static str,
        got: usize,
        min: usize,
    },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn check_dim(what: &str, expected: usize, got: usize) -> Result<(), PredictorError> {
    if expected != got {
        return Err(PredictorError::DimensionMismatch {
            what: what.to_string(),
            expected,
            got,
        });
    }
    Ok(())
}
