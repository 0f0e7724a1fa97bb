//! Shared fixtures for the criterion benchmarks.

use motion_code::predictor::{
    synth_dataset, Example, FeatureRecord, ModelConfig, Modality, PredictorModel, SynthConfig,
};
use motion_code::Codebook;

pub fn synthetic_records(n: usize, seed: u64) -> Vec<FeatureRecord> {
    let codes = Codebook::builtin().codes();
    let config = SynthConfig {
        n,
        seed,
        ..SynthConfig::default()
    };
    synth_dataset(&codes, &config)
        .expect("valid synthetic config")
        .records
}

pub fn visual_model(records: &[FeatureRecord], seed: u64) -> PredictorModel {
    PredictorModel::new(ModelConfig {
        seed,
        ..ModelConfig::new(records[0].rgb.len())
    })
}

pub fn rgb_examples(records: &[FeatureRecord]) -> Vec<Example> {
    records
        .iter()
        .map(|r| Example {
            features: r.visual(Modality::Rgb).to_vec(),
            target: r.label.expect("synthetic records are labeled").classes(),
        })
        .collect()
}
