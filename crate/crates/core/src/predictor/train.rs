use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{build_features, EmbeddingTable, Example, FeatureRecord, Modality, PredictorError, PredictorModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Optimizer {
    /// Plain mini-batch gradient descent.
    Sgd,
    /// Adam with beta1 = 0.9, beta2 = 0.999, eps = 1e-8.
    #[default]
    Adam,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub base_lr: f64,
    /// Multiplier applied to the learning rate every `decay_every` epochs.
    pub decay_factor: f64,
    pub decay_every: usize,
    pub batch_size: usize,
    pub weight_decay: f64,
    pub seed: u64,
    pub optimizer: Optimizer,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 50,
            base_lr: 3e-4,
            decay_factor: 0.6,
            decay_every: 5,
            batch_size: 1,
            weight_decay: 0.0,
            seed: 0,
            optimizer: Optimizer::Adam,
        }
    }
}

impl TrainConfig {
    /// Step schedule: `base_lr * decay_factor^(epoch / decay_every)`.
    pub fn learning_rate(&self, epoch: usize) -> f64 {
        self.base_lr * self.decay_factor.powi((epoch / self.decay_every) as i32)
    }

    pub fn validate(&self) -> Result<(), PredictorError> {
        let bad = |msg: &str| Err(PredictorError::InvalidConfig(msg.to_string()));
        if self.epochs == 0 {
            return bad("epochs must be positive");
        }
        if !(self.base_lr > 0.0 && self.base_lr.is_finite()) {
            return bad("learning rate must be positive");
        }
        if !(self.decay_factor > 0.0 && self.decay_factor <= 1.0) {
            return bad("decay factor must lie in (0, 1]");
        }
        if self.decay_every == 0 {
            return bad("decay interval must be positive");
        }
        if self.batch_size == 0 {
            return bad("batch size must be positive");
        }
        if !(self.weight_decay >= 0.0 && self.weight_decay.is_finite()) {
            return bad("weight decay must be non-negative");
        }
        Ok(())
    }
}

/// Full-dataset loss of each modality after an epoch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochStats {
    pub epoch: usize,
    pub learning_rate: f64,
    pub rgb_loss: f64,
    pub flow_loss: f64,
}

struct AdamState {
    step: i32,
    m: Vec<f64>,
    v: Vec<f64>,
}

impl AdamState {
    const BETA1: f64 = 0.9;
    const BETA2: f64 = 0.999;
    const EPS: f64 = 1e-8;

    fn new(n: usize) -> Self {
        AdamState {
            step: 0,
            m: vec![0.0; n],
            v: vec![0.0; n],
        }
    }
}

/// Trains both modalities independently with mini-batch updates.
///
/// Shuffling is driven by `config.seed` (one stream per modality), so equal
/// inputs give bitwise-equal models and traces. The model's weight decay and
/// optimizer are overwritten from `config`.
pub fn train(
    mut model: PredictorModel,
    dataset: &[FeatureRecord],
    table: Option<&EmbeddingTable>,
    config: &TrainConfig,
) -> Result<(PredictorModel, Vec<EpochStats>), PredictorError> {
    config.validate()?;
    if dataset.is_empty() {
        return Err(PredictorError::EmptyBatch);
    }
    model.config.weight_decay = config.weight_decay;
    model.config.optimizer = config.optimizer;

    let mut examples: Vec<Vec<Example>> = Vec::with_capacity(2);
    for modality in Modality::ALL {
        let mut set = Vec::with_capacity(dataset.len());
        for record in dataset {
            let label = record
                .label
                .ok_or_else(|| PredictorError::UnlabeledRecord(record.id.clone()))?;
            let features = build_features(record, modality, table, model.config.use_nouns)?;
            model.forward(&features, modality)?;
            set.push(Example {
                features,
                target: label.classes(),
            });
        }
        examples.push(set);
    }

    let mut trace: Vec<EpochStats> = (0..config.epochs)
        .map(|epoch| EpochStats {
            epoch,
            learning_rate: config.learning_rate(epoch),
            rgb_loss: 0.0,
            flow_loss: 0.0,
        })
        .collect();

    for (m, (modality, set)) in Modality::ALL.into_iter().zip(&examples).enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(m as u64);
        let mut order: Vec<usize> = (0..set.len()).collect();
        let mut adam = AdamState::new(model.heads(modality).param_count());
        let all: Vec<&Example> = set.iter().collect();
        for stats in trace.iter_mut() {
            order.shuffle(&mut rng);
            for chunk in order.chunks(config.batch_size) {
                let batch: Vec<&Example> = chunk.iter().map(|&i| &set[i]).collect();
                let grad = model
                    .objective(&batch, modality, true)?
                    .1
                    .expect("gradient requested");
                let params = model.heads_mut(modality).params_mut();
                apply_update(config.optimizer, &mut adam, stats.learning_rate, params, grad.params());
            }
            let loss = model.objective(&all, modality, false)?.0;
            match modality {
                Modality::Rgb => stats.rgb_loss = loss,
                Modality::Flow => stats.flow_loss = loss,
            }
        }
    }
    Ok((model, trace))
}

fn apply_update<'a>(
    optimizer: Optimizer,
    adam: &mut AdamState,
    lr: f64,
    params: impl Iterator<Item = &'a mut f64>,
    grads: impl Iterator<Item = &'a f64>,
) {
    match optimizer {
        Optimizer::Sgd => params.zip(grads).for_each(|(p, g)| *p -= lr * g),
        Optimizer::Adam => {
            adam.step += 1;
            let c1 = 1.0 - AdamState::BETA1.powi(adam.step);
            let c2 = 1.0 - AdamState::BETA2.powi(adam.step);
            for (((p, g), m), v) in params.zip(grads).zip(&mut adam.m).zip(&mut adam.v) {
                *m = AdamState::BETA1 * *m + (1.0 - AdamState::BETA1) * g;
                *v = AdamState::BETA2 * *v + (1.0 - AdamState::BETA2) * g * g;
                *p -= lr * (*m / c1) / ((*v / c2).sqrt() + AdamState::EPS);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::predictor::ModelConfig;
    use crate::taxonomy::MotionCode;

    fn record(id: &str, rgb: Vec<f64>, code: &str) -> FeatureRecord {
        FeatureRecord {
            id: id.into(),
            flow: rgb.iter().map(|v| -v).collect(),
            rgb,
            nouns: vec![],
            label: Some(code.parse().unwrap()),
        }
    }

    #[test]
    fn step_schedule() {
        let cfg = TrainConfig::default();
        for e in 0..5 {
            assert_eq!(cfg.learning_rate(e), 3e-4);
        }
        for e in 5..10 {
            assert!((cfg.learning_rate(e) - 1.8e-4).abs() < 1e-18);
        }
        for e in 10..15 {
            assert!((cfg.learning_rate(e) - 1.08e-4).abs() < 1e-18);
        }
    }

    #[test]
    fn rejects_bad_configs() {
        let base = TrainConfig::default();
        for cfg in [
            TrainConfig { epochs: 0, ..base.clone() },
            TrainConfig { base_lr: 0.0, ..base.clone() },
            TrainConfig { decay_factor: 1.5, ..base.clone() },
            TrainConfig { decay_factor: 0.0, ..base.clone() },
            TrainConfig { batch_size: 0, ..base.clone() },
            TrainConfig { decay_every: 0, ..base.clone() },
            TrainConfig { weight_decay: -1.0, ..base.clone() },
        ] {
            assert!(cfg.validate().is_err(), "{cfg:?}");
        }
        assert!(base.validate().is_ok());
    }

    #[test]
    fn unlabeled_and_mismatched_records() {
        let model = PredictorModel::new(ModelConfig::new(2));
        let mut r = record("a", vec![1.0, 0.0], "101-0-01-01-0");
        r.label = None;
        assert!(matches!(
            train(model.clone(), &[r], None, &TrainConfig::default()),
            Err(PredictorError::UnlabeledRecord(id)) if id == "a"
        ));
        let r = record("b", vec![1.0, 0.0, 2.0], "101-0-01-01-0");
        assert!(matches!(
            train(model, &[r], None, &TrainConfig::default()),
            Err(PredictorError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn single_sample_converges_monotonically() {
        let model = PredictorModel::new(ModelConfig {
            seed: 4,
            ..ModelConfig::new(3)
        });
        let data = [record("only", vec![1.0, -1.0, 1.0], "111-1-11-00-1")];
        let cfg = TrainConfig {
            epochs: 500,
            base_lr: 0.5,
            decay_factor: 1.0,
            optimizer: Optimizer::Sgd,
            ..TrainConfig::default()
        };
        let (trained, trace) = train(model, &data, None, &cfg).unwrap();
        for w in trace.windows(2) {
            assert!(w[1].rgb_loss < w[0].rgb_loss);
            assert!(w[1].flow_loss < w[0].flow_loss);
        }
        let last = trace.last().unwrap();
        assert!(last.rgb_loss < 0.01, "{}", last.rgb_loss);
        assert!(last.flow_loss < 0.01, "{}", last.flow_loss);
        let p = trained.predict(&data[0], None).unwrap();
        let expected: MotionCode = "111-1-11-00-1".parse().unwrap();
        assert_eq!((p.rgb, p.flow, p.fused), (expected, expected, expected));
    }

    #[test]
    fn deterministic_given_seed() {
        let data: Vec<_> = (0..12)
            .map(|i| {
                let x = i as f64;
                let code = ["101-0-01-01-0", "000-0-00-01-0", "111-1-11-00-0"][i % 3];
                record(&i.to_string(), vec![x.sin(), x.cos(), 1.0], code)
            })
            .collect();
        for optimizer in [Optimizer::Sgd, Optimizer::Adam] {
            let cfg = TrainConfig {
                epochs: 7,
                base_lr: 0.05,
                batch_size: 5,
                weight_decay: 1e-3,
                seed: 17,
                optimizer,
                ..TrainConfig::default()
            };
            let model = PredictorModel::new(ModelConfig::new(3));
            let a = train(model.clone(), &data, None, &cfg).unwrap();
            let b = train(model.clone(), &data, None, &cfg).unwrap();
            assert_eq!(a, b);
            assert_eq!(a.0.config.optimizer, optimizer);
            assert_eq!(a.0.config.weight_decay, 1e-3);
            let other = train(model, &data, None, &TrainConfig { seed: 18, ..cfg }).unwrap();
            assert_ne!(a.1, other.1);
        }
    }
}
