use std::io::{Read, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{build_features, check_dim, EmbeddingTable, FeatureRecord, Modality, Optimizer, PredictorError};
use crate::taxonomy::{Component, ComponentClasses, MotionCode};

/// Affine layer for one component: `classes × inputs` weights, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeadParams {
    pub classes: usize,
    pub inputs: usize,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl HeadParams {
    pub fn zeros(classes: usize, inputs: usize) -> Self {
        HeadParams {
            classes,
            inputs,
            weights: vec![0.0; classes * inputs],
            bias: vec![0.0; classes],
        }
    }

    pub fn row(&self, class: usize) -> &[f64] {
        &self.weights[class * self.inputs..(class + 1) * self.inputs]
    }

    pub fn logits(&self, x: &[f64]) -> Vec<f64> {
        (0..self.classes)
            .map(|k| self.bias[k] + dot(self.row(k), x))
            .collect()
    }

    fn squared_norm(&self) -> f64 {
        self.weights.iter().chain(&self.bias).map(|v| v * v).sum()
    }

    fn params(&self) -> impl Iterator<Item = &f64> {
        self.weights.iter().chain(&self.bias)
    }

    fn params_mut(&mut self) -> impl Iterator<Item = &mut f64> {
        self.weights.iter_mut().chain(&mut self.bias)
    }

    fn validate(&self, component: Component, inputs: usize) -> Result<(), PredictorError> {
        let what = |part: &str| format!("{component} head {part}");
        check_dim(&what("classes"), component.num_classes(), self.classes)?;
        check_dim(&what("inputs"), inputs, self.inputs)?;
        check_dim(&what("weights"), self.classes * self.inputs, self.weights.len())?;
        check_dim(&what("bias"), self.classes, self.bias.len())?;
        if !self.params().all(|v| v.is_finite()) {
            return Err(PredictorError::InvalidConfig(format!(
                "{component} head has non-finite parameters"
            )));
        }
        Ok(())
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|z| (z - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / total).collect()
}

fn log_sum_exp(logits: &[f64]) -> f64 {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    max + logits.iter().map(|z| (z - max).exp()).sum::<f64>().ln()
}

/// The five component heads of one modality, in component order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModalityHeads {
    pub heads: Vec<HeadParams>,
}

impl ModalityHeads {
    pub fn zeros(inputs: usize) -> Self {
        ModalityHeads {
            heads: Component::CLASS_COUNTS
                .iter()
                .map(|&k| HeadParams::zeros(k, inputs))
                .collect(),
        }
    }

    pub fn squared_norm(&self) -> f64 {
        self.heads.iter().map(HeadParams::squared_norm).sum()
    }

    /// All parameters flattened head by head, weights before bias.
    pub fn params(&self) -> impl Iterator<Item = &f64> {
        self.heads.iter().flat_map(HeadParams::params)
    }

    pub fn params_mut(&mut self) -> impl Iterator<Item = &mut f64> {
        self.heads.iter_mut().flat_map(HeadParams::params_mut)
    }

    pub fn param_count(&self) -> usize {
        self.heads.iter().map(|h| h.weights.len() + h.bias.len()).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub visual_dim: usize,
    pub noun_dim: usize,
    pub use_nouns: bool,
    /// Per-component loss weights.
    pub lambda: [f64; 5],
    pub weight_decay: f64,
    pub seed: u64,
    #[serde(default)]
    pub optimizer: Optimizer,
}

impl ModelConfig {
    pub fn new(visual_dim: usize) -> Self {
        ModelConfig {
            visual_dim,
            noun_dim: 0,
            use_nouns: false,
            lambda: [1.0; 5],
            weight_decay: 0.0,
            seed: 0,
            optimizer: Optimizer::default(),
        }
    }

    pub fn with_nouns(mut self, noun_dim: usize) -> Self {
        self.noun_dim = noun_dim;
        self.use_nouns = true;
        self
    }

    pub fn input_dim(&self) -> usize {
        self.visual_dim + if self.use_nouns { self.noun_dim } else { 0 }
    }
}

/// Per-head class distributions, in component order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentProbs {
    pub heads: [Vec<f64>; 5],
}

impl ComponentProbs {
    pub fn uniform() -> Self {
        ComponentProbs {
            heads: Component::CLASS_COUNTS.map(|k| vec![1.0 / k as f64; k]),
        }
    }

    /// Most probable class per head; the lowest index wins ties.
    pub fn classes(&self) -> ComponentClasses {
        ComponentClasses::from_array(self.heads.each_ref().map(|p| {
            p.iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |best, (i, &v)| {
                    if v > best.1 {
                        (i, v)
                    } else {
                        best
                    }
                })
                .0
        }))
    }

    pub fn code(&self) -> Result<MotionCode, PredictorError> {
        MotionCode::from_classes(self.classes())
            .map_err(|e| PredictorError::InvalidConfig(e.to_string()))
    }
}

/// Late fusion: the elementwise mean of two modalities' distributions.
pub fn fuse(a: &ComponentProbs, b: &ComponentProbs) -> Result<ComponentProbs, PredictorError> {
    let mut heads: [Vec<f64>; 5] = Default::default();
    for (i, (pa, pb)) in a.heads.iter().zip(&b.heads).enumerate() {
        check_dim(&format!("{} distribution", Component::ALL[i]), pa.len(), pb.len())?;
        heads[i] = pa.iter().zip(pb).map(|(x, y)| (x + y) / 2.0).collect();
    }
    Ok(ComponentProbs { heads })
}

/// A classifier input paired with its target classes.
#[derive(Debug, Clone, PartialEq)]
pub struct Example {
    pub features: Vec<f64>,
    pub target: ComponentClasses,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prediction {
    pub rgb: MotionCode,
    pub flow: MotionCode,
    pub fused: MotionCode,
    pub rgb_probs: ComponentProbs,
    pub flow_probs: ComponentProbs,
    pub fused_probs: ComponentProbs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictorModel {
    pub config: ModelConfig,
    pub rgb: ModalityHeads,
    pub flow: ModalityHeads,
}

impl PredictorModel {
    /// Weights drawn uniformly from `[-1/sqrt(d), 1/sqrt(d)]` with the
    /// config seed; biases start at zero.
    pub fn new(config: ModelConfig) -> Self {
        let inputs = config.input_dim();
        let bound = 1.0 / (inputs.max(1) as f64).sqrt();
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut init = || {
            let mut heads = ModalityHeads::zeros(inputs);
            for head in &mut heads.heads {
                for w in &mut head.weights {
                    *w = rng.random_range(-bound..=bound);
                }
            }
            heads
        };
        let rgb = init();
        let flow = init();
        PredictorModel { config, rgb, flow }
    }

    pub fn zeros(config: ModelConfig) -> Self {
        let inputs = config.input_dim();
        PredictorModel {
            config,
            rgb: ModalityHeads::zeros(inputs),
            flow: ModalityHeads::zeros(inputs),
        }
    }

    pub fn heads(&self, modality: Modality) -> &ModalityHeads {
        match modality {
            Modality::Rgb => &self.rgb,
            Modality::Flow => &self.flow,
        }
    }

    pub fn heads_mut(&mut self, modality: Modality) -> &mut ModalityHeads {
        match modality {
            Modality::Rgb => &mut self.rgb,
            Modality::Flow => &mut self.flow,
        }
    }

    fn check_input(&self, xi: &[f64]) -> Result<(), PredictorError> {
        check_dim("classifier input", self.config.input_dim(), xi.len())
    }

    pub fn forward(&self, xi: &[f64], modality: Modality) -> Result<ComponentProbs, PredictorError> {
        self.check_input(xi)?;
        let heads = &self.heads(modality).heads;
        Ok(ComponentProbs {
            heads: std::array::from_fn(|i| softmax(&heads[i].logits(xi))),
        })
    }

    /// Mean over the batch of the lambda-weighted summed cross-entropy, plus
    /// `weight_decay` times the squared norm of this modality's parameters.
    pub fn loss(&self, batch: &[Example], modality: Modality) -> Result<f64, PredictorError> {
        let refs: Vec<&Example> = batch.iter().collect();
        Ok(self.objective(&refs, modality, false)?.0)
    }

    /// Analytic gradient of [`PredictorModel::loss`], shaped like the heads.
    pub fn gradient(&self, batch: &[Example], modality: Modality) -> Result<ModalityHeads, PredictorError> {
        let refs: Vec<&Example> = batch.iter().collect();
        Ok(self
            .objective(&refs, modality, true)?
            .1
            .expect("gradient requested"))
    }

    pub(crate) fn objective(
        &self,
        batch: &[&Example],
        modality: Modality,
        with_gradient: bool,
    ) -> Result<(f64, Option<ModalityHeads>), PredictorError> {
        if batch.is_empty() {
            return Err(PredictorError::EmptyBatch);
        }
        let heads = self.heads(modality);
        let lambda = self.config.lambda;
        let gamma = self.config.weight_decay;
        let scale = 1.0 / batch.len() as f64;
        let mut grad = with_gradient.then(|| ModalityHeads::zeros(self.config.input_dim()));
        let mut data_loss = 0.0;
        for example in batch {
            let x = &example.features;
            self.check_input(x)?;
            let target = example.target.to_array();
            for (i, head) in heads.heads.iter().enumerate() {
                let y = target[i];
                if y >= head.classes {
                    return Err(PredictorError::InvalidConfig(format!(
                        "{} target class {y} out of range",
                        Component::ALL[i]
                    )));
                }
                let logits = head.logits(x);
                data_loss += lambda[i] * (log_sum_exp(&logits) - logits[y]);
                if let Some(grad) = grad.as_mut() {
                    let g = &mut grad.heads[i];
                    for (k, p) in softmax(&logits).into_iter().enumerate() {
                        let delta = lambda[i] * scale * (p - (k == y) as u8 as f64);
                        g.bias[k] += delta;
                        let row = &mut g.weights[k * g.inputs..(k + 1) * g.inputs];
                        row.iter_mut().zip(x).for_each(|(w, xj)| *w += delta * xj);
                    }
                }
            }
        }
        let mut total = data_loss * scale;
        if gamma != 0.0 {
            total += gamma * heads.squared_norm();
            if let Some(grad) = grad.as_mut() {
                for (g, p) in grad.params_mut().zip(heads.params()) {
                    *g += 2.0 * gamma * p;
                }
            }
        }
        Ok((total, grad))
    }

    pub fn predict(
        &self,
        record: &FeatureRecord,
        table: Option<&EmbeddingTable>,
    ) -> Result<Prediction, PredictorError> {
        let mut probs = Vec::with_capacity(2);
        for modality in Modality::ALL {
            let xi = build_features(record, modality, table, self.config.use_nouns)?;
            probs.push(self.forward(&xi, modality)?);
        }
        let flow_probs = probs.pop().expect("two modalities");
        let rgb_probs = probs.pop().expect("two modalities");
        let fused_probs = fuse(&rgb_probs, &flow_probs)?;
        Ok(Prediction {
            rgb: rgb_probs.code()?,
            flow: flow_probs.code()?,
            fused: fused_probs.code()?,
            rgb_probs,
            flow_probs,
            fused_probs,
        })
    }

    pub fn validate(&self) -> Result<(), PredictorError> {
        let inputs = self.config.input_dim();
        for modality in Modality::ALL {
            let heads = &self.heads(modality).heads;
            check_dim(&format!("{modality} head count"), 5, heads.len())?;
            for (component, head) in Component::ALL.into_iter().zip(heads) {
                head.validate(component, inputs)?;
            }
        }
        Ok(())
    }

    pub fn save<W: Write>(&self, out: W) -> Result<(), PredictorError> {
        serde_json::to_writer(out, self)?;
        Ok(())
    }

    pub fn load<R: Read>(reader: R) -> Result<Self, PredictorError> {
        let model: PredictorModel = serde_json::from_reader(reader)?;
        model.validate()?;
        Ok(model)
    }
}
