use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{EmbeddingTable, FeatureRecord, PredictorError};
use crate::taxonomy::{Component, MotionCode};

const TOTAL_CLASSES: usize = 15;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub n: usize,
    pub visual_dim: usize,
    pub noun_dim: usize,
    /// Standard deviation of the per-coordinate Gaussian noise.
    pub sigma: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n: 1000,
            visual_dim: 64,
            noun_dim: 32,
            sigma: 0.1,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthData {
    pub records: Vec<FeatureRecord>,
    /// One token per code, embedded as the sum of that code's class
    /// directions in noun space.
    pub embeddings: EmbeddingTable,
}

/// The synthetic object token standing for `code`.
pub fn noun_token(code: &MotionCode) -> String {
    let bits: String = code.to_bits().iter().map(|b| char::from(b'0' + b)).collect();
    format!("obj_{bits}")
}

/// Orthonormal directions, one per component class, drawn from the seed.
fn class_directions(rng: &mut ChaCha8Rng, dim: usize) -> Vec<Vec<f64>> {
    let mut dirs: Vec<Vec<f64>> = Vec::with_capacity(TOTAL_CLASSES);
    while dirs.len() < TOTAL_CLASSES {
        let mut v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        for d in &dirs {
            let proj: f64 = v.iter().zip(d).map(|(a, b)| a * b).sum();
            v.iter_mut().zip(d).for_each(|(a, b)| *a -= proj * b);
        }
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm > 1e-6 {
            v.iter_mut().for_each(|a| *a /= norm);
            dirs.push(v);
        }
    }
    dirs
}

/// Sum of the five class directions that make up `code`.
fn code_signal(dirs: &[Vec<f64>], code: &MotionCode) -> Vec<f64> {
    let mut offset = 0;
    let mut signal = vec![0.0; dirs[0].len()];
    for (component, class) in Component::ALL.into_iter().zip(code.classes().to_array()) {
        signal
            .iter_mut()
            .zip(&dirs[offset + class])
            .for_each(|(s, d)| *s += d);
        offset += component.num_classes();
    }
    signal
}

/// Labeled records whose features are the sum of their code's class
/// directions plus Gaussian noise. Labels cycle through `codes` in order and
/// each record carries the code's noun token.
pub fn synth_dataset(codes: &[MotionCode], config: &SynthConfig) -> Result<SynthData, PredictorError> {
    if codes.is_empty() {
        return Err(PredictorError::InvalidConfig("no codes to sample from".into()));
    }
    for (what, got) in [("visual", config.visual_dim), ("noun", config.noun_dim)] {
        if got < TOTAL_CLASSES {
            return Err(PredictorError::DimensionTooSmall {
                what,
                got,
                min: TOTAL_CLASSES,
            });
        }
    }
    if !(config.sigma >= 0.0 && config.sigma.is_finite()) {
        return Err(PredictorError::InvalidConfig("sigma must be non-negative".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let visual_dirs = class_directions(&mut rng, config.visual_dim);
    let noun_dirs = class_directions(&mut rng, config.noun_dim);

    let mut embeddings = EmbeddingTable::new(config.noun_dim);
    for code in codes {
        let token = noun_token(code);
        if embeddings.get(&token).is_none() {
            embeddings.insert(&token, &code_signal(&noun_dirs, code))?;
        }
    }

    let signals: Vec<Vec<f64>> = codes.iter().map(|c| code_signal(&visual_dirs, c)).collect();
    let width = config.n.saturating_sub(1).to_string().len();
    let noisy = |signal: &[f64], rng: &mut ChaCha8Rng| -> Vec<f64> {
        signal
            .iter()
            .map(|s| s + config.sigma * rng.sample::<f64, _>(StandardNormal))
            .collect()
    };
    let records = (0..config.n)
        .map(|i| {
            let k = i % codes.len();
            FeatureRecord {
                id: format!("synth-{i:0width$}"),
                rgb: noisy(&signals[k], &mut rng),
                flow: noisy(&signals[k], &mut rng),
                nouns: vec![noun_token(&codes[k])],
                label: Some(codes[k]),
            }
        })
        .collect();
    Ok(SynthData { records, embeddings })
}

/// Replaces the nouns of exactly `floor(rho * n)` seeded-random records with
/// a single vocabulary token that differs from the record's first noun.
pub fn inject_noun_noise(
    dataset: &[FeatureRecord],
    rho: f64,
    vocabulary: &[String],
    seed: u64,
) -> Result<Vec<FeatureRecord>, PredictorError> {
    if vocabulary.len() < 2 {
        return Err(PredictorError::VocabularyTooSmall(vocabulary.len()));
    }
    if !(0.0..=1.0).contains(&rho) {
        return Err(PredictorError::InvalidConfig(format!(
            "noise fraction {rho} outside [0, 1]"
        )));
    }
    let mut out = dataset.to_vec();
    let count = (rho * dataset.len() as f64).floor() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen = index::sample(&mut rng, dataset.len(), count).into_vec();
    chosen.sort_unstable();
    for i in chosen {
        let original = out[i].nouns.first().map(|s| s.to_lowercase());
        let candidates: Vec<&String> = vocabulary
            .iter()
            .filter(|t| Some(t.to_lowercase()) != original)
            .collect();
        if candidates.is_empty() {
            return Err(PredictorError::VocabularyTooSmall(1));
        }
        let pick = candidates[rng.random_range(0..candidates.len())];
        out[i].nouns = vec![pick.clone()];
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codebook::Codebook;

    fn codes() -> Vec<MotionCode> {
        Codebook::builtin().codes()
    }

    #[test]
    fn noun_token_format() {
        assert_eq!(noun_token(&"101-0-01-01-0".parse().unwrap()), "obj_101001010");
    }

    #[test]
    fn directions_are_orthonormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let dirs = class_directions(&mut rng, 15);
        for (i, a) in dirs.iter().enumerate() {
            for (j, b) in dirs.iter().enumerate() {
                let d: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((d - expected).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn noiseless_records_repeat_per_code() {
        let data = synth_dataset(
            &codes(),
            &SynthConfig {
                n: 100,
                sigma: 0.0,
                ..SynthConfig::default()
            },
        )
        .unwrap();
        assert_eq!(data.records.len(), 100);
        for (i, r) in data.records.iter().enumerate() {
            let twin = &data.records[i % 20];
            assert_eq!(r.label, twin.label);
            assert_eq!(r.rgb, twin.rgb);
            assert_eq!(r.rgb, r.flow);
        }
        for code in codes() {
            let n = data.records.iter().filter(|r| r.label == Some(code)).count();
            assert_eq!(n, 5);
        }
        assert_eq!(data.embeddings.len(), 20);
        assert_eq!(data.records[7].id, "synth-07");
    }

    #[test]
    fn signal_projects_onto_own_classes() {
        let data = synth_dataset(
            &codes(),
            &SynthConfig {
                n: 20,
                visual_dim: 15,
                noun_dim: 15,
                sigma: 0.0,
                seed: 5,
            },
        )
        .unwrap();
        // 5 unit orthogonal components: squared norm is exactly 5.
        for r in &data.records {
            let sq: f64 = r.rgb.iter().map(|v| v * v).sum();
            assert!((sq - 5.0).abs() < 1e-9);
            let e = data.embeddings.get(&r.nouns[0]).unwrap();
            assert!((e.iter().map(|v| v * v).sum::<f64>() - 5.0).abs() < 1e-9);
        }
    }

    #[test]
    fn synth_is_seeded() {
        let cfg = SynthConfig {
            n: 30,
            ..SynthConfig::default()
        };
        let a = synth_dataset(&codes(), &cfg).unwrap();
        assert_eq!(a, synth_dataset(&codes(), &cfg).unwrap());
        let b = synth_dataset(&codes(), &SynthConfig { seed: 1, ..cfg }).unwrap();
        assert_ne!(a.records, b.records);
    }

    #[test]
    fn synth_rejects_small_dims() {
        let err = synth_dataset(
            &codes(),
            &SynthConfig {
                visual_dim: 14,
                ..SynthConfig::default()
            },
        )
        .unwrap_err();
        assert!(matches!(err, PredictorError::DimensionTooSmall { got: 14, .. }));
        assert!(synth_dataset(&[], &SynthConfig::default()).is_err());
    }

    fn small_set(n: usize) -> (Vec<FeatureRecord>, Vec<String>) {
        let data = synth_dataset(
            &codes(),
            &SynthConfig {
                n,
                ..SynthConfig::default()
            },
        )
        .unwrap();
        (data.records, data.embeddings.tokens().to_vec())
    }

    fn altered(a: &[FeatureRecord], b: &[FeatureRecord]) -> usize {
        a.iter().zip(b).filter(|(x, y)| x.nouns != y.nouns).count()
    }

    #[test]
    fn noise_counts() {
        let (records, vocab) = small_set(10);
        assert_eq!(inject_noun_noise(&records, 0.0, &vocab, 1).unwrap(), records);
        let all = inject_noun_noise(&records, 1.0, &vocab, 1).unwrap();
        assert_eq!(altered(&records, &all), 10);
        for (before, after) in records.iter().zip(&all) {
            assert_eq!(after.nouns.len(), 1);
            assert_ne!(after.nouns[0], before.nouns[0]);
            assert!(vocab.contains(&after.nouns[0]));
            assert_eq!((&after.id, &after.rgb, &after.label), (&before.id, &before.rgb, &before.label));
        }

        let (records, vocab) = small_set(786);
        let noisy = inject_noun_noise(&records, 0.2, &vocab, 9).unwrap();
        assert_eq!(altered(&records, &noisy), 157);
        assert_eq!(noisy, inject_noun_noise(&records, 0.2, &vocab, 9).unwrap());
    }

    #[test]
    fn noise_rejects_tiny_vocabulary() {
        let (records, _) = small_set(4);
        assert!(matches!(
            inject_noun_noise(&records, 0.5, &["only".to_string()], 0),
            Err(PredictorError::VocabularyTooSmall(1))
        ));
    }
}
