//! Distances between motion codes and accuracy reports over
//! prediction/ground-truth pairs.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::taxonomy::{Component, MotionCode, CODE_BITS};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("cannot evaluate an empty list of pairs")]
    EmptyInput,
}

/// Number of differing bits between the 9-bit images.
pub fn hamming(a: &MotionCode, b: &MotionCode) -> u32 {
    (a.value() ^ b.value()).count_ones()
}

/// Hamming distance with a weight per bit position (string order).
pub fn weighted_hamming(a: &MotionCode, b: &MotionCode, weights: &[f64; CODE_BITS]) -> f64 {
    let diff = a.value() ^ b.value();
    weights
        .iter()
        .enumerate()
        .filter(|(i, _)| diff >> (CODE_BITS - 1 - i) & 1 == 1)
        .map(|(_, w)| w)
        .sum()
}

/// Number of components whose class differs.
pub fn component_distance(a: &MotionCode, b: &MotionCode) -> u32 {
    let (a, b) = (a.classes().to_array(), b.classes().to_array());
    a.iter().zip(&b).filter(|(x, y)| x != y).count() as u32
}

/// Fraction of pairs `(predicted, truth)` within `k` bits of each other.
pub fn within_k_accuracy(pairs: &[(MotionCode, MotionCode)], k: u32) -> Result<f64, MetricsError> {
    if pairs.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    let hits = pairs.iter().filter(|(p, t)| hamming(p, t) <= k).count();
    Ok(hits as f64 / pairs.len() as f64)
}

/// Accuracy breakdown for one set of predictions.
///
/// Confusion matrices are indexed `[truth_class][predicted_class]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub n_samples: usize,
    pub exact_correct: usize,
    pub within_1_bit_correct: usize,
    pub exact_accuracy: f64,
    pub within_1_bit_accuracy: f64,
    pub per_component_correct: BTreeMap<Component, usize>,
    pub per_component_accuracy: BTreeMap<Component, f64>,
    pub confusions: BTreeMap<Component, Vec<Vec<usize>>>,
}

pub fn evaluate(pairs: &[(MotionCode, MotionCode)]) -> Result<EvalReport, MetricsError> {
    if pairs.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    let n = pairs.len();
    let mut confusions: Vec<Vec<Vec<usize>>> = Component::CLASS_COUNTS
        .iter()
        .map(|&k| vec![vec![0; k]; k])
        .collect();
    let mut exact = 0;
    let mut within_1 = 0;
    for (predicted, truth) in pairs {
        let d = hamming(predicted, truth);
        exact += (d == 0) as usize;
        within_1 += (d <= 1) as usize;
        let (p, t) = (predicted.classes().to_array(), truth.classes().to_array());
        for (i, matrix) in confusions.iter_mut().enumerate() {
            matrix[t[i]][p[i]] += 1;
        }
    }
    let mut per_component_correct = BTreeMap::new();
    let mut per_component_accuracy = BTreeMap::new();
    let mut by_name = BTreeMap::new();
    for (component, matrix) in Component::ALL.into_iter().zip(confusions) {
        let diagonal: usize = (0..matrix.len()).map(|i| matrix[i][i]).sum();
        per_component_correct.insert(component, diagonal);
        per_component_accuracy.insert(component, diagonal as f64 / n as f64);
        by_name.insert(component, matrix);
    }
    Ok(EvalReport {
        n_samples: n,
        exact_correct: exact,
        within_1_bit_correct: within_1,
        exact_accuracy: exact as f64 / n as f64,
        within_1_bit_accuracy: within_1 as f64 / n as f64,
        per_component_correct,
        per_component_accuracy,
        confusions: by_name,
    })
}

/// `correct / total` as a percentage rounded half-up to one decimal, computed
/// in integer arithmetic so that e.g. 1/8 renders as `12.5`.
pub fn percent_one_decimal(correct: usize, total: usize) -> String {
    assert!(total > 0);
    let tenths = (correct as u128 * 2000 + total as u128) / (2 * total as u128);
    format!("{}.{}", tenths / 10, tenths % 10)
}

impl EvalReport {
    /// Rows of (label, correct count) in table order.
    pub fn rows(&self) -> Vec<(&'static str, usize)> {
        let mut rows = vec![
            ("Entire code", self.exact_correct),
            ("Entire code with 1 bit off", self.within_1_bit_correct),
        ];
        rows.extend(
            Component::ALL
                .iter()
                .map(|c| (c.title(), self.per_component_correct[c])),
        );
        rows
    }
}

/// Renders reports side by side as a fixed-width percentage table, one
/// column per named report.
pub fn render_table(columns: &[(&str, &EvalReport)]) -> String {
    const LABEL_WIDTH: usize = 28;
    const COLUMN_WIDTH: usize = 8;
    let mut out = String::new();
    let _ = write!(out, "{:<LABEL_WIDTH$}", "");
    for (name, _) in columns {
        let _ = write!(out, "{name:>COLUMN_WIDTH$}");
    }
    out.push('\n');
    let rows: Vec<_> = columns.iter().map(|(_, r)| (r.rows(), r.n_samples)).collect();
    let Some((first, _)) = rows.first() else {
        return out;
    };
    for (i, (label, _)) in first.iter().enumerate() {
        if i == 2 {
            out.push('\n');
        }
        let _ = write!(out, "{label:<LABEL_WIDTH$}");
        for (col, n) in &rows {
            let _ = write!(out, "{:>COLUMN_WIDTH$}", percent_one_decimal(col[i].1, *n));
        }
        out.push('\n');
    }
    out
}
