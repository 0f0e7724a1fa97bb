use std::fmt;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::{check_dim, EmbeddingTable, PredictorError};
use crate::taxonomy::MotionCode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Modality {
    Rgb,
    Flow,
}

impl Modality {
    pub const ALL: [Modality; 2] = [Modality::Rgb, Modality::Flow];
}

impl fmt::Display for Modality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Modality::Rgb => "rgb",
            Modality::Flow => "flow",
        })
    }
}

/// One sample: visual features for both modalities, object nouns and an
/// optional ground-truth code. Serialized as one JSON Lines record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRecord {
    pub id: String,
    pub rgb: Vec<f64>,
    pub flow: Vec<f64>,
    #[serde(default)]
    pub nouns: Vec<String>,
    #[serde(rename = "code", default, skip_serializing_if = "Option::is_none")]
    pub label: Option<MotionCode>,
}

impl FeatureRecord {
    pub fn visual(&self, modality: Modality) -> &[f64] {
        match modality {
            Modality::Rgb => &self.rgb,
            Modality::Flow => &self.flow,
        }
    }
}

/// The classifier input for one modality: the visual vector, followed by the
/// mean noun embedding when `use_nouns` is set.
pub fn build_features(
    record: &FeatureRecord,
    modality: Modality,
    table: Option<&EmbeddingTable>,
    use_nouns: bool,
) -> Result<Vec<f64>, PredictorError> {
    let visual = record.visual(modality);
    if !use_nouns {
        return Ok(visual.to_vec());
    }
    let table = table.ok_or(PredictorError::MissingEmbeddings)?;
    let nouns = table.embed(&record.nouns);
    let mut xi = Vec::with_capacity(visual.len() + table.dim());
    xi.extend_from_slice(visual);
    xi.extend(nouns.vector);
    Ok(xi)
}

/// Reads JSON Lines records. Blank lines are skipped; every record must
/// carry rgb and flow vectors of one shared length.
pub fn read_records<R: BufRead>(reader: R) -> Result<Vec<FeatureRecord>, PredictorError> {
    let mut records = Vec::new();
    let mut dim: Option<usize> = None;
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let lineno = i + 1;
        let record: FeatureRecord =
            serde_json::from_str(&line).map_err(|e| PredictorError::Format {
                line: lineno,
                message: e.to_string(),
            })?;
        let expected = *dim.get_or_insert(record.rgb.len());
        check_dim("rgb features", expected, record.rgb.len())
            .and_then(|_| check_dim("flow features", expected, record.flow.len()))
            .map_err(|e| PredictorError::Format {
                line: lineno,
                message: e.to_string(),
            })?;
        records.push(record);
    }
    Ok(records)
}

pub fn write_records<W: Write>(mut out: W, records: &[FeatureRecord]) -> Result<(), PredictorError> {
    for record in records {
        serde_json::to_writer(&mut out, record)?;
        writeln!(out)?;
    }
    Ok(())
}
