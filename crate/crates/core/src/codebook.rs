//! Verb to motion-code lookup tables.
//!
//! A codebook file is a JSON array of `{"code": "...", "verbs": [...]}`
//! objects. A verb label may end with a parenthesized qualifier such as
//! `"shake (revolute)"`; lookups by verb match either the full label or the
//! label with the qualifier removed, ignoring case.

use std::collections::HashSet;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metrics::hamming;
use crate::taxonomy::MotionCode;

const TABLE1: &str = include_str!("../data/table1.json");

#[derive(Debug, Error)]
pub enum CodebookError {
    #[error("failed to parse codebook: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("failed to read codebook: {0}")]
    Io(#[from] std::io::Error),
    #[error("code {0} appears in more than one entry")]
    DuplicateCode(MotionCode),
    #[error("entry {index} ({code}) has no usable verb labels")]
    EmptyEntry { index: usize, code: MotionCode },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verb {
    /// Label as written in the codebook, qualifier included.
    pub label: String,
    /// Lowercased label without its trailing qualifier.
    key: String,
    pub variant_note: Option<String>,
}

impl Verb {
    pub fn new(label: &str) -> Self {
        let label = label.trim().to_string();
        let (base, note) = split_qualifier(&label);
        Verb {
            key: base.to_lowercase(),
            variant_note: note.map(str::to_string),
            label,
        }
    }

    fn matches(&self, query: &str) -> bool {
        let query = query.trim().to_lowercase();
        self.key == query || self.label.to_lowercase() == query
    }
}

/// Splits `"turn on (button)"` into `("turn on", Some("button"))`.
fn split_qualifier(label: &str) -> (&str, Option<&str>) {
    if let Some(stripped) = label.strip_suffix(')') {
        if let Some(open) = stripped.rfind('(') {
            let base = stripped[..open].trim_end();
            if !base.is_empty() {
                return (base, Some(stripped[open + 1..].trim()));
            }
        }
    }
    (label, None)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodebookEntry {
    pub code: MotionCode,
    pub verbs: Vec<Verb>,
}

#[derive(Serialize, Deserialize)]
struct RawEntry {
    code: MotionCode,
    verbs: Vec<String>,
}

/// One row of a nearest-verb query.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Neighbor {
    pub label: String,
    pub code: MotionCode,
    pub distance: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Codebook {
    entries: Vec<CodebookEntry>,
}

impl Codebook {
    /// The built-in table of twenty kitchen manipulations.
    pub fn builtin() -> Self {
        Self::from_json(TABLE1).expect("embedded codebook is valid")
    }

    /// Raw JSON text of the built-in table.
    pub fn builtin_source() -> &'static str {
        TABLE1
    }

    pub fn load<R: Read>(mut source: R) -> Result<Self, CodebookError> {
        let mut text = String::new();
        source.read_to_string(&mut text)?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, CodebookError> {
        let raw: Vec<RawEntry> = serde_json::from_str(text)?;
        Self::from_entries(
            raw.into_iter()
                .map(|r| CodebookEntry {
                    code: r.code,
                    verbs: r.verbs.iter().map(|v| Verb::new(v)).collect(),
                })
                .collect(),
        )
    }

    pub fn from_entries(entries: Vec<CodebookEntry>) -> Result<Self, CodebookError> {
        let mut seen = HashSet::new();
        for (index, entry) in entries.iter().enumerate() {
            if entry.verbs.is_empty() || entry.verbs.iter().any(|v| v.label.is_empty()) {
                return Err(CodebookError::EmptyEntry {
                    index,
                    code: entry.code,
                });
            }
            if !seen.insert(entry.code) {
                return Err(CodebookError::DuplicateCode(entry.code));
            }
        }
        Ok(Codebook { entries })
    }

    /// Writes the codebook in the same JSON layout it is loaded from, one
    /// entry per line.
    pub fn save<W: Write>(&self, mut sink: W) -> Result<(), CodebookError> {
        writeln!(sink, "[")?;
        for (i, entry) in self.entries.iter().enumerate() {
            let raw = RawEntry {
                code: entry.code,
                verbs: entry.verbs.iter().map(|v| v.label.clone()).collect(),
            };
            let sep = if i + 1 < self.entries.len() { "," } else { "" };
            writeln!(sink, "  {}{sep}", serde_json::to_string(&raw)?)?;
        }
        writeln!(sink, "]")?;
        Ok(())
    }

    pub fn entries(&self) -> &[CodebookEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn codes(&self) -> Vec<MotionCode> {
        self.entries.iter().map(|e| e.code).collect()
    }

    pub fn verb_count(&self) -> usize {
        self.entries.iter().map(|e| e.verbs.len()).sum()
    }

    /// Every code listing `verb`, with that listing's variant note.
    pub fn codes_for(&self, verb: &str) -> Vec<(MotionCode, Option<String>)> {
        self.entries
            .iter()
            .filter_map(|entry| {
                entry
                    .verbs
                    .iter()
                    .find(|v| v.matches(verb))
                    .map(|v| (entry.code, v.variant_note.clone()))
            })
            .collect()
    }

    pub fn verbs_for(&self, code: &MotionCode) -> Vec<String> {
        self.entries
            .iter()
            .find(|e| e.code == *code)
            .map(|e| e.verbs.iter().map(|v| v.label.clone()).collect())
            .unwrap_or_default()
    }

    /// Verb labels ranked by Hamming distance of their code to `query`.
    ///
    /// Ties are broken by code value and then by label. Entries expand to one
    /// row per verb before the ranking is cut to `k` rows.
    pub fn nearest_verbs(&self, query: &MotionCode, k: usize) -> Vec<Neighbor> {
        let mut rows: Vec<Neighbor> = self
            .entries
            .iter()
            .flat_map(|entry| {
                let distance = hamming(query, &entry.code);
                entry.verbs.iter().map(move |v| Neighbor {
                    label: v.label.clone(),
                    code: entry.code,
                    distance,
                })
            })
            .collect();
        rows.sort_by(|a, b| {
            a.distance
                .cmp(&b.distance)
                .then(a.code.value().cmp(&b.code.value()))
                .then_with(|| a.label.cmp(&b.label))
        });
        rows.truncate(k);
        rows
    }
}
