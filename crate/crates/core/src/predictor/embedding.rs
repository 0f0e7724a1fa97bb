use std::collections::HashMap;
use std::io::{BufRead, Write};

use super::PredictorError;

/// Fixed word vectors keyed by lowercase token.
///
/// The text format is one `token v1 v2 ... vd` entry per line, optionally
/// preceded by a `<count> <dim>` header line.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    dim: usize,
    tokens: Vec<String>,
    index: HashMap<String, usize>,
    vectors: Vec<f64>,
}

/// Mean noun vector plus the number of tokens that had no entry.
#[derive(Debug, Clone, PartialEq)]
pub struct NounEmbedding {
    pub vector: Vec<f64>,
    pub unknown: usize,
}

impl EmbeddingTable {
    pub fn new(dim: usize) -> Self {
        EmbeddingTable {
            dim,
            tokens: Vec::new(),
            index: HashMap::new(),
            vectors: Vec::new(),
        }
    }

    pub fn insert(&mut self, token: &str, vector: &[f64]) -> Result<(), PredictorError> {
        super::check_dim(&format!("embedding of {token:?}"), self.dim, vector.len())?;
        let token = token.to_lowercase();
        if self.index.contains_key(&token) {
            return Err(PredictorError::InvalidConfig(format!(
                "duplicate embedding token {token:?}"
            )));
        }
        self.index.insert(token.clone(), self.tokens.len());
        self.tokens.push(token);
        self.vectors.extend_from_slice(vector);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Tokens in insertion (file) order.
    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn get(&self, token: &str) -> Option<&[f64]> {
        let i = *self.index.get(&token.to_lowercase())?;
        Some(&self.vectors[i * self.dim..(i + 1) * self.dim])
    }

    /// Averages the vectors of the known tokens. Unknown tokens are counted
    /// and skipped; with no known token the result is the zero vector.
    pub fn embed(&self, nouns: &[String]) -> NounEmbedding {
        let mut vector = vec![0.0; self.dim];
        let mut known = 0usize;
        for noun in nouns {
            if let Some(v) = self.get(noun) {
                vector.iter_mut().zip(v).for_each(|(acc, x)| *acc += x);
                known += 1;
            }
        }
        if known > 1 {
            vector.iter_mut().for_each(|x| *x /= known as f64);
        }
        NounEmbedding {
            vector,
            unknown: nouns.len() - known,
        }
    }

    pub fn from_text<R: BufRead>(reader: R) -> Result<Self, PredictorError> {
        let mut table: Option<EmbeddingTable> = None;
        let mut declared: Option<(usize, usize)> = None;
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let lineno = i + 1;
            let cols: Vec<&str> = line.split_whitespace().collect();
            if cols.is_empty() {
                continue;
            }
            if table.is_none() && declared.is_none() && cols.len() == 2 {
                if let (Ok(count), Ok(dim)) = (cols[0].parse::<usize>(), cols[1].parse::<usize>()) {
                    declared = Some((count, dim));
                    continue;
                }
            }
            if cols.len() < 2 {
                return Err(PredictorError::Format {
                    line: lineno,
                    message: "expected a token followed by at least one value".into(),
                });
            }
            let values = cols[1..]
                .iter()
                .map(|v| v.parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| PredictorError::Format {
                    line: lineno,
                    message: format!("bad vector component: {e}"),
                })?;
            let table = table.get_or_insert_with(|| {
                EmbeddingTable::new(declared.map_or(values.len(), |(_, d)| d))
            });
            table.insert(cols[0], &values).map_err(|e| PredictorError::Format {
                line: lineno,
                message: e.to_string(),
            })?;
        }
        let table = table.unwrap_or_else(|| EmbeddingTable::new(declared.map_or(0, |(_, d)| d)));
        if let Some((count, _)) = declared {
            if count != table.len() {
                return Err(PredictorError::Format {
                    line: 1,
                    message: format!("header declares {count} entries, found {}", table.len()),
                });
            }
        }
        Ok(table)
    }

    /// Writes the table with a `<count> <dim>` header.
    pub fn write_text<W: Write>(&self, mut out: W) -> Result<(), PredictorError> {
        writeln!(out, "{} {}", self.len(), self.dim)?;
        for (i, token) in self.tokens.iter().enumerate() {
            write!(out, "{token}")?;
            for v in &self.vectors[i * self.dim..(i + 1) * self.dim] {
                write!(out, " {v}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}
