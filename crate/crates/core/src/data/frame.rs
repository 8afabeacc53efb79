//! The immutable numeric feature matrix handed to the detectors.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::data::table::{Cell, RawTable};
use crate::error::{Error, Result};

/// Award identifier read from the configured ID column.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RecordId(String);

impl RecordId {
    pub fn new(id: impl Into<String>) -> Self {
        RecordId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl std::fmt::Display for RecordId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

/// Per-column summary recorded when a frame is constructed. For scaled
/// frames these describe the column *before* scaling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ColumnStats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

/// Immutable n×p matrix of finite feature values with aligned record ids.
/// Safe to share across threads once built.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureFrame {
    ids: Vec<RecordId>,
    columns: Vec<String>,
    values: Vec<f64>, // row-major, n * p
    stats: Vec<ColumnStats>,
}

impl FeatureFrame {
    /// Build a frame from per-record rows, computing stats from the values.
    pub fn from_rows(
        ids: Vec<RecordId>,
        columns: Vec<String>,
        rows: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let p = columns.len();
        let mut values = Vec::with_capacity(rows.len() * p);
        for row in &rows {
            if row.len() != p {
                return Err(Error::InvalidConfig {
                    message: format!("row has {} values, expected {p}", row.len()),
                });
            }
            values.extend_from_slice(row);
        }
        let stats = column_stats(&values, rows.len(), p, &columns)?;
        Self::assemble(ids, columns, values, stats)
    }

    fn assemble(
        ids: Vec<RecordId>,
        columns: Vec<String>,
        values: Vec<f64>,
        stats: Vec<ColumnStats>,
    ) -> Result<Self> {
        let n = ids.len();
        let p = columns.len();
        if n < 2 {
            return Err(Error::TooFewRecords { found: n });
        }
        if p == 0 {
            return Err(Error::InvalidConfig {
                message: "a feature frame needs at least one column".into(),
            });
        }
        if values.len() != n * p {
            return Err(Error::InvalidConfig {
                message: "value buffer does not match ids × columns".into(),
            });
        }
        let mut seen = BTreeSet::new();
        let mut duplicates = BTreeSet::new();
        for id in &ids {
            if id.as_str().is_empty() {
                return Err(Error::EmptyRecordId { row: 0 });
            }
            if !seen.insert(id.as_str()) {
                duplicates.insert(id.as_str().to_string());
            }
        }
        if !duplicates.is_empty() {
            return Err(Error::DuplicateRecordIds {
                ids: duplicates.into_iter().collect(),
            });
        }
        Ok(FeatureFrame {
            ids,
            columns,
            values,
            stats,
        })
    }

    pub fn n_records(&self) -> usize {
        self.ids.len()
    }

    pub fn n_features(&self) -> usize {
        self.columns.len()
    }

    pub fn ids(&self) -> &[RecordId] {
        &self.ids
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn stats(&self) -> &[ColumnStats] {
        &self.stats
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let p = self.n_features();
        &self.values[i * p..(i + 1) * p]
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n_features() + j]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Column `j` as an owned vector.
    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n_records()).map(|i| self.value(i, j)).collect()
    }

    pub fn index_of(&self, id: &RecordId) -> Option<usize> {
        self.ids.iter().position(|x| x == id)
    }
}

fn column_stats(
    values: &[f64],
    n: usize,
    p: usize,
    columns: &[String],
) -> Result<Vec<ColumnStats>> {
    let mut stats = Vec::with_capacity(p);
    for j in 0..p {
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        let mut sum = 0.0;
        for i in 0..n {
            let v = values[i * p + j];
            if !v.is_finite() {
                return Err(Error::NonFiniteInput {
                    column: columns[j].clone(),
                    row: i,
                });
            }
            min = min.min(v);
            max = max.max(v);
            sum += v;
        }
        stats.push(ColumnStats {
            min,
            max,
            mean: sum / n as f64,
        });
    }
    Ok(stats)
}

/// Map every column of a fully-imputed table into [0, 1] via
/// `(x - min) / (max - min)`. Constant columns become all zeros. The
/// pre-scaled per-column min/max/mean are recorded in the frame's stats.
pub fn minmax_scale(table: &RawTable, ids: &[RecordId]) -> Result<FeatureFrame> {
    let n = table.n_rows();
    let p = table.n_cols();
    if ids.len() != n {
        return Err(Error::InvalidConfig {
            message: format!("{} ids for {n} rows", ids.len()),
        });
    }

    let mut raw = Vec::with_capacity(n * p);
    for (i, row) in table.rows().iter().enumerate() {
        for (j, cell) in row.iter().enumerate() {
            match cell {
                Cell::Missing => {
                    return Err(Error::UnimputedMissing {
                        column: table.headers()[j].clone(),
                    })
                }
                Cell::Value(v) if !v.is_finite() => {
                    return Err(Error::NonFiniteInput {
                        column: table.headers()[j].clone(),
                        row: i,
                    })
                }
                Cell::Value(v) => raw.push(*v),
            }
        }
    }

    let stats = column_stats(&raw, n, p, table.headers())?;
    let mut scaled = vec![0.0f64; n * p];
    for j in 0..p {
        let ColumnStats { min, max, .. } = stats[j];
        let range = max - min;
        if range > 0.0 {
            for i in 0..n {
                scaled[i * p + j] = (raw[i * p + j] - min) / range;
            }
        }
        // range == 0: constant column stays all zeros
    }

    FeatureFrame::assemble(
        ids.to_vec(),
        table.headers().to_vec(),
        scaled,
        stats,
    )
}
