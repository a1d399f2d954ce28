//! Feature selection by label correlation and min-max normalization.
//!
//! Selection scores each column by the magnitude of its Pearson correlation
//! with the 0/1 label (point-biserial). Scaling maps each column through
//! `(x - min) / (max - min)` using statistics fitted on the training split
//! only, so test rows may land outside [0,1]; they are not clamped.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flowdata::FeatureMatrix;

/// Columns kept by [`select_features`], with per-column |r| scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMask {
    /// Kept column indices, strictly increasing, never empty.
    pub kept: Vec<usize>,
    /// |Pearson r| per original column, in [0,1]; 0 for zero-variance columns.
    pub scores: Vec<f64>,
}

/// Per-column training-set min/max.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalerParams {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

fn pearson_with_labels(column: &[f64], labels: &[u8]) -> f64 {
    let n = column.len() as f64;
    let mean_x = column.iter().sum::<f64>() / n;
    let mean_y = labels.iter().map(|&l| l as f64).sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var_x = 0.0;
    let mut var_y = 0.0;
    for (&x, &l) in column.iter().zip(labels) {
        let dx = x - mean_x;
        let dy = l as f64 - mean_y;
        cov += dx * dy;
        var_x += dx * dx;
        var_y += dy * dy;
    }
    if var_x == 0.0 || var_y == 0.0 {
        return 0.0;
    }
    let r = (cov / (var_x.sqrt() * var_y.sqrt())).abs();
    if r.is_finite() {
        r.clamp(0.0, 1.0)
    } else {
        0.0
    }
}

/// Keep columns whose |r| with the label is at least `threshold`. If nothing
/// passes, the single best-scoring column is kept (lowest index on ties).
pub fn select_features(m: &FeatureMatrix, threshold: f64) -> Result<FeatureMask> {
    if !(0.0..1.0).contains(&threshold) {
        return Err(Error::Argument(format!(
            "threshold must be in [0,1), got {threshold}"
        )));
    }
    if m.n_rows() < 2 {
        return Err(Error::Argument(
            "feature selection needs at least 2 rows".into(),
        ));
    }
    let labels = m
        .labels()
        .ok_or_else(|| Error::Argument("matrix has no labels".into()))?;

    let scores: Vec<f64> = (0..m.n_cols())
        .map(|c| {
            let col: Vec<f64> = m.column(c).collect();
            pearson_with_labels(&col, labels)
        })
        .collect();

    let mut kept: Vec<usize> = (0..m.n_cols()).filter(|&c| scores[c] >= threshold).collect();
    if kept.is_empty() {
        let best = scores
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap().then(b.0.cmp(&a.0)))
            .map(|(i, _)| i)
            .unwrap();
        kept.push(best);
    }
    Ok(FeatureMask { kept, scores })
}

/// Per-column min and max over the training rows.
pub fn fit_minmax(train: &FeatureMatrix) -> Result<ScalerParams> {
    if train.n_rows() == 0 {
        return Err(Error::Argument("cannot fit scaler on empty matrix".into()));
    }
    let mut min = vec![f64::INFINITY; train.n_cols()];
    let mut max = vec![f64::NEG_INFINITY; train.n_cols()];
    for row in train.rows() {
        for (c, &v) in row.iter().enumerate() {
            min[c] = min[c].min(v);
            max[c] = max[c].max(v);
        }
    }
    Ok(ScalerParams { min, max })
}

/// Apply `(x - min) / (max - min)` per column. Constant training columns
/// (max == min) map to 0.0; out-of-range values are not clamped.
pub fn transform_minmax(p: &ScalerParams, m: &FeatureMatrix) -> Result<FeatureMatrix> {
    if p.min.len() != m.n_cols() {
        return Err(Error::Shape {
            expected: p.min.len(),
            actual: m.n_cols(),
        });
    }
    let mut values = Vec::with_capacity(m.n_rows() * m.n_cols());
    for row in m.rows() {
        for (c, &x) in row.iter().enumerate() {
            let span = p.max[c] - p.min[c];
            values.push(if span == 0.0 { 0.0 } else { (x - p.min[c]) / span });
        }
    }
    FeatureMatrix::new(
        values,
        m.column_names().to_vec(),
        m.labels().map(|l| l.to_vec()),
    )
}
