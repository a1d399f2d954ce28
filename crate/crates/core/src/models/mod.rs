//! Four from-scratch binary classifiers behind one contract: fit on a
//! labeled [`FeatureMatrix`], predict class-1 probabilities and labels for
//! new rows.
//!
//! Probability semantics are shared (P(ddos) in [0,1]) but each model keeps
//! its own label rule: GBT and the linear model threshold at `p >= 0.5`, KNN
//! resolves vote ties by summed neighbor distance then class 0, and the
//! Gaussian model takes the posterior argmax with ties going to class 0.

mod gbt;
mod gnb;
mod knn;
mod sgd;

pub use gbt::{fit_gbt, logistic_grad_hess, logistic_loss, GbtModel, GbtParams, Node, Tree};
pub use gnb::{fit_gnb, GnbModel};
pub use knn::{fit_knn, KnnModel, KnnPrediction};
pub use sgd::{fit_sgd, sample_gradient, sample_loss, SgdConfig, SgdLinearModel};

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flowdata::FeatureMatrix;
use crate::preprocess::{FeatureMask, ScalerParams};

pub(crate) fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Validate that a training matrix has usable 0/1 labels, returning them.
pub(crate) fn binary_labels(m: &FeatureMatrix) -> Result<&[u8]> {
    let labels = m
        .labels()
        .ok_or_else(|| Error::Fit("training matrix has no labels".into()))?;
    if labels.is_empty() {
        return Err(Error::Fit("training matrix has no rows".into()));
    }
    if let Some(&bad) = labels.iter().find(|&&l| l > 1) {
        return Err(Error::Fit(format!("non-binary label {bad}")));
    }
    Ok(labels)
}

pub(crate) fn check_width(expected: usize, m: &FeatureMatrix) -> Result<()> {
    if m.n_cols() != expected {
        return Err(Error::Shape {
            expected,
            actual: m.n_cols(),
        });
    }
    Ok(())
}

/// Any of the four fitted classifiers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TrainedModel {
    Gbt(GbtModel),
    Knn(KnnModel),
    SgdLinear(SgdLinearModel),
    GaussianNb(GnbModel),
}

impl TrainedModel {
    /// Report/display name; these exact strings appear in benchmark output.
    pub fn display_name(&self) -> &'static str {
        match self {
            TrainedModel::Gbt(_) => "GBT",
            TrainedModel::Knn(_) => "KNN",
            TrainedModel::SgdLinear(_) => "SGD-Linear",
            TrainedModel::GaussianNb(_) => "GaussianNB",
        }
    }

    /// Per-row probability of the positive (ddos) class.
    pub fn predict_proba(&self, rows: &FeatureMatrix) -> Result<Vec<f64>> {
        match self {
            TrainedModel::Gbt(m) => m.predict_proba(rows),
            TrainedModel::Knn(m) => Ok(m.predict(rows)?.into_iter().map(|p| p.prob).collect()),
            TrainedModel::SgdLinear(m) => m.predict_proba(rows),
            TrainedModel::GaussianNb(m) => {
                Ok(m.predict_posteriors(rows)?.into_iter().map(|p| p[1]).collect())
            }
        }
    }

    /// Per-row predicted labels under each model's own decision rule.
    pub fn predict_labels(&self, rows: &FeatureMatrix) -> Result<Vec<u8>> {
        match self {
            TrainedModel::Gbt(m) => Ok(threshold_labels(&m.predict_proba(rows)?)),
            TrainedModel::Knn(m) => Ok(m.predict(rows)?.into_iter().map(|p| p.label).collect()),
            TrainedModel::SgdLinear(m) => Ok(threshold_labels(&m.predict_proba(rows)?)),
            TrainedModel::GaussianNb(m) => Ok(m
                .predict_posteriors(rows)?
                .into_iter()
                .map(|p| if p[1] > p[0] { 1 } else { 0 })
                .collect()),
        }
    }
}

/// `p >= 0.5` decision rule shared by the logit-scale models.
pub fn threshold_labels(probs: &[f64]) -> Vec<u8> {
    probs.iter().map(|&p| u8::from(p >= 0.5)).collect()
}

/// Self-describing trained-model document: model kind, hyperparameters, and
/// fitted state, plus the feature mask, scaler, and seed it was trained
/// with. Round-trips losslessly through JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelArtifact {
    pub model: TrainedModel,
    pub feature_mask: FeatureMask,
    pub scaler: ScalerParams,
    pub seed: u64,
}

impl ModelArtifact {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<ModelArtifact> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        crate::fs_util::write_atomic(path, self.to_json()?.as_bytes())
    }

    pub fn load(path: &Path) -> Result<ModelArtifact> {
        let text = std::fs::read_to_string(path)?;
        ModelArtifact::from_json(&text)
    }

    /// Apply this artifact's mask and scaler to a full-width matrix, yielding
    /// rows the model can consume. The matrix must have the same width as
    /// the data the artifact was trained on.
    pub fn prepare(&self, m: &FeatureMatrix) -> Result<FeatureMatrix> {
        check_width(self.feature_mask.scores.len(), m)?;
        let selected = m.select_columns(&self.feature_mask.kept)?;
        crate::preprocess::transform_minmax(&self.scaler, &selected)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigmoid_basics() {
        assert_eq!(sigmoid(0.0), 0.5);
        assert!((sigmoid(2.0) - 0.8807970779778823).abs() < 1e-15);
        assert!((sigmoid(-2.0) - (1.0 - 0.8807970779778823)).abs() < 1e-15);
    }

    #[test]
    fn threshold_is_inclusive_at_half() {
        assert_eq!(threshold_labels(&[0.499, 0.5, 0.501]), vec![0, 1, 1]);
    }
}
