//! Binary confusion matrix and the four evaluation metrics, with ddos (1) as
//! the positive class. Values are fractions in [0,1]; percent rendering is a
//! reporting concern.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: usize,
    pub tn: usize,
    pub fp: usize,
    pub r#fn: usize,
}

impl ConfusionMatrix {
    pub fn total(&self) -> usize {
        self.tp + self.tn + self.fp + self.r#fn
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Count the four-way truth/prediction cross. Inputs must be equal-length,
/// non-empty 0/1 vectors.
pub fn confusion(truth: &[u8], pred: &[u8]) -> Result<ConfusionMatrix> {
    if truth.is_empty() {
        return Err(Error::Argument("empty label vectors".into()));
    }
    if truth.len() != pred.len() {
        return Err(Error::Argument(format!(
            "label length mismatch: {} truth vs {} predicted",
            truth.len(),
            pred.len()
        )));
    }
    let mut cm = ConfusionMatrix {
        tp: 0,
        tn: 0,
        fp: 0,
        r#fn: 0,
    };
    for (i, (&t, &p)) in truth.iter().zip(pred).enumerate() {
        match (t, p) {
            (1, 1) => cm.tp += 1,
            (0, 0) => cm.tn += 1,
            (0, 1) => cm.fp += 1,
            (1, 0) => cm.r#fn += 1,
            _ => {
                return Err(Error::Argument(format!(
                    "non-binary entry at index {i}: truth={t}, pred={p}"
                )))
            }
        }
    }
    Ok(cm)
}

// 0/0 denominators yield 0.0 by convention.
fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Accuracy, precision, recall, and F1 for the positive class.
pub fn report(cm: &ConfusionMatrix) -> MetricReport {
    let accuracy = ratio(cm.tp + cm.tn, cm.total());
    let precision = ratio(cm.tp, cm.tp + cm.fp);
    let recall = ratio(cm.tp, cm.tp + cm.r#fn);
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    MetricReport {
        accuracy,
        precision,
        recall,
        f1,
    }
}
