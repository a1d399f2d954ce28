//! Logistic regression trained with per-sample stochastic gradient descent.
//!
//! The objective is the binary logistic loss plus an L2 penalty
//! `(l2/2)*||w||^2`; each visited sample applies
//! `w -= lr * ((sigmoid(w.x + b) - y) * x + l2 * w)` and
//! `b -= lr * (sigmoid(w.x + b) - y)`. Row visit order is reshuffled every
//! epoch from a ChaCha8 stream, so training is deterministic per seed.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{binary_labels, check_width, sigmoid};
use crate::error::Result;
use crate::flowdata::FeatureMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SgdConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub l2: f64,
    pub seed: u64,
}

impl Default for SgdConfig {
    fn default() -> Self {
        SgdConfig {
            learning_rate: 0.01,
            epochs: 20,
            l2: 1e-4,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SgdLinearModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub config: SgdConfig,
}

pub fn fit_sgd(train: &FeatureMatrix, cfg: &SgdConfig) -> Result<SgdLinearModel> {
    let labels = binary_labels(train)?;
    let mut weights = vec![0.0f64; train.n_cols()];
    let mut bias = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut order: Vec<usize> = (0..train.n_rows()).collect();

    for _ in 0..cfg.epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            let row = train.row(i);
            let err = residual(&weights, bias, row, labels[i] as f64);
            for (w, &x) in weights.iter_mut().zip(row) {
                *w -= cfg.learning_rate * (err * x + cfg.l2 * *w);
            }
            bias -= cfg.learning_rate * err;
        }
    }
    Ok(SgdLinearModel {
        weights,
        bias,
        config: *cfg,
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

// residual sigma(z) - y shared by the update rule and the gradient helper
fn residual(weights: &[f64], bias: f64, x: &[f64], y: f64) -> f64 {
    sigmoid(bias + dot(weights, x)) - y
}

/// Regularized logistic loss of one sample:
/// `-[y ln p + (1-y) ln(1-p)] + (l2/2) ||w||^2` with `p = sigmoid(w.x + b)`,
/// evaluated in a form that stays finite for large |logit|.
pub fn sample_loss(weights: &[f64], bias: f64, x: &[f64], y: f64, l2: f64) -> f64 {
    let z = bias + dot(weights, x);
    // max(z,0) - z*y + ln(1 + e^-|z|)
    let data_term = z.max(0.0) - z * y + (-z.abs()).exp().ln_1p();
    let penalty = 0.5 * l2 * weights.iter().map(|w| w * w).sum::<f64>();
    data_term + penalty
}

/// Analytic gradient of [`sample_loss`]: per-weight partials and the bias
/// partial. This is exactly the update direction [`fit_sgd`] applies.
pub fn sample_gradient(
    weights: &[f64],
    bias: f64,
    x: &[f64],
    y: f64,
    l2: f64,
) -> (Vec<f64>, f64) {
    let err = residual(weights, bias, x, y);
    let grad = weights
        .iter()
        .zip(x)
        .map(|(&w, &xi)| err * xi + l2 * w)
        .collect();
    (grad, err)
}

impl SgdLinearModel {
    pub fn predict_proba(&self, rows: &FeatureMatrix) -> Result<Vec<f64>> {
        check_width(self.weights.len(), rows)?;
        Ok(rows
            .rows()
            .map(|row| sigmoid(self.bias + dot(&self.weights, row)))
            .collect())
    }
}
