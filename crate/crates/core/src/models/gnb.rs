//! Gaussian naive Bayes with per-class diagonal Gaussians.
//!
//! Likelihoods are evaluated in log space and normalized with log-sum-exp,
//! so the evidence term cancels without underflow. Population variances get
//! an additive smoothing floor proportional to the largest per-feature
//! variance of the whole training set, which keeps constant features from
//! producing degenerate densities.

use serde::{Deserialize, Serialize};

use super::{binary_labels, check_width};
use crate::error::{Error, Result};
use crate::flowdata::FeatureMatrix;

const SMOOTHING_RATIO: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GnbModel {
    /// P(class 0), P(class 1); sums to 1.
    pub priors: [f64; 2],
    pub means: [Vec<f64>; 2],
    /// Smoothed population variances, always >= `var_smoothing`.
    pub variances: [Vec<f64>; 2],
    pub var_smoothing: f64,
}

pub fn fit_gnb(train: &FeatureMatrix) -> Result<GnbModel> {
    let labels = binary_labels(train)?;
    let n = train.n_rows();
    let n_cols = train.n_cols();
    let count1 = labels.iter().filter(|&&l| l == 1).count();
    let count0 = n - count1;
    if count0 == 0 || count1 == 0 {
        return Err(Error::Fit(format!(
            "both classes must be present; got {count0} benign and {count1} ddos rows"
        )));
    }
    let counts = [count0 as f64, count1 as f64];

    let mut means = [vec![0.0; n_cols], vec![0.0; n_cols]];
    for (row, &l) in train.rows().zip(labels) {
        for (c, &v) in row.iter().enumerate() {
            means[l as usize][c] += v;
        }
    }
    for k in 0..2 {
        for m in means[k].iter_mut() {
            *m /= counts[k];
        }
    }

    let mut variances = [vec![0.0; n_cols], vec![0.0; n_cols]];
    for (row, &l) in train.rows().zip(labels) {
        for (c, &v) in row.iter().enumerate() {
            let d = v - means[l as usize][c];
            variances[l as usize][c] += d * d;
        }
    }
    for k in 0..2 {
        for v in variances[k].iter_mut() {
            *v /= counts[k];
        }
    }

    // smoothing floor from the pooled per-feature variance of all rows
    let mut overall_mean = vec![0.0; n_cols];
    for row in train.rows() {
        for (c, &v) in row.iter().enumerate() {
            overall_mean[c] += v;
        }
    }
    for m in overall_mean.iter_mut() {
        *m /= n as f64;
    }
    let mut max_var = 0.0f64;
    for c in 0..n_cols {
        let var = train
            .column(c)
            .map(|v| {
                let d = v - overall_mean[c];
                d * d
            })
            .sum::<f64>()
            / n as f64;
        max_var = max_var.max(var);
    }
    let var_smoothing = if max_var > 0.0 {
        SMOOTHING_RATIO * max_var
    } else {
        SMOOTHING_RATIO
    };
    for k in 0..2 {
        for v in variances[k].iter_mut() {
            *v += var_smoothing;
        }
    }

    Ok(GnbModel {
        priors: [counts[0] / n as f64, counts[1] / n as f64],
        means,
        variances,
        var_smoothing,
    })
}

impl GnbModel {
    /// Posterior [P(benign|x), P(ddos|x)] per row, normalized to sum to 1.
    pub fn predict_posteriors(&self, rows: &FeatureMatrix) -> Result<Vec<[f64; 2]>> {
        check_width(self.means[0].len(), rows)?;
        const LN_2PI: f64 = 1.8378770664093453;
        Ok(rows
            .rows()
            .map(|row| {
                let mut log_post = [0.0f64; 2];
                for k in 0..2 {
                    let mut ll = self.priors[k].ln();
                    for (c, &x) in row.iter().enumerate() {
                        let var = self.variances[k][c];
                        let d = x - self.means[k][c];
                        ll += -0.5 * (LN_2PI + var.ln()) - d * d / (2.0 * var);
                    }
                    log_post[k] = ll;
                }
                let max = log_post[0].max(log_post[1]);
                let e0 = (log_post[0] - max).exp();
                let e1 = (log_post[1] - max).exp();
                [e0 / (e0 + e1), e1 / (e0 + e1)]
            })
            .collect())
    }
}
