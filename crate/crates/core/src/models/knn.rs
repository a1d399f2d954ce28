//! k-nearest-neighbors classification by exact brute-force scan.
//!
//! Neighbors are ranked by Euclidean distance with ties broken by lower
//! training index, so the neighbor set is fully deterministic. Queries run
//! in parallel; per-query work is sequential, which keeps results identical
//! regardless of thread count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{binary_labels, check_width};
use crate::error::{Error, Result};
use crate::flowdata::FeatureMatrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnModel {
    pub k: usize,
    /// Training rows, stored verbatim.
    pub points: FeatureMatrix,
    pub labels: Vec<u8>,
}

/// One query result: majority label and the class-1 vote fraction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KnnPrediction {
    pub label: u8,
    pub prob: f64,
}

pub fn fit_knn(train: &FeatureMatrix, k: usize) -> Result<KnnModel> {
    let labels = binary_labels(train)?;
    if k == 0 || k > train.n_rows() {
        return Err(Error::Fit(format!(
            "k must be in [1, {}], got {k}",
            train.n_rows()
        )));
    }
    Ok(KnnModel {
        k,
        points: train.clone(),
        labels: labels.to_vec(),
    })
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

impl KnnModel {
    pub fn predict(&self, rows: &FeatureMatrix) -> Result<Vec<KnnPrediction>> {
        check_width(self.points.n_cols(), rows)?;
        let queries: Vec<&[f64]> = rows.rows().collect();
        Ok(queries
            .par_iter()
            .map(|query| self.predict_one(query))
            .collect())
    }

    fn predict_one(&self, query: &[f64]) -> KnnPrediction {
        let mut ranked: Vec<(f64, usize)> = self
            .points
            .rows()
            .enumerate()
            .map(|(i, p)| (euclidean(query, p), i))
            .collect();
        // (distance, training index) is a total order on finite data
        let by_rank =
            |a: &(f64, usize), b: &(f64, usize)| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1));
        if self.k < ranked.len() {
            ranked.select_nth_unstable_by(self.k - 1, by_rank);
            ranked.truncate(self.k);
        }

        let mut votes = [0usize; 2];
        let mut dist_sum = [0.0f64; 2];
        for &(d, i) in &ranked {
            let l = self.labels[i] as usize;
            votes[l] += 1;
            dist_sum[l] += d;
        }
        let label = match votes[1].cmp(&votes[0]) {
            std::cmp::Ordering::Greater => 1,
            std::cmp::Ordering::Less => 0,
            // even-k vote tie: the class whose voters sit closer wins,
            // and class 0 takes exact distance ties
            std::cmp::Ordering::Equal => u8::from(dist_sum[1] < dist_sum[0]),
        };
        KnnPrediction {
            label,
            prob: votes[1] as f64 / self.k as f64,
        }
    }
}
