//! Gradient-boosted regression trees on the binary logistic loss.
//!
//! Each round fits one tree to the per-row gradient `p - y` and hessian
//! `p(1-p)` at the current logits. Trees grow by exact greedy split search:
//! candidate thresholds are midpoints between consecutive distinct sorted
//! feature values, a split scores
//! `gain = 1/2 [G_L^2/(H_L+lambda) + G_R^2/(H_R+lambda) - G^2/(H+lambda)] - gamma`,
//! and growth stops at `max_depth`, non-positive gain, or a child hessian
//! sum below `min_child_weight`. Leaves carry `w = -G/(H+lambda)` in logit
//! units; predictions are `sigmoid(base + learning_rate * sum of leaves)`.
//!
//! Everything is deterministic: split ties resolve to the lowest feature
//! index and the per-feature scans run in a fixed order, so parallel split
//! search cannot change the result.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{binary_labels, check_width, sigmoid};
use crate::error::{Error, Result};
use crate::flowdata::FeatureMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GbtParams {
    pub n_rounds: usize,
    pub max_depth: usize,
    pub learning_rate: f64,
    /// L2 penalty on leaf weights.
    pub lambda: f64,
    /// Flat penalty per split.
    pub gamma: f64,
    /// Minimum hessian sum allowed in a child.
    pub min_child_weight: f64,
}

impl Default for GbtParams {
    fn default() -> Self {
        GbtParams {
            n_rounds: 100,
            max_depth: 6,
            learning_rate: 0.3,
            lambda: 1.0,
            gamma: 0.0,
            min_child_weight: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Node {
    Branch {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        weight: f64,
    },
}

/// One regression tree stored as an arena; node 0 is the root. Rows with
/// `row[feature] < threshold` descend left.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    pub fn output(&self, row: &[f64]) -> f64 {
        let mut idx = 0;
        loop {
            match &self.nodes[idx] {
                Node::Leaf { weight } => return *weight,
                Node::Branch {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    idx = if row[*feature] < *threshold {
                        *left
                    } else {
                        *right
                    };
                }
            }
        }
    }

    /// Longest root-to-leaf edge count; 0 for a lone leaf.
    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], idx: usize) -> usize {
            match &nodes[idx] {
                Node::Leaf { .. } => 0,
                Node::Branch { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, 0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GbtModel {
    pub trees: Vec<Tree>,
    pub base_logit: f64,
    pub params: GbtParams,
    pub feature_count: usize,
}

/// Binary logistic loss at a raw logit, in a form that stays finite for
/// large |logit|.
pub fn logistic_loss(logit: f64, y: f64) -> f64 {
    logit.max(0.0) - logit * y + (-logit.abs()).exp().ln_1p()
}

/// Gradient and hessian of [`logistic_loss`] with respect to the logit:
/// `(p - y, p(1-p))`. These drive every boosting round.
pub fn logistic_grad_hess(logit: f64, y: f64) -> (f64, f64) {
    let p = sigmoid(logit);
    (p - y, p * (1.0 - p))
}

#[derive(Clone, Copy)]
struct Candidate {
    gain: f64,
    feature: usize,
    threshold: f64,
}

struct Grower<'a> {
    data: &'a FeatureMatrix,
    grad: &'a [f64],
    hess: &'a [f64],
    params: &'a GbtParams,
}

impl Grower<'_> {
    fn grow(&self) -> Tree {
        let rows: Vec<usize> = (0..self.data.n_rows()).collect();
        let mut nodes = Vec::new();
        self.build(&mut nodes, rows, 0);
        Tree { nodes }
    }

    fn build(&self, nodes: &mut Vec<Node>, rows: Vec<usize>, depth: usize) -> usize {
        let g_total: f64 = rows.iter().map(|&r| self.grad[r]).sum();
        let h_total: f64 = rows.iter().map(|&r| self.hess[r]).sum();

        let best = if depth >= self.params.max_depth || rows.len() < 2 {
            None
        } else {
            self.best_split(&rows, g_total, h_total)
        };

        match best {
            Some(c) if c.gain > 0.0 => {
                let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows
                    .iter()
                    .partition(|&&r| self.data.row(r)[c.feature] < c.threshold);
                let idx = nodes.len();
                nodes.push(Node::Leaf { weight: 0.0 }); // placeholder
                let left = self.build(nodes, left_rows, depth + 1);
                let right = self.build(nodes, right_rows, depth + 1);
                nodes[idx] = Node::Branch {
                    feature: c.feature,
                    threshold: c.threshold,
                    left,
                    right,
                };
                idx
            }
            _ => {
                nodes.push(Node::Leaf {
                    weight: -g_total / (h_total + self.params.lambda),
                });
                nodes.len() - 1
            }
        }
    }

    fn best_split(&self, rows: &[usize], g_total: f64, h_total: f64) -> Option<Candidate> {
        let per_feature: Vec<Option<Candidate>> = (0..self.data.n_cols())
            .into_par_iter()
            .map(|feature| self.best_split_for_feature(feature, rows, g_total, h_total))
            .collect();
        // strict > keeps the lowest feature index on gain ties
        per_feature
            .into_iter()
            .flatten()
            .fold(None, |acc: Option<Candidate>, c| match acc {
                Some(a) if c.gain <= a.gain => Some(a),
                _ => Some(c),
            })
    }

    fn best_split_for_feature(
        &self,
        feature: usize,
        rows: &[usize],
        g_total: f64,
        h_total: f64,
    ) -> Option<Candidate> {
        let lambda = self.params.lambda;
        let mut vals: Vec<(f64, usize)> = rows
            .iter()
            .map(|&r| (self.data.row(r)[feature], r))
            .collect();
        vals.sort_unstable_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));

        let parent_score = g_total * g_total / (h_total + lambda);
        let mut g_left = 0.0f64;
        let mut h_left = 0.0f64;
        let mut best: Option<Candidate> = None;
        for i in 0..vals.len() - 1 {
            g_left += self.grad[vals[i].1];
            h_left += self.hess[vals[i].1];
            if vals[i].0 == vals[i + 1].0 {
                continue; // not a boundary between distinct values
            }
            let h_right = h_total - h_left;
            if h_left < self.params.min_child_weight || h_right < self.params.min_child_weight {
                continue;
            }
            let g_right = g_total - g_left;
            let gain = 0.5
                * (g_left * g_left / (h_left + lambda) + g_right * g_right / (h_right + lambda)
                    - parent_score)
                - self.params.gamma;
            if best.is_none_or(|b| gain > b.gain) {
                let lo = vals[i].0;
                let hi = vals[i + 1].0;
                // midpoint, nudged right if rounding collapsed it onto lo so
                // that `x < threshold` reproduces the scanned partition
                let mut threshold = lo + (hi - lo) * 0.5;
                if threshold <= lo {
                    threshold = hi;
                }
                best = Some(Candidate {
                    gain,
                    feature,
                    threshold,
                });
            }
        }
        best
    }
}

pub fn fit_gbt(train: &FeatureMatrix, params: &GbtParams) -> Result<GbtModel> {
    let labels = binary_labels(train)?;
    let n = train.n_rows();
    let y: Vec<f64> = labels.iter().map(|&l| l as f64).collect();
    let mut logits = vec![0.0f64; n]; // base probability 0.5
    let mut grad = vec![0.0f64; n];
    let mut hess = vec![0.0f64; n];
    let mut trees = Vec::with_capacity(params.n_rounds);

    for _ in 0..params.n_rounds {
        for i in 0..n {
            let (g, h) = logistic_grad_hess(logits[i], y[i]);
            grad[i] = g;
            hess[i] = h;
        }
        let tree = Grower {
            data: train,
            grad: &grad,
            hess: &hess,
            params,
        }
        .grow();
        for (i, logit) in logits.iter_mut().enumerate() {
            *logit += params.learning_rate * tree.output(train.row(i));
        }
        trees.push(tree);
    }

    Ok(GbtModel {
        trees,
        base_logit: 0.0,
        params: *params,
        feature_count: train.n_cols(),
    })
}

impl GbtModel {
    /// Probability of class 1 using all trees.
    pub fn predict_proba(&self, rows: &FeatureMatrix) -> Result<Vec<f64>> {
        self.predict_proba_prefix(rows, self.trees.len())
    }

    /// Probability of class 1 using only the first `n_trees` trees; useful
    /// for inspecting the per-round trajectory.
    pub fn predict_proba_prefix(&self, rows: &FeatureMatrix, n_trees: usize) -> Result<Vec<f64>> {
        check_width(self.feature_count, rows)?;
        if n_trees > self.trees.len() {
            return Err(Error::Argument(format!(
                "model has {} trees, requested {n_trees}",
                self.trees.len()
            )));
        }
        let row_vec: Vec<&[f64]> = rows.rows().collect();
        Ok(row_vec
            .par_iter()
            .map(|row| {
                let sum: f64 = self.trees[..n_trees].iter().map(|t| t.output(row)).sum();
                sigmoid(self.base_logit + self.params.learning_rate * sum)
            })
            .collect())
    }
}
