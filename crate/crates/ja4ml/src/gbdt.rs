//! Gradient-boosted decision trees for binary classification with
//! logistic loss.
//!
//! Second-order boosting: per round, gradients g = p - y and hessians
//! h = p(1 - p) drive an exact greedy split search over sorted unique
//! feature values with midpoint thresholds. Split gain is
//! `0.5 * (GL^2/(HL+l) + GR^2/(HR+l) - (GL+GR)^2/(HL+HR+l))` with l the L2
//! leaf regularizer, and leaf weight is `-G/(H+l)`. Row and column
//! subsampling draw from SplitMix64 so a seed pins the whole model.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::SplitMix64;

const MODEL_FORMAT_VERSION: &str = "ja4ml-gbdt-v1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub n_trees: usize,
    pub max_depth: usize,
    pub learning_rate: f64,
    pub subsample: f64,
    pub colsample: f64,
    pub l2_leaf_reg: f64,
    pub min_split_gain: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            n_trees: 500,
            max_depth: 8,
            learning_rate: 0.05,
            subsample: 0.8,
            colsample: 0.8,
            l2_leaf_reg: 1.0,
            min_split_gain: 0.0,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Node {
    Internal {
        feature_index: usize,
        threshold: f64,
        left: usize,
        right: usize,
        gain: f64,
    },
    Leaf {
        weight: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    /// Raw (unscaled) leaf weight for one row.
    pub fn predict_raw(&self, row: &[f64]) -> f64 {
        let mut idx = 0;
        loop {
            match &self.nodes[idx] {
                Node::Leaf { weight } => return *weight,
                Node::Internal {
                    feature_index,
                    threshold,
                    left,
                    right,
                    ..
                } => {
                    idx = if row[*feature_index] <= *threshold {
                        *left
                    } else {
                        *right
                    };
                }
            }
        }
    }

    /// Longest root-to-leaf path length in internal-node steps.
    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], idx: usize) -> usize {
            match &nodes[idx] {
                Node::Leaf { .. } => 0,
                Node::Internal { left, right, .. } => {
                    1 + walk(nodes, *left).max(walk(nodes, *right))
                }
            }
        }
        walk(&self.nodes, 0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GbdtModel {
    pub format: String,
    pub config: TrainConfig,
    pub base_score: f64,
    pub feature_names: Vec<String>,
    pub trees: Vec<Tree>,
    pub gain_importance: Vec<f64>,
}

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("feature matrix has {rows} rows but {labels} labels")]
    ShapeMismatch { rows: usize, labels: usize },
    #[error("need at least 2 rows, have {0}")]
    TooFewRows(usize),
    #[error("labels must contain both classes")]
    SingleClass,
    #[error("non-finite feature value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },
    #[error("row has {got} columns, expected {expected}")]
    ColumnMismatch { expected: usize, got: usize },
}

#[derive(Debug, Error)]
pub enum ModelIoError {
    #[error("cannot access {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("corrupt model file {path}: {source}")]
    Corrupt {
        path: String,
        source: serde_json::Error,
    },
    #[error("unsupported model format {found:?} (expected {expected:?})")]
    VersionMismatch { found: String, expected: String },
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// One candidate split found by the exact greedy search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitChoice {
    pub feature_index: usize,
    pub threshold: f64,
    pub gain: f64,
}

/// Gain of splitting a node with child statistics (gl, hl) / (gr, hr)
/// under L2 regularizer `lambda`.
pub fn split_gain(gl: f64, hl: f64, gr: f64, hr: f64, lambda: f64) -> f64 {
    0.5 * (gl * gl / (hl + lambda) + gr * gr / (hr + lambda)
        - (gl + gr) * (gl + gr) / (hl + hr + lambda))
}

/// Exact greedy search over the rows of one node. Ties resolve to the
/// lowest feature index, then the lowest threshold.
fn best_split(
    x: &[Vec<f64>],
    grad: &[f64],
    hess: &[f64],
    rows: &[usize],
    features: &[usize],
    lambda: f64,
) -> Option<SplitChoice> {
    let mut best: Option<SplitChoice> = None;
    let mut total_g = 0.0;
    let mut total_h = 0.0;
    for &r in rows {
        total_g += grad[r];
        total_h += hess[r];
    }
    let mut sorted: Vec<(f64, f64, f64)> = Vec::with_capacity(rows.len());
    for &feature in features {
        sorted.clear();
        sorted.extend(rows.iter().map(|&r| (x[r][feature], grad[r], hess[r])));
        sorted.sort_unstable_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

        let mut gl = 0.0;
        let mut hl = 0.0;
        for i in 0..sorted.len() - 1 {
            gl += sorted[i].1;
            hl += sorted[i].2;
            if sorted[i].0 == sorted[i + 1].0 {
                continue;
            }
            let threshold = 0.5 * (sorted[i].0 + sorted[i + 1].0);
            let gain = split_gain(gl, hl, total_g - gl, total_h - hl, lambda);
            if best.map_or(true, |b| gain > b.gain) {
                best = Some(SplitChoice {
                    feature_index: feature,
                    threshold,
                    gain,
                });
            }
        }
    }
    best
}

struct TreeBuilder<'a> {
    x: &'a [Vec<f64>],
    grad: &'a [f64],
    hess: &'a [f64],
    features: &'a [usize],
    config: &'a TrainConfig,
    nodes: Vec<Node>,
    importance: &'a mut [f64],
}

impl TreeBuilder<'_> {
    fn build(&mut self, rows: Vec<usize>, depth: usize) -> usize {
        if depth >= self.config.max_depth || rows.len() < 2 {
            return self.push_leaf(&rows);
        }
        let choice = best_split(
            self.x,
            self.grad,
            self.hess,
            &rows,
            self.features,
            self.config.l2_leaf_reg,
        );
        let choice = match choice {
            Some(c) if c.gain > self.config.min_split_gain && c.gain > 0.0 => c,
            _ => return self.push_leaf(&rows),
        };

        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows
            .iter()
            .partition(|&&r| self.x[r][choice.feature_index] <= choice.threshold);

        self.importance[choice.feature_index] += choice.gain;
        let idx = self.nodes.len();
        self.nodes.push(Node::Internal {
            feature_index: choice.feature_index,
            threshold: choice.threshold,
            left: 0,
            right: 0,
            gain: choice.gain,
        });
        let left = self.build(left_rows, depth + 1);
        let right = self.build(right_rows, depth + 1);
        if let Node::Internal {
            left: l, right: r, ..
        } = &mut self.nodes[idx]
        {
            *l = left;
            *r = right;
        }
        idx
    }

    fn push_leaf(&mut self, rows: &[usize]) -> usize {
        let g: f64 = rows.iter().map(|&r| self.grad[r]).sum();
        let h: f64 = rows.iter().map(|&r| self.hess[r]).sum();
        self.nodes.push(Node::Leaf {
            weight: -g / (h + self.config.l2_leaf_reg),
        });
        self.nodes.len() - 1
    }
}

fn validate(x: &[Vec<f64>], y: &[u8]) -> Result<usize, TrainError> {
    if x.len() != y.len() {
        return Err(TrainError::ShapeMismatch {
            rows: x.len(),
            labels: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(TrainError::TooFewRows(x.len()));
    }
    if y.iter().all(|&v| v == 0) || y.iter().all(|&v| v != 0) {
        return Err(TrainError::SingleClass);
    }
    let cols = x[0].len();
    for (row, values) in x.iter().enumerate() {
        if values.len() != cols {
            return Err(TrainError::ColumnMismatch {
                expected: cols,
                got: values.len(),
            });
        }
        for (col, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(TrainError::NonFinite { row, col });
            }
        }
    }
    Ok(cols)
}

fn logloss(y: &[u8], probs: &[f64]) -> f64 {
    let eps = 1e-15;
    let sum: f64 = y
        .iter()
        .zip(probs)
        .map(|(&label, &p)| {
            let p = p.clamp(eps, 1.0 - eps);
            if label != 0 {
                -p.ln()
            } else {
                -(1.0 - p).ln()
            }
        })
        .sum();
    sum / y.len() as f64
}

/// Trains a model and returns it with the per-round training logloss.
pub fn train(
    x: &[Vec<f64>],
    y: &[u8],
    feature_names: &[String],
    config: &TrainConfig,
) -> Result<(GbdtModel, Vec<f64>), TrainError> {
    let cols = validate(x, y)?;
    assert_eq!(feature_names.len(), cols, "feature name count");
    let n = x.len();

    let positives = y.iter().filter(|&&v| v != 0).count() as f64;
    let rate = positives / n as f64;
    let base_score = (rate / (1.0 - rate)).ln();

    let mut rng = SplitMix64::new(config.seed);
    let mut margins = vec![base_score; n];
    let mut importance = vec![0.0; cols];
    let mut trees = Vec::with_capacity(config.n_trees);
    let mut round_logloss = Vec::with_capacity(config.n_trees);

    let mut grad = vec![0.0; n];
    let mut hess = vec![0.0; n];
    let mut probs = vec![0.0; n];

    for _round in 0..config.n_trees {
        for i in 0..n {
            probs[i] = sigmoid(margins[i]);
            grad[i] = probs[i] - y[i] as f64;
            hess[i] = probs[i] * (1.0 - probs[i]);
        }
        round_logloss.push(logloss(y, &probs));

        // rate 1.0 draws nothing from the generator, so full-sample runs
        // have no seed sensitivity
        let rows: Vec<usize> = if config.subsample < 1.0 {
            let k = ((n as f64 * config.subsample).round() as usize).clamp(1, n);
            rng.sample_indices(n, k)
        } else {
            (0..n).collect()
        };
        let features: Vec<usize> = if config.colsample < 1.0 {
            let k = ((cols as f64 * config.colsample).round() as usize).clamp(1, cols);
            rng.sample_indices(cols, k)
        } else {
            (0..cols).collect()
        };

        let mut builder = TreeBuilder {
            x,
            grad: &grad,
            hess: &hess,
            features: &features,
            config,
            nodes: Vec::new(),
            importance: &mut importance,
        };
        builder.build(rows, 0);
        let tree = Tree {
            nodes: builder.nodes,
        };
        for i in 0..n {
            margins[i] += config.learning_rate * tree.predict_raw(&x[i]);
        }
        trees.push(tree);
    }

    Ok((
        GbdtModel {
            format: MODEL_FORMAT_VERSION.to_string(),
            config: config.clone(),
            base_score,
            feature_names: feature_names.to_vec(),
            trees,
            gain_importance: importance,
        },
        round_logloss,
    ))
}

impl GbdtModel {
    /// Probability of the positive class for each row.
    pub fn predict_proba(&self, x: &[Vec<f64>]) -> Result<Vec<f64>, TrainError> {
        let cols = self.feature_names.len();
        x.iter()
            .map(|row| {
                if row.len() != cols {
                    return Err(TrainError::ColumnMismatch {
                        expected: cols,
                        got: row.len(),
                    });
                }
                let margin: f64 = self
                    .trees
                    .iter()
                    .map(|t| t.predict_raw(row))
                    .sum::<f64>()
                    * self.config.learning_rate
                    + self.base_score;
                Ok(sigmoid(margin))
            })
            .collect()
    }

    /// Per-feature accumulated split gain, descending; ties break on the
    /// lower feature index.
    pub fn feature_importance(&self) -> Vec<(String, f64)> {
        let mut pairs: Vec<(usize, f64)> = self
            .gain_importance
            .iter()
            .copied()
            .enumerate()
            .collect();
        pairs.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
        pairs
            .into_iter()
            .map(|(i, gain)| (self.feature_names[i].clone(), gain))
            .collect()
    }

    pub fn save(&self, path: &Path) -> Result<(), ModelIoError> {
        let mut json = serde_json::to_string_pretty(self).expect("model serializes");
        json.push('\n');
        std::fs::write(path, json).map_err(|source| ModelIoError::Io {
            path: path.display().to_string(),
            source,
        })
    }

    pub fn load(path: &Path) -> Result<Self, ModelIoError> {
        let text = std::fs::read_to_string(path).map_err(|source| ModelIoError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let model: GbdtModel =
            serde_json::from_str(&text).map_err(|source| ModelIoError::Corrupt {
                path: path.display().to_string(),
                source,
            })?;
        if model.format != MODEL_FORMAT_VERSION {
            return Err(ModelIoError::VersionMismatch {
                found: model.format,
                expected: MODEL_FORMAT_VERSION.to_string(),
            });
        }
        Ok(model)
    }
}
