//! Squared-loss gradient boosting over depth-limited regression trees.
//!
//! Round `r` fits a least-squares tree to the current residuals with exact
//! greedy splits over sorted feature values, then adds it scaled by the
//! learning rate. With least-squares leaves and `0 < eta <= 1` the
//! training error cannot increase from one round to the next.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::stats;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GbtParams {
    pub rounds: usize,
    pub max_depth: usize,
    pub learning_rate: f64,
    pub min_samples_leaf: usize,
    /// Fraction of rows used for training; the rest is held out.
    pub train_fraction: f64,
    /// Required relative improvement of held-out MAE over predicting the
    /// training mean.
    pub gate_improvement: f64,
}

impl Default for GbtParams {
    fn default() -> Self {
        GbtParams {
            rounds: 200,
            max_depth: 4,
            learning_rate: 0.1,
            min_samples_leaf: 1,
            train_fraction: 0.8,
            gate_improvement: 0.2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GbtError {
    #[error("need at least 10 rows, got {0}")]
    TooFewRows(usize),
    #[error("train fraction must lie strictly between 0 and 1")]
    BadSplit,
    #[error("invalid hyperparameters: {0}")]
    BadParams(&'static str),
    #[error("rows have inconsistent feature counts")]
    Ragged,
    #[error("non-finite feature or target value")]
    NonFinite,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Node {
    /// Rows with `x[feature] <= threshold` go left.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
        cover: f64,
    },
    Leaf {
        value: f64,
        cover: f64,
    },
}

impl Node {
    pub fn cover(&self) -> f64 {
        match self {
            Node::Split { cover, .. } | Node::Leaf { cover, .. } => *cover,
        }
    }
}

/// Binary regression tree; node 0 is the root. `cover` counts the training
/// rows that reached each node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionTree {
    pub nodes: Vec<Node>,
}

impl RegressionTree {
    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Leaf { value, .. } => return *value,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                    ..
                } => i = if x[*feature] <= *threshold { *left } else { *right },
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn go(t: &RegressionTree, i: usize) -> usize {
            match &t.nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + go(t, *left).max(go(t, *right)),
            }
        }
        go(self, 0)
    }

    pub fn features_used(&self) -> impl Iterator<Item = usize> + '_ {
        self.nodes.iter().filter_map(|n| match n {
            Node::Split { feature, .. } => Some(*feature),
            Node::Leaf { .. } => None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingMeta {
    pub rounds: usize,
    pub max_depth: usize,
    pub seed: u64,
}

/// `prediction = base + learning_rate * sum(tree outputs)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeEnsembleModel {
    pub feature_names: Vec<String>,
    pub base: f64,
    pub learning_rate: f64,
    pub trees: Vec<RegressionTree>,
    pub meta: TrainingMeta,
}

impl TreeEnsembleModel {
    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        self.base + self.learning_rate * self.trees.iter().map(|t| t.predict(x)).sum::<f64>()
    }
}

/// A trained model with its learning curve, held-out error and quality gate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub model: TreeEnsembleModel,
    /// Training RMSE after round 0 (base only) and after every tree.
    pub train_rmse: Vec<f64>,
    pub test_mae: f64,
    /// Held-out MAE of always predicting the training mean.
    pub baseline_mae: f64,
    pub passed_gate: bool,
    pub train_rows: Vec<usize>,
    pub test_rows: Vec<usize>,
}

/// Seeded 80/20-style split of `0..n` at the row level.
pub fn split_rows(n: usize, train_fraction: f64, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut idx: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        idx.swap(i, j);
    }
    let n_train = ((n as f64 * train_fraction) as usize).clamp(1, n.saturating_sub(1).max(1));
    let test = idx.split_off(n_train);
    (idx, test)
}

/// Trains on a seeded row split of `(x, y)` and evaluates the held-out part.
pub fn train_gbt(
    x: &[Vec<f64>],
    y: &[f64],
    feature_names: &[String],
    params: &GbtParams,
    seed: u64,
) -> Result<TrainedModel, GbtError> {
    if x.len() != y.len() {
        return Err(GbtError::Ragged);
    }
    if x.len() < 10 {
        return Err(GbtError::TooFewRows(x.len()));
    }
    if !(params.train_fraction > 0.0 && params.train_fraction < 1.0) {
        return Err(GbtError::BadSplit);
    }
    let (train_rows, test_rows) = split_rows(x.len(), params.train_fraction, seed);
    let xt: Vec<&[f64]> = train_rows.iter().map(|&i| x[i].as_slice()).collect();
    let yt: Vec<f64> = train_rows.iter().map(|&i| y[i]).collect();
    let (model, train_rmse) = fit(&xt, &yt, feature_names, params, seed)?;

    let truth: Vec<f64> = test_rows.iter().map(|&i| y[i]).collect();
    let pred: Vec<f64> = test_rows.iter().map(|&i| model.predict(&x[i])).collect();
    let test_mae = stats::mean_abs_error(&pred, &truth);
    let baseline_mae = stats::mean_abs_error(&vec![model.base; truth.len()], &truth);
    let passed_gate = baseline_mae > 0.0 && test_mae <= (1.0 - params.gate_improvement) * baseline_mae;
    if !passed_gate {
        log::warn!("model fails quality gate: held-out MAE {test_mae} vs mean baseline {baseline_mae}");
    }
    Ok(TrainedModel {
        model,
        train_rmse,
        test_mae,
        baseline_mae,
        passed_gate,
        train_rows,
        test_rows,
    })
}

/// Fits the ensemble on all given rows. Returns the model and the training
/// RMSE after round 0 and after each tree.
pub fn fit(
    x: &[&[f64]],
    y: &[f64],
    feature_names: &[String],
    params: &GbtParams,
    seed: u64,
) -> Result<(TreeEnsembleModel, Vec<f64>), GbtError> {
    if params.max_depth < 1 {
        return Err(GbtError::BadParams("max_depth must be >= 1"));
    }
    if !(params.learning_rate > 0.0 && params.learning_rate <= 1.0) {
        return Err(GbtError::BadParams("learning_rate must lie in (0, 1]"));
    }
    if params.min_samples_leaf < 1 {
        return Err(GbtError::BadParams("min_samples_leaf must be >= 1"));
    }
    let m = feature_names.len();
    if x.iter().any(|r| r.len() != m) {
        return Err(GbtError::Ragged);
    }
    if x.iter().any(|r| r.iter().any(|v| !v.is_finite())) || y.iter().any(|v| !v.is_finite()) {
        return Err(GbtError::NonFinite);
    }
    let n = y.len();
    let constant = y.windows(2).all(|w| w[0] == w[1]);
    let base = if constant { y.first().copied().unwrap_or(0.0) } else { stats::mean(y).unwrap_or(0.0) };
    let mut pred = vec![base; n];
    let mut curve = vec![stats::rmse(&pred, y)];
    let mut trees = Vec::new();

    // Rows of each feature sorted once; nodes filter this order.
    let sorted: Vec<Vec<usize>> = (0..m)
        .map(|f| {
            let mut idx: Vec<usize> = (0..n).collect();
            idx.sort_by(|&a, &b| x[a][f].total_cmp(&x[b][f]).then(a.cmp(&b)));
            idx
        })
        .collect();

    if curve[0] == 0.0 {
        log::warn!("constant target; model is the base value only");
    }
    for _ in 0..params.rounds {
        if curve.last().copied() == Some(0.0) {
            break;
        }
        let residual: Vec<f64> = y.iter().zip(&pred).map(|(t, p)| t - p).collect();
        let tree = build_tree(x, &residual, &sorted, params);
        if tree.nodes.len() == 1 {
            break;
        }
        for (p, row) in pred.iter_mut().zip(x) {
            *p += params.learning_rate * tree.predict(row);
        }
        trees.push(tree);
        curve.push(stats::rmse(&pred, y));
    }
    let model = TreeEnsembleModel {
        feature_names: feature_names.to_vec(),
        base,
        learning_rate: params.learning_rate,
        trees,
        meta: TrainingMeta {
            rounds: params.rounds,
            max_depth: params.max_depth,
            seed,
        },
    };
    Ok((model, curve))
}

#[derive(Debug, Clone, Copy)]
struct Split {
    gain: f64,
    feature: usize,
    threshold: f64,
}

fn best_split_for_feature(
    x: &[&[f64]],
    residual: &[f64],
    order: &[usize],
    member: &[bool],
    feature: usize,
    total: f64,
    count: usize,
    min_leaf: usize,
) -> Option<Split> {
    let parent = total * total / count as f64;
    let mut best: Option<Split> = None;
    let mut left_sum = 0.0;
    let mut left_n = 0usize;
    let mut prev: Option<f64> = None;
    for &i in order {
        if !member[i] {
            continue;
        }
        let v = x[i][feature];
        if let Some(p) = prev {
            if v > p && left_n >= min_leaf && count - left_n >= min_leaf {
                let right_sum = total - left_sum;
                let right_n = count - left_n;
                let gain = left_sum * left_sum / left_n as f64 + right_sum * right_sum / right_n as f64 - parent;
                if gain > 1e-12 && best.map_or(true, |b| gain > b.gain) {
                    let mut threshold = p + (v - p) / 2.0;
                    if threshold >= v {
                        threshold = p;
                    }
                    best = Some(Split {
                        gain,
                        feature,
                        threshold,
                    });
                }
            }
        }
        left_sum += residual[i];
        left_n += 1;
        prev = Some(v);
    }
    best
}

fn best_split(
    x: &[&[f64]],
    residual: &[f64],
    sorted: &[Vec<usize>],
    member: &[bool],
    rows: &[usize],
    min_leaf: usize,
) -> Option<Split> {
    let total: f64 = rows.iter().map(|&i| residual[i]).sum();
    let count = rows.len();
    let per_feature = |f: usize| best_split_for_feature(x, residual, &sorted[f], member, f, total, count, min_leaf);

    #[cfg(feature = "parallel")]
    let candidates: Vec<Option<Split>> = {
        use rayon::prelude::*;
        (0..sorted.len()).into_par_iter().map(per_feature).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let candidates: Vec<Option<Split>> = (0..sorted.len()).map(per_feature).collect();

    // Lowest feature index wins ties.
    candidates
        .into_iter()
        .flatten()
        .fold(None, |best: Option<Split>, s| match best {
            Some(b) if b.gain >= s.gain => Some(b),
            _ => Some(s),
        })
}

fn build_tree(x: &[&[f64]], residual: &[f64], sorted: &[Vec<usize>], params: &GbtParams) -> RegressionTree {
    let mut nodes = Vec::new();
    let mut member = vec![false; residual.len()];
    let all: Vec<usize> = (0..residual.len()).collect();
    grow(x, residual, sorted, params, &mut member, all, 0, &mut nodes);
    RegressionTree { nodes }
}

#[allow(clippy::too_many_arguments)]
fn grow(
    x: &[&[f64]],
    residual: &[f64],
    sorted: &[Vec<usize>],
    params: &GbtParams,
    member: &mut [bool],
    rows: Vec<usize>,
    depth: usize,
    nodes: &mut Vec<Node>,
) -> usize {
    let id = nodes.len();
    let cover = rows.len() as f64;
    let leaf_value = rows.iter().map(|&i| residual[i]).sum::<f64>() / cover;
    nodes.push(Node::Leaf {
        value: leaf_value,
        cover,
    });
    if depth >= params.max_depth || rows.len() < 2 * params.min_samples_leaf {
        return id;
    }
    for &i in &rows {
        member[i] = true;
    }
    let split = best_split(x, residual, sorted, member, &rows, params.min_samples_leaf);
    for &i in &rows {
        member[i] = false;
    }
    let Some(split) = split else {
        return id;
    };
    let (left_rows, right_rows): (Vec<usize>, Vec<usize>) =
        rows.into_iter().partition(|&i| x[i][split.feature] <= split.threshold);
    let left = grow(x, residual, sorted, params, member, left_rows, depth + 1, nodes);
    let right = grow(x, residual, sorted, params, member, right_rows, depth + 1, nodes);
    nodes[id] = Node::Split {
        feature: split.feature,
        threshold: split.threshold,
        left,
        right,
        cover,
    };
    id
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;

    fn names(m: usize) -> Vec<String> {
        (0..m).map(|i| format!("f{i}")).collect()
    }

    #[test]
    fn constant_target_is_base_only() {
        let x: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64]).collect();
        let y = vec![0.7; 20];
        let t = train_gbt(&x, &y, &names(1), &GbtParams::default(), 1).unwrap();
        assert!(t.model.trees.is_empty());
        assert_eq!(t.model.base, 0.7);
        assert_eq!(t.train_rmse, vec![0.0]);
        assert!(!t.passed_gate);
    }

    #[test]
    fn stump_learns_threshold() {
        let x: Vec<Vec<f64>> = (0..100).map(|i| vec![i as f64, (i * 7 % 13) as f64]).collect();
        let y: Vec<f64> = (0..100).map(|i| if i < 40 { 1.0 } else { -1.0 }).collect();
        let params = GbtParams {
            max_depth: 1,
            ..GbtParams::default()
        };
        let t = train_gbt(&x, &y, &names(2), &params, 5).unwrap();
        assert!(t.test_mae < 0.01, "{}", t.test_mae);
        assert!(t.passed_gate);
        assert!(t.model.trees.iter().all(|tr| tr.depth() == 1));
        assert!(t.model.trees.iter().all(|tr| tr.features_used().all(|f| f == 0)));
    }

    #[test]
    fn learning_curve_never_increases() {
        let x: Vec<Vec<f64>> = (0..60).map(|i| vec![(i % 7) as f64, (i % 5) as f64]).collect();
        let y: Vec<f64> = (0..60).map(|i| ((i * 31) % 17) as f64 / 17.0).collect();
        let t = train_gbt(&x, &y, &names(2), &GbtParams::default(), 3).unwrap();
        assert!(t.train_rmse.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    }

    #[test]
    fn preconditions() {
        let x: Vec<Vec<f64>> = (0..5).map(|i| vec![i as f64]).collect();
        assert_eq!(
            train_gbt(&x, &[0.0; 5], &names(1), &GbtParams::default(), 0),
            Err(GbtError::TooFewRows(5))
        );
        let x: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64]).collect();
        let bad = GbtParams {
            train_fraction: 1.0,
            ..GbtParams::default()
        };
        assert_eq!(train_gbt(&x, &[0.0; 10], &names(1), &bad, 0), Err(GbtError::BadSplit));
    }

    #[test]
    fn split_is_deterministic_partition() {
        let (a, b) = split_rows(50, 0.8, 9);
        assert_eq!((a.len(), b.len()), (40, 10));
        let mut all: Vec<usize> = a.iter().chain(&b).copied().collect();
        all.sort();
        assert_eq!(all, (0..50).collect::<Vec<_>>());
        assert_eq!(split_rows(50, 0.8, 9), (a, b));
    }
}
