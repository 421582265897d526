//! Shapley attributions for tree ensembles.
//!
//! Two value functions are supported. The interventional one replaces
//! absent features with values from background rows and averages the model
//! output. The path-dependent one follows the tree's own training cover
//! whenever a split tests an absent feature. [`shap_exact`] enumerates all
//! coalitions under either convention and serves as the oracle for the
//! polynomial-time explainers [`shap_tree`] (path-dependent) and
//! [`shap_tree_interventional`].

use alloc::vec;
use alloc::vec::Vec;

use super::gbt::{Node, RegressionTree, TreeEnsembleModel};

/// Largest feature count accepted by [`shap_exact`].
pub const EXACT_MAX_FEATURES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum ShapError {
    #[error("exact enumeration supports at most {EXACT_MAX_FEATURES} features, got {0}")]
    TooManyFeatures(usize),
    #[error("row has {got} features, model expects {expected}")]
    WrongWidth { got: usize, expected: usize },
    #[error("interventional attribution needs at least one background row")]
    EmptyBackground,
}

#[derive(Debug, Clone, Copy)]
pub enum Convention<'a> {
    Interventional(&'a [Vec<f64>]),
    PathDependent,
}

/// `prediction == base + phi.sum()` up to rounding.
#[derive(Debug, Clone, PartialEq)]
pub struct Explanation {
    pub base: f64,
    pub phi: Vec<f64>,
    pub prediction: f64,
}

impl Explanation {
    pub fn additivity_gap(&self) -> f64 {
        (self.base + self.phi.iter().sum::<f64>() - self.prediction).abs()
    }
}

fn check_width(model: &TreeEnsembleModel, row: &[f64]) -> Result<(), ShapError> {
    if row.len() != model.n_features() {
        return Err(ShapError::WrongWidth {
            got: row.len(),
            expected: model.n_features(),
        });
    }
    Ok(())
}

/// Expected tree output when only features in `mask` are known, following
/// cover proportions at splits on unknown features.
fn cover_expectation(tree: &RegressionTree, x: &[f64], mask: u32, node: usize) -> f64 {
    match &tree.nodes[node] {
        Node::Leaf { value, .. } => *value,
        Node::Split {
            feature,
            threshold,
            left,
            right,
            cover,
        } => {
            if mask & (1 << feature) != 0 {
                let next = if x[*feature] <= *threshold { *left } else { *right };
                cover_expectation(tree, x, mask, next)
            } else {
                let cl = tree.nodes[*left].cover();
                let cr = tree.nodes[*right].cover();
                (cl * cover_expectation(tree, x, mask, *left) + cr * cover_expectation(tree, x, mask, *right)) / cover
            }
        }
    }
}

fn factorials(n: usize) -> Vec<f64> {
    let mut f = vec![1.0; n + 1];
    for i in 1..=n {
        f[i] = f[i - 1] * i as f64;
    }
    f
}

/// Shapley values by enumerating every coalition. Cost is `O(2^m)` model
/// evaluations, so `m` is capped at [`EXACT_MAX_FEATURES`].
pub fn shap_exact(model: &TreeEnsembleModel, row: &[f64], convention: Convention<'_>) -> Result<Explanation, ShapError> {
    check_width(model, row)?;
    let m = model.n_features();
    if m > EXACT_MAX_FEATURES {
        return Err(ShapError::TooManyFeatures(m));
    }
    let eta = model.learning_rate;
    let value = |mask: u32| -> f64 {
        match convention {
            Convention::PathDependent => {
                model.base + eta * model.trees.iter().map(|t| cover_expectation(t, row, mask, 0)).sum::<f64>()
            }
            Convention::Interventional(bg) => {
                let mut hybrid = vec![0.0; m];
                let mut total = 0.0;
                for z in bg {
                    for j in 0..m {
                        hybrid[j] = if mask & (1 << j) != 0 { row[j] } else { z[j] };
                    }
                    total += model.predict(&hybrid);
                }
                total / bg.len() as f64
            }
        }
    };
    if let Convention::Interventional(bg) = convention {
        if bg.is_empty() {
            return Err(ShapError::EmptyBackground);
        }
        if let Some(z) = bg.iter().find(|z| z.len() != m) {
            return Err(ShapError::WrongWidth {
                got: z.len(),
                expected: m,
            });
        }
    }
    let full = (1u32 << m) - 1;
    let v: Vec<f64> = (0..=full).map(value).collect();
    let fact = factorials(m);
    let mut phi = vec![0.0; m];
    for (i, p) in phi.iter_mut().enumerate() {
        let bit = 1u32 << i;
        for s in 0..=full {
            if s & bit != 0 {
                continue;
            }
            let k = s.count_ones() as usize;
            let w = fact[k] * fact[m - k - 1] / fact[m];
            *p += w * (v[(s | bit) as usize] - v[s as usize]);
        }
    }
    Ok(Explanation {
        base: v[0],
        phi,
        prediction: v[full as usize],
    })
}

// Path-dependent TreeSHAP with the extend/unwind recursion over unique
// feature paths.

#[derive(Debug, Clone, Copy, Default)]
struct PathEl {
    feature: Option<usize>,
    zero: f64,
    one: f64,
    weight: f64,
}

fn extend(path: &mut Vec<PathEl>, zero: f64, one: f64, feature: Option<usize>) {
    let l = path.len();
    path.push(PathEl {
        feature,
        zero,
        one,
        weight: if l == 0 { 1.0 } else { 0.0 },
    });
    let lf = (l + 1) as f64;
    for i in (0..l).rev() {
        path[i + 1].weight += one * path[i].weight * (i + 1) as f64 / lf;
        path[i].weight = zero * path[i].weight * (l - i) as f64 / lf;
    }
}

fn unwind(path: &mut Vec<PathEl>, i: usize) {
    let l = path.len() - 1;
    let PathEl { one, zero, .. } = path[i];
    let lf = (l + 1) as f64;
    let mut n = path[l].weight;
    for j in (0..l).rev() {
        if one != 0.0 {
            let t = path[j].weight;
            path[j].weight = n * lf / ((j + 1) as f64 * one);
            n = t - path[j].weight * zero * (l - j) as f64 / lf;
        } else {
            path[j].weight = path[j].weight * lf / (zero * (l - j) as f64);
        }
    }
    for j in i..l {
        path[j].feature = path[j + 1].feature;
        path[j].zero = path[j + 1].zero;
        path[j].one = path[j + 1].one;
    }
    path.pop();
}

fn unwound_sum(path: &[PathEl], i: usize) -> f64 {
    let l = path.len() - 1;
    let PathEl { one, zero, .. } = path[i];
    let lf = (l + 1) as f64;
    let mut total = 0.0;
    let mut n = path[l].weight;
    for j in (0..l).rev() {
        if one != 0.0 {
            let t = n * lf / ((j + 1) as f64 * one);
            total += t;
            n = path[j].weight - t * zero * (l - j) as f64 / lf;
        } else {
            total += path[j].weight * lf / (zero * (l - j) as f64);
        }
    }
    total
}

#[allow(clippy::too_many_arguments)]
fn recurse(
    tree: &RegressionTree,
    x: &[f64],
    phi: &mut [f64],
    scale: f64,
    node: usize,
    mut path: Vec<PathEl>,
    zero: f64,
    one: f64,
    feature: Option<usize>,
) {
    extend(&mut path, zero, one, feature);
    match &tree.nodes[node] {
        Node::Leaf { value, .. } => {
            for i in 1..path.len() {
                let w = unwound_sum(&path, i);
                let el = path[i];
                if let Some(f) = el.feature {
                    phi[f] += w * (el.one - el.zero) * value * scale;
                }
            }
        }
        Node::Split {
            feature: f,
            threshold,
            left,
            right,
            cover,
        } => {
            let (hot, cold) = if x[*f] <= *threshold { (*left, *right) } else { (*right, *left) };
            let mut iz = 1.0;
            let mut io = 1.0;
            if let Some(k) = path.iter().skip(1).position(|p| p.feature == Some(*f)) {
                let k = k + 1;
                iz = path[k].zero;
                io = path[k].one;
                unwind(&mut path, k);
            }
            let hot_frac = tree.nodes[hot].cover() / cover;
            let cold_frac = tree.nodes[cold].cover() / cover;
            recurse(tree, x, phi, scale, hot, path.clone(), iz * hot_frac, io, Some(*f));
            recurse(tree, x, phi, scale, cold, path, iz * cold_frac, 0.0, Some(*f));
        }
    }
}

/// Expected output of a tree under its training cover.
pub fn tree_expectation(tree: &RegressionTree) -> f64 {
    cover_expectation(tree, &[], 0, 0)
}

/// Path-dependent TreeSHAP; polynomial in tree size and depth.
pub fn shap_tree(model: &TreeEnsembleModel, row: &[f64]) -> Result<Explanation, ShapError> {
    check_width(model, row)?;
    let mut phi = vec![0.0; model.n_features()];
    let mut base = model.base;
    for tree in &model.trees {
        recurse(tree, row, &mut phi, model.learning_rate, 0, Vec::new(), 1.0, 1.0, None);
        base += model.learning_rate * tree_expectation(tree);
    }
    Ok(Explanation {
        base,
        phi,
        prediction: model.predict(row),
    })
}

// Interventional attribution for one (row, background) pair. A leaf is
// reached by the hybrid input exactly when every feature in `A` (only the
// row satisfies its path conditions) is taken from the row and every
// feature in `B` (only the background satisfies them) is not. Its Shapley
// share therefore has a closed form in |A| and |B|.

struct Walk<'a> {
    tree: &'a RegressionTree,
    x: &'a [f64],
    z: &'a [f64],
    x_ok: Vec<bool>,
    z_ok: Vec<bool>,
    fact: &'a [f64],
    scale: f64,
}

impl Walk<'_> {
    fn run(&mut self, node: usize, a: usize, b: usize, phi: &mut [f64]) {
        match &self.tree.nodes[node] {
            Node::Leaf { value, .. } => {
                if a + b == 0 {
                    return;
                }
                let v = value * self.scale;
                let n = a + b;
                let wa = if a > 0 { self.fact[a - 1] * self.fact[b] / self.fact[n] } else { 0.0 };
                let wb = if b > 0 { self.fact[a] * self.fact[b - 1] / self.fact[n] } else { 0.0 };
                for f in 0..phi.len() {
                    match (self.x_ok[f], self.z_ok[f]) {
                        (true, false) => phi[f] += v * wa,
                        (false, true) => phi[f] -= v * wb,
                        _ => {}
                    }
                }
            }
            Node::Split {
                feature,
                threshold,
                left,
                right,
                ..
            } => {
                let f = *feature;
                let x_left = self.x[f] <= *threshold;
                let z_left = self.z[f] <= *threshold;
                for (child, goes_left) in [(*left, true), (*right, false)] {
                    let (px, pz) = (self.x_ok[f], self.z_ok[f]);
                    let nx = px && x_left == goes_left;
                    let nz = pz && z_left == goes_left;
                    if !nx && !nz {
                        continue;
                    }
                    let class = |ok_x: bool, ok_z: bool| (ok_x && !ok_z, !ok_x && ok_z);
                    let (pa, pb) = class(px, pz);
                    let (na, nb) = class(nx, nz);
                    let a2 = a - pa as usize + na as usize;
                    let b2 = b - pb as usize + nb as usize;
                    self.x_ok[f] = nx;
                    self.z_ok[f] = nz;
                    self.run(child, a2, b2, phi);
                    self.x_ok[f] = px;
                    self.z_ok[f] = pz;
                }
            }
        }
    }
}

/// Interventional Shapley values averaged over `background`, computed per
/// tree and background row in time linear in the tree size.
pub fn shap_tree_interventional(
    model: &TreeEnsembleModel,
    row: &[f64],
    background: &[Vec<f64>],
) -> Result<Explanation, ShapError> {
    check_width(model, row)?;
    if background.is_empty() {
        return Err(ShapError::EmptyBackground);
    }
    let m = model.n_features();
    if let Some(z) = background.iter().find(|z| z.len() != m) {
        return Err(ShapError::WrongWidth {
            got: z.len(),
            expected: m,
        });
    }
    let depth = model.trees.iter().map(|t| t.depth()).max().unwrap_or(0);
    let fact = factorials(depth.max(1));
    let mut phi = vec![0.0; m];
    let mut base = 0.0;
    for z in background {
        base += model.predict(z);
        for tree in &model.trees {
            let mut walk = Walk {
                tree,
                x: row,
                z,
                x_ok: vec![true; m],
                z_ok: vec![true; m],
                fact: &fact,
                scale: model.learning_rate,
            };
            walk.run(0, 0, 0, &mut phi);
        }
    }
    let nb = background.len() as f64;
    for p in &mut phi {
        *p /= nb;
    }
    Ok(Explanation {
        base: base / nb,
        phi,
        prediction: model.predict(row),
    })
}
