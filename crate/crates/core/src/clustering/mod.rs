//! Trace clustering on interestingness alone.
//!
//! Each trace is summarized by the mean of every interestingness series,
//! traces are compared with the Euclidean distance between those means,
//! and an agglomerative complete-linkage dendrogram is cut at every `k` in
//! a range and scored with the silhouette coefficient. Nothing in this
//! pipeline reads the [`TraceSet`](crate::trace::TraceSet) itself; metadata
//! is joined only afterwards in [`report`].

mod linkage;
pub mod report;

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::analyzers::{InterestingnessRecord, SeriesKey};
use crate::math::sqrt;

pub use linkage::{agglomerate, cut, Dendrogram, Merge};
pub use report::{cluster_report, purity, ClusterReport, ClusterRow};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ClusterError {
    #[error("no interestingness series is present in every trace")]
    NoCommonDimensions,
    #[error("no records")]
    Empty,
    #[error("need at least 2 traces, got {0}")]
    TooFew(usize),
    #[error("feature vectors have mismatched dimensions")]
    DimensionMismatch,
    #[error("distance matrix is not a valid symmetric matrix with zero diagonal")]
    BadDistanceMatrix,
    #[error("empty k range")]
    EmptyKRange,
    #[error("k = {k} outside 1..={n}")]
    BadK { k: usize, n: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceFeatureVector {
    pub trace_id: String,
    pub means: Vec<f64>,
}

/// Per-trace mean interestingness for the series shared by every trace.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceFeatures {
    pub keys: Vec<SeriesKey>,
    pub rows: Vec<TraceFeatureVector>,
}

impl TraceFeatures {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Averages every series per trace, keeping only series present in all
/// traces. Traces appear in order of first occurrence.
pub fn trace_features(records: &[InterestingnessRecord]) -> Result<TraceFeatures, ClusterError> {
    if records.is_empty() {
        return Err(ClusterError::Empty);
    }
    let mut order: Vec<&str> = Vec::new();
    let mut sums: BTreeMap<&str, BTreeMap<SeriesKey, (f64, usize)>> = BTreeMap::new();
    for r in records {
        let entry = sums.entry(r.trace_id.as_str()).or_insert_with(|| {
            order.push(r.trace_id.as_str());
            BTreeMap::new()
        });
        for key in r.keys() {
            if let Some(x) = r.get(key) {
                let acc = entry.entry(key).or_insert((0.0, 0));
                acc.0 += x;
                acc.1 += 1;
            }
        }
    }
    let mut keys: Vec<SeriesKey> = sums[order[0]].keys().copied().collect();
    keys.retain(|k| sums.values().all(|m| m.contains_key(k)));
    if keys.is_empty() {
        return Err(ClusterError::NoCommonDimensions);
    }
    let rows = order
        .iter()
        .map(|id| {
            let m = &sums[id];
            TraceFeatureVector {
                trace_id: (*id).into(),
                means: keys
                    .iter()
                    .map(|k| {
                        let (s, n) = m[k];
                        s / n as f64
                    })
                    .collect(),
            }
        })
        .collect();
    Ok(TraceFeatures { keys, rows })
}

/// Dense symmetric distance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = f(i, j);
                data[i * n + j] = d;
                data[j * n + i] = d;
            }
        }
        DistanceMatrix { n, data }
    }

    /// Wraps a row-major `n x n` matrix after checking symmetry, a zero
    /// diagonal and non-negative finite entries.
    pub fn from_square(n: usize, data: Vec<f64>) -> Result<Self, ClusterError> {
        if data.len() != n * n {
            return Err(ClusterError::BadDistanceMatrix);
        }
        for i in 0..n {
            if data[i * n + i] != 0.0 {
                return Err(ClusterError::BadDistanceMatrix);
            }
            for j in 0..n {
                let d = data[i * n + j];
                if !(d.is_finite() && d >= 0.0) || d != data[j * n + i] {
                    return Err(ClusterError::BadDistanceMatrix);
                }
            }
        }
        Ok(DistanceMatrix { n, data })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }
}

pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    sqrt(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum())
}

/// Euclidean distances between every pair of per-trace mean vectors.
pub fn pairwise_distances(features: &[TraceFeatureVector]) -> Result<DistanceMatrix, ClusterError> {
    let n = features.len();
    if n < 2 {
        return Err(ClusterError::TooFew(n));
    }
    let dim = features[0].means.len();
    if features.iter().any(|f| f.means.len() != dim) {
        return Err(ClusterError::DimensionMismatch);
    }
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        let rows: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|i| (0..n).map(|j| euclidean(&features[i].means, &features[j].means)).collect())
            .collect();
        let data: Vec<f64> = rows.into_iter().flatten().collect();
        return Ok(DistanceMatrix { n, data });
    }
    #[cfg(not(feature = "parallel"))]
    Ok(DistanceMatrix::from_fn(n, |i, j| euclidean(&features[i].means, &features[j].means)))
}

/// A flat partition of the traces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterAssignment {
    pub k: usize,
    /// Cluster id per trace, in the order of the input features.
    pub labels: Vec<usize>,
    pub trace_ids: Vec<String>,
    pub silhouette: f64,
}

impl ClusterAssignment {
    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }

    pub fn label_of(&self, trace_id: &str) -> Option<usize> {
        self.trace_ids.iter().position(|t| t == trace_id).map(|i| self.labels[i])
    }
}

/// Mean silhouette `s(i) = (b - a) / max(a, b)` with singletons scored 0.
pub fn silhouette(dist: &DistanceMatrix, labels: &[usize]) -> f64 {
    let n = dist.len();
    if n == 0 {
        return 0.0;
    }
    let k = labels.iter().copied().max().map_or(0, |m| m + 1);
    let mut sizes = vec![0usize; k];
    for &l in labels {
        sizes[l] += 1;
    }
    let mut total = 0.0;
    let mut sums = vec![0.0; k];
    for i in 0..n {
        sums.iter_mut().for_each(|s| *s = 0.0);
        for j in 0..n {
            sums[labels[j]] += dist.get(i, j);
        }
        let own = labels[i];
        if sizes[own] <= 1 {
            continue;
        }
        let a = sums[own] / (sizes[own] - 1) as f64;
        let b = (0..k)
            .filter(|&c| c != own && sizes[c] > 0)
            .map(|c| sums[c] / sizes[c] as f64)
            .fold(f64::INFINITY, f64::min);
        if !b.is_finite() {
            continue;
        }
        let denom = a.max(b);
        if denom > 0.0 {
            total += (b - a) / denom;
        }
    }
    total / n as f64
}

/// The silhouette table over a range of `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KSweep {
    pub assignments: Vec<ClusterAssignment>,
    /// `k` with the highest silhouette (smallest `k` on ties).
    pub best_k: usize,
}

impl KSweep {
    pub fn get(&self, k: usize) -> Option<&ClusterAssignment> {
        self.assignments.iter().find(|a| a.k == k)
    }

    pub fn best(&self) -> &ClusterAssignment {
        self.get(self.best_k).expect("best k is in the sweep")
    }
}

pub const DEFAULT_K_RANGE: core::ops::RangeInclusive<usize> = 2..=15;

/// Cuts the dendrogram at every `k` of `k_range` that satisfies
/// `2 <= k <= n` and scores each cut.
pub fn cut_and_score(
    dendrogram: &Dendrogram,
    dist: &DistanceMatrix,
    trace_ids: &[String],
    k_range: core::ops::RangeInclusive<usize>,
) -> Result<KSweep, ClusterError> {
    let n = dendrogram.leaves();
    let ks: Vec<usize> = k_range.filter(|k| (2..=n).contains(k)).collect();
    if ks.is_empty() {
        return Err(ClusterError::EmptyKRange);
    }
    let mut assignments = Vec::with_capacity(ks.len());
    for k in ks {
        let labels = cut(dendrogram, k)?;
        let silhouette = silhouette(dist, &labels);
        assignments.push(ClusterAssignment {
            k,
            labels,
            trace_ids: trace_ids.to_vec(),
            silhouette,
        });
    }
    let best_k = assignments
        .iter()
        .fold(None::<&ClusterAssignment>, |best, a| match best {
            Some(b) if b.silhouette >= a.silhouette => Some(b),
            _ => Some(a),
        })
        .map(|a| a.k)
        .unwrap_or(2);
    Ok(KSweep { assignments, best_k })
}

/// Features, distances, dendrogram and silhouette sweep in one call.
#[derive(Debug, Clone, PartialEq)]
pub struct Clustering {
    pub features: TraceFeatures,
    pub dendrogram: Dendrogram,
    pub sweep: KSweep,
}

pub fn cluster_records(
    records: &[InterestingnessRecord],
    k_range: core::ops::RangeInclusive<usize>,
) -> Result<Clustering, ClusterError> {
    let features = trace_features(records)?;
    let dist = pairwise_distances(&features.rows)?;
    let dendrogram = agglomerate(&dist)?;
    let ids: Vec<String> = features.rows.iter().map(|r| r.trace_id.clone()).collect();
    let sweep = cut_and_score(&dendrogram, &dist, &ids, k_range)?;
    Ok(Clustering {
        features,
        dendrogram,
        sweep,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analyzers::Dimension;

    fn rec(id: &str, step: usize, v: f64) -> InterestingnessRecord {
        let mut r = InterestingnessRecord::new(id, step);
        r.values.insert(Dimension::Value, v);
        r
    }

    #[test]
    fn features_are_per_trace_means() {
        let recs = vec![rec("a", 0, -1.0), rec("a", 1, 1.0), rec("b", 0, 0.25)];
        let f = trace_features(&recs).unwrap();
        assert_eq!(f.keys, vec![SeriesKey::Dim(Dimension::Value)]);
        assert_eq!(f.rows[0].means, vec![0.0]);
        assert_eq!(f.rows[1].means, vec![0.25]);
    }

    #[test]
    fn features_keep_only_common_series() {
        let mut r = rec("a", 0, 0.0);
        r.values.insert(Dimension::Confidence, 0.5);
        let f = trace_features(&[r, rec("b", 0, 1.0)]).unwrap();
        assert_eq!(f.keys.len(), 1);
        let mut only_conf = InterestingnessRecord::new("c", 0);
        only_conf.values.insert(Dimension::Confidence, 0.1);
        assert_eq!(
            trace_features(&[rec("a", 0, 0.0), only_conf]),
            Err(ClusterError::NoCommonDimensions)
        );
    }

    #[test]
    fn pythagorean_distance() {
        let f = vec![
            TraceFeatureVector { trace_id: "a".into(), means: vec![0.0, 0.0] },
            TraceFeatureVector { trace_id: "b".into(), means: vec![3.0, 4.0] },
            TraceFeatureVector { trace_id: "c".into(), means: vec![0.0, 0.0] },
        ];
        let d = pairwise_distances(&f).unwrap();
        assert_eq!(d.get(0, 1), 5.0);
        assert_eq!(d.get(1, 0), 5.0);
        assert_eq!(d.get(0, 2), 0.0);
        assert!(pairwise_distances(&f[..1]).is_err());
    }

    #[test]
    fn silhouette_singletons_are_zero() {
        let d = DistanceMatrix::from_fn(3, |i, j| (i as f64 - j as f64).abs());
        assert_eq!(silhouette(&d, &[0, 1, 2]), 0.0);
    }

    #[test]
    fn separated_blobs_score_near_one() {
        let pts: [f64; 6] = [0.0, 0.01, 0.02, 10.0, 10.01, 10.02];
        let d = DistanceMatrix::from_fn(6, |i, j| (pts[i] - pts[j]).abs());
        let s = silhouette(&d, &[0, 0, 0, 1, 1, 1]);
        assert!(s > 0.99, "{s}");
    }

    #[test]
    fn empty_k_range_rejected() {
        let d = DistanceMatrix::from_fn(3, |i, j| (i as f64 - j as f64).abs());
        let dend = agglomerate(&d).unwrap();
        let ids = vec!["a".into(), "b".into(), "c".into()];
        assert_eq!(cut_and_score(&dend, &d, &ids, 5..=9), Err(ClusterError::EmptyKRange));
        let sweep = cut_and_score(&dend, &d, &ids, 2..=3).unwrap();
        assert_eq!(sweep.get(3).unwrap().silhouette, 0.0);
    }
}
