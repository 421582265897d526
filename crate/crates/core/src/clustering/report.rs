//! Per-cluster characteristics: sizes, trace metadata statistics and
//! interestingness profiles.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::analyzers::{profile_of, InterestingnessRecord, Profile};
use crate::stats::Summary;
use crate::trace::TraceSet;

use super::{ClusterAssignment, ClusterError};

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterRow {
    pub cluster: usize,
    pub size: usize,
    pub metrics: BTreeMap<String, Summary>,
    pub profile: Profile,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterReport {
    pub k: usize,
    pub metric_names: Vec<String>,
    pub rows: Vec<ClusterRow>,
    /// Metadata keys dropped because some traces lack them.
    pub omitted_metrics: Vec<String>,
}

/// Joins a cluster assignment with trace metadata. `length` is always
/// reported; every numeric metadata key present on all traces is
/// summarized as well.
pub fn cluster_report(
    assignment: &ClusterAssignment,
    ts: &TraceSet,
    records: &[InterestingnessRecord],
) -> Result<ClusterReport, ClusterError> {
    let k = assignment.k;
    let mut all_keys = BTreeSet::new();
    for t in &ts.traces {
        for (key, v) in &t.metadata {
            if v.as_f64().is_some() {
                all_keys.insert(key.clone());
            }
        }
    }
    let mut metric_names = vec![String::from("length")];
    let mut omitted = Vec::new();
    for key in all_keys {
        let everywhere = assignment.trace_ids.iter().all(|id| {
            ts.trace(id)
                .and_then(|t| t.metadata.get(&key))
                .and_then(|v| v.as_f64())
                .is_some()
        });
        if everywhere {
            metric_names.push(key);
        } else {
            log::warn!("metadata field {key} missing on some traces; column omitted");
            omitted.push(key);
        }
    }

    let mut columns: Vec<BTreeMap<String, Vec<f64>>> = vec![BTreeMap::new(); k];
    for (id, &label) in assignment.trace_ids.iter().zip(&assignment.labels) {
        let Some(trace) = ts.trace(id) else {
            return Err(ClusterError::BadK { k, n: ts.traces.len() });
        };
        for name in &metric_names {
            let x = if name == "length" {
                trace.len() as f64
            } else {
                trace.metadata[name].as_f64().unwrap_or_default()
            };
            columns[label].entry(name.clone()).or_default().push(x);
        }
    }

    let sizes = assignment.sizes();
    let mut rows = Vec::with_capacity(k);
    for (cluster, cols) in columns.into_iter().enumerate() {
        let members: BTreeSet<&str> = assignment
            .trace_ids
            .iter()
            .zip(&assignment.labels)
            .filter(|(_, l)| **l == cluster)
            .map(|(id, _)| id.as_str())
            .collect();
        let profile = profile_of(records.iter().filter(|r| members.contains(r.trace_id.as_str()))).unwrap_or_default();
        rows.push(ClusterRow {
            cluster,
            size: sizes[cluster],
            metrics: cols.into_iter().filter_map(|(n, xs)| Summary::of(&xs).map(|s| (n, s))).collect(),
            profile,
        });
    }
    Ok(ClusterReport {
        k,
        metric_names,
        rows,
        omitted_metrics: omitted,
    })
}

/// Fraction of items whose cluster's majority label equals their own label.
pub fn purity<L: Ord + Clone>(clusters: &[usize], truth: &[L]) -> f64 {
    assert_eq!(clusters.len(), truth.len());
    if clusters.is_empty() {
        return 1.0;
    }
    let mut counts: BTreeMap<usize, BTreeMap<L, usize>> = BTreeMap::new();
    for (c, t) in clusters.iter().zip(truth) {
        *counts.entry(*c).or_default().entry(t.clone()).or_default() += 1;
    }
    let majority: usize = counts.values().map(|m| m.values().copied().max().unwrap_or(0)).sum();
    majority as f64 / clusters.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn purity_counts_majorities() {
        assert_eq!(purity(&[0, 0, 1, 1], &["a", "a", "b", "b"]), 1.0);
        assert_eq!(purity(&[0, 0, 0, 0], &["a", "a", "b", "b"]), 0.5);
        assert_eq!(purity(&[0, 1, 2, 3], &[1, 1, 2, 2]), 1.0);
    }
}
