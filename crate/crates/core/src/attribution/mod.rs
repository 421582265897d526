//! Which environment features drive an interestingness dimension, and
//! which moments are unusual.
//!
//! A gradient-boosted tree ensemble maps per-step features to one
//! interestingness series. Shapley values of that model give a global
//! ranking (mean absolute attribution over held-out rows) and local
//! waterfall explanations of single steps. Abnormal steps are found with
//! the usual 1.5 IQR fences.

pub mod features;
pub mod gbt;
pub mod shap;

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::analyzers::{InterestingnessRecord, SeriesKey};
use crate::stats;

pub use features::{build_features, Dataset, ExtractorConfig, FeatureError, FeatureMatrix, FeatureSource};
pub use gbt::{train_gbt, GbtError, GbtParams, TrainedModel, TreeEnsembleModel};
pub use shap::{shap_exact, shap_tree, shap_tree_interventional, Convention, Explanation, ShapError};

/// Background rows used for interventional attributions.
pub const MAX_BACKGROUND: usize = 256;
/// Features shown individually in plots.
pub const TOP_FEATURES: usize = 10;
pub const IQR_MULTIPLIER: f64 = 1.5;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AttributionError {
    #[error("model failed its quality gate (held-out MAE {test_mae} vs baseline {baseline_mae}); attributions withheld")]
    Gated { test_mae: f64, baseline_mae: f64 },
    #[error("no held-out rows to explain")]
    NoRows,
    #[error("row {0} is out of range")]
    BadRow(usize),
    #[error(transparent)]
    Shap(#[from] ShapError),
    #[error(transparent)]
    Train(#[from] GbtError),
}

/// Trains a model for `data.target` with a seeded row split.
pub fn train_for(data: &Dataset, params: &GbtParams, seed: u64) -> Result<TrainedModel, GbtError> {
    train_gbt(&data.x, &data.y, &data.names, params, seed)
}

fn background<'a>(trained: &TrainedModel, data: &'a Dataset) -> Vec<Vec<f64>> {
    trained
        .train_rows
        .iter()
        .take(MAX_BACKGROUND)
        .map(|&i| data.x[i].clone())
        .collect()
}

fn gate(trained: &TrainedModel) -> Result<(), AttributionError> {
    if trained.passed_gate {
        Ok(())
    } else {
        Err(AttributionError::Gated {
            test_mae: trained.test_mae,
            baseline_mae: trained.baseline_mae,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureImportance {
    pub feature: usize,
    pub name: String,
    pub mean_abs: f64,
    pub mean_signed: f64,
}

/// One dot of a beeswarm: attribution and the feature's raw value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwarmPoint {
    pub phi: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlobalImportance {
    /// All features, by decreasing mean |phi|; ties keep column order.
    pub ranking: Vec<FeatureImportance>,
    /// Per-row points for the top features, in ranking order.
    pub beeswarm: Vec<(String, Vec<SwarmPoint>)>,
    pub base: f64,
    pub rows_explained: usize,
}

/// Ranks features by mean absolute interventional attribution over the
/// held-out rows.
pub fn global_importance(trained: &TrainedModel, data: &Dataset) -> Result<GlobalImportance, AttributionError> {
    gate(trained)?;
    if trained.test_rows.is_empty() {
        return Err(AttributionError::NoRows);
    }
    let bg = background(trained, data);
    let model = &trained.model;
    let explain = |&i: &usize| shap_tree_interventional(model, &data.x[i], &bg);

    #[cfg(feature = "parallel")]
    let explanations: Vec<Result<Explanation, ShapError>> = {
        use rayon::prelude::*;
        trained.test_rows.par_iter().map(explain).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let explanations: Vec<Result<Explanation, ShapError>> = trained.test_rows.iter().map(explain).collect();
    let explanations = explanations.into_iter().collect::<Result<Vec<_>, _>>()?;

    let m = model.n_features();
    let n = explanations.len() as f64;
    let mut ranking: Vec<FeatureImportance> = (0..m)
        .map(|f| FeatureImportance {
            feature: f,
            name: model.feature_names[f].clone(),
            mean_abs: explanations.iter().map(|e| e.phi[f].abs()).sum::<f64>() / n,
            mean_signed: explanations.iter().map(|e| e.phi[f]).sum::<f64>() / n,
        })
        .collect();
    ranking.sort_by(|a, b| b.mean_abs.total_cmp(&a.mean_abs).then(a.feature.cmp(&b.feature)));
    let beeswarm = ranking
        .iter()
        .take(TOP_FEATURES)
        .map(|fi| {
            let pts = trained
                .test_rows
                .iter()
                .zip(&explanations)
                .map(|(&i, e)| SwarmPoint {
                    phi: e.phi[fi.feature],
                    value: data.x[i][fi.feature],
                })
                .collect();
            (fi.name.clone(), pts)
        })
        .collect();
    Ok(GlobalImportance {
        ranking,
        beeswarm,
        base: explanations[0].base,
        rows_explained: explanations.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaterfallBar {
    pub name: String,
    pub value: f64,
    pub phi: f64,
}

/// Attribution of one step: the largest contributions individually plus
/// the summed remainder, so `base + sum(bars) + remainder == prediction`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalExplanation {
    pub trace_id: String,
    pub step: usize,
    pub base: f64,
    pub prediction: f64,
    pub actual: f64,
    pub bars: Vec<WaterfallBar>,
    pub remainder: f64,
    pub remainder_count: usize,
}

/// Explains dataset row `row` against the training background.
pub fn local_explanation(trained: &TrainedModel, data: &Dataset, row: usize) -> Result<LocalExplanation, AttributionError> {
    gate(trained)?;
    if row >= data.x.len() {
        return Err(AttributionError::BadRow(row));
    }
    let bg = background(trained, data);
    let e = shap_tree_interventional(&trained.model, &data.x[row], &bg)?;
    let mut order: Vec<usize> = (0..e.phi.len()).collect();
    order.sort_by(|&a, &b| e.phi[b].abs().total_cmp(&e.phi[a].abs()).then(a.cmp(&b)));
    let bars = order
        .iter()
        .take(TOP_FEATURES)
        .map(|&f| WaterfallBar {
            name: data.names[f].clone(),
            value: data.x[row][f],
            phi: e.phi[f],
        })
        .collect();
    let rest = order.get(TOP_FEATURES..).unwrap_or(&[]);
    Ok(LocalExplanation {
        trace_id: data.keys[row].0.clone(),
        step: data.keys[row].1,
        base: e.base,
        prediction: e.prediction,
        actual: data.y[row],
        bars,
        remainder: rest.iter().map(|&f| e.phi[f]).sum(),
        remainder_count: rest.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbnormalStep {
    pub trace_id: String,
    pub step: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbnormalReport {
    pub series: String,
    pub q1: f64,
    pub q3: f64,
    pub lower: f64,
    pub upper: f64,
    /// Flagged steps, most extreme first.
    pub flagged: Vec<AbnormalStep>,
    pub zero_iqr: bool,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("series {series} has {count} values; at least 4 are needed")]
pub struct TooFewValues {
    pub series: String,
    pub count: usize,
}

/// Steps whose value lies outside `[Q1 - 1.5 IQR, Q3 + 1.5 IQR]`.
pub fn find_abnormal(records: &[InterestingnessRecord], key: SeriesKey) -> Result<AbnormalReport, TooFewValues> {
    let vals: Vec<(&InterestingnessRecord, f64)> = records.iter().filter_map(|r| r.get(key).map(|v| (r, v))).collect();
    if vals.len() < 4 {
        return Err(TooFewValues {
            series: key.column_name(),
            count: vals.len(),
        });
    }
    let raw: Vec<f64> = vals.iter().map(|(_, v)| *v).collect();
    let sorted = stats::sorted(&raw);
    let q1 = stats::quantile_sorted(&sorted, 0.25).unwrap_or(0.0);
    let q3 = stats::quantile_sorted(&sorted, 0.75).unwrap_or(0.0);
    let iqr = q3 - q1;
    let zero_iqr = iqr == 0.0;
    if zero_iqr {
        log::warn!("{}: interquartile range is zero; flagging every value off the median plateau", key.column_name());
    }
    let lower = q1 - IQR_MULTIPLIER * iqr;
    let upper = q3 + IQR_MULTIPLIER * iqr;
    let mid = (q1 + q3) / 2.0;
    let mut flagged: Vec<AbnormalStep> = vals
        .iter()
        .filter(|(_, v)| *v < lower || *v > upper)
        .map(|(r, v)| AbnormalStep {
            trace_id: r.trace_id.clone(),
            step: r.step,
            value: *v,
        })
        .collect();
    flagged.sort_by(|a, b| {
        (b.value - mid)
            .abs()
            .total_cmp(&(a.value - mid).abs())
            .then_with(|| a.trace_id.cmp(&b.trace_id))
            .then(a.step.cmp(&b.step))
    });
    Ok(AbnormalReport {
        series: key.column_name(),
        q1,
        q3,
        lower,
        upper,
        flagged,
        zero_iqr,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analyzers::Dimension;
    use alloc::format;
    use alloc::vec;

    fn recs(values: &[f64]) -> Vec<InterestingnessRecord> {
        values
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let mut r = InterestingnessRecord::new("t", i);
                r.values.insert(Dimension::Confidence, *v);
                r
            })
            .collect()
    }

    #[test]
    fn iqr_flags_outliers() {
        let mut v: Vec<f64> = (0..20).map(|i| i as f64 / 20.0).collect();
        v.push(10.0);
        v.push(-10.0);
        let rep = find_abnormal(&recs(&v), SeriesKey::Dim(Dimension::Confidence)).unwrap();
        let got: Vec<f64> = rep.flagged.iter().map(|a| a.value).collect();
        assert_eq!(got.len(), 2);
        assert!(got.contains(&10.0) && got.contains(&-10.0));
    }

    #[test]
    fn zero_iqr_still_flags_off_plateau() {
        let mut v = vec![0.0; 100];
        v.push(-1.0);
        let rep = find_abnormal(&recs(&v), SeriesKey::Dim(Dimension::Confidence)).unwrap();
        assert!(rep.zero_iqr);
        assert_eq!(rep.flagged.len(), 1);
        assert_eq!(rep.flagged[0].step, 100);
    }

    #[test]
    fn too_few_values() {
        assert!(find_abnormal(&recs(&[1.0, 2.0, 3.0]), SeriesKey::Dim(Dimension::Confidence)).is_err());
    }

    #[test]
    fn gated_models_withhold_attributions() {
        let x: Vec<Vec<f64>> = (0..30).map(|i| vec![i as f64]).collect();
        let data = Dataset {
            target: SeriesKey::Dim(Dimension::Value),
            names: vec![format!("a")],
            keys: (0..30).map(|i| (format!("t"), i)).collect(),
            x,
            y: vec![1.0; 30],
        };
        let t = train_for(&data, &GbtParams::default(), 0).unwrap();
        assert!(matches!(global_importance(&t, &data), Err(AttributionError::Gated { .. })));
        assert!(matches!(local_explanation(&t, &data, 0), Err(AttributionError::Gated { .. })));
    }

    #[test]
    fn local_explanation_adds_up() {
        let x: Vec<Vec<f64>> = (0..120)
            .map(|i| (0..12).map(|j| ((i * (j + 3)) % (j + 5)) as f64).collect())
            .collect();
        let y: Vec<f64> = x.iter().map(|r| r[0] - 0.5 * r[3] + 0.1 * r[11]).collect();
        let data = Dataset {
            target: SeriesKey::Dim(Dimension::Value),
            names: (0..12).map(|j| format!("f{j}")).collect(),
            keys: (0..120).map(|i| (format!("t"), i)).collect(),
            x,
            y,
        };
        let t = train_for(&data, &GbtParams::default(), 4).unwrap();
        assert!(t.passed_gate);
        let e = local_explanation(&t, &data, 7).unwrap();
        assert_eq!(e.bars.len(), TOP_FEATURES);
        assert_eq!(e.remainder_count, 2);
        let total = e.base + e.bars.iter().map(|b| b.phi).sum::<f64>() + e.remainder;
        assert!((total - e.prediction).abs() < 1e-9);
        let g = global_importance(&t, &data).unwrap();
        assert_eq!(g.ranking[0].name, "f0");
        assert_eq!(g.beeswarm.len(), TOP_FEATURES);
    }
}
