//! Interestingness analysis of a [`TraceSet`].
//!
//! [`analyze`] emits one [`InterestingnessRecord`] per datapoint. Which
//! dimensions a record carries depends only on which model outputs the
//! datapoint (and, for history-based dimensions, its predecessors) holds:
//!
//! | dimension          | needs                                                        |
//! |--------------------|--------------------------------------------------------------|
//! | Value              | `value`                                                      |
//! | Goal Conduciveness | `value` at `t` and `t-1`                                     |
//! | Incongruity        | `value` at `t` and `t-1`                                     |
//! | Confidence         | `policy`                                                     |
//! | Riskiness         | `policy` with a discrete factor of `n >= 2`, else `action_values` with `>= 2` actions |
//! | Stochasticity      | distributional `action_values`, else a Gaussian `ensemble`   |
//! | Familiarity        | `ensemble`                                                   |

pub mod dims;

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::stats::Summary;
use crate::trace::{ActionValues, FactorSpec, InteractionDatapoint, PolicyFactor, Trace, TraceSet};

pub use dims::DEFAULT_RHO;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dimension {
    Value,
    Confidence,
    GoalConduciveness,
    Incongruity,
    Riskiness,
    Stochasticity,
    Familiarity,
}

impl Dimension {
    pub const ALL: [Dimension; 7] = [
        Dimension::Value,
        Dimension::Confidence,
        Dimension::GoalConduciveness,
        Dimension::Incongruity,
        Dimension::Riskiness,
        Dimension::Stochasticity,
        Dimension::Familiarity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Dimension::Value => "value",
            Dimension::Confidence => "confidence",
            Dimension::GoalConduciveness => "goal_conduciveness",
            Dimension::Incongruity => "incongruity",
            Dimension::Riskiness => "riskiness",
            Dimension::Stochasticity => "stochasticity",
            Dimension::Familiarity => "familiarity",
        }
    }

    pub fn from_name(name: &str) -> Option<Dimension> {
        Dimension::ALL.into_iter().find(|d| d.name() == name)
    }

    /// Dimensions that have per-action-factor breakdowns.
    pub fn is_factored(self) -> bool {
        matches!(self, Dimension::Confidence | Dimension::Riskiness)
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A column of interestingness data: a whole dimension or one action
/// factor's share of it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SeriesKey {
    Dim(Dimension),
    Factor(Dimension, usize),
}

impl SeriesKey {
    pub fn dimension(self) -> Dimension {
        match self {
            SeriesKey::Dim(d) | SeriesKey::Factor(d, _) => d,
        }
    }

    /// `confidence`, or `confidence[2]` for factor 2.
    pub fn column_name(self) -> String {
        match self {
            SeriesKey::Dim(d) => d.name().into(),
            SeriesKey::Factor(d, i) => format!("{}[{i}]", d.name()),
        }
    }

    pub fn parse(column: &str) -> Option<SeriesKey> {
        match column.split_once('[') {
            None => Dimension::from_name(column).map(SeriesKey::Dim),
            Some((dim, rest)) => {
                let idx = rest.strip_suffix(']')?.parse().ok()?;
                let d = Dimension::from_name(dim)?;
                d.is_factored().then_some(SeriesKey::Factor(d, idx))
            }
        }
    }
}

impl fmt::Display for SeriesKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.column_name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InterestingnessRecord {
    pub trace_id: String,
    pub step: usize,
    pub values: BTreeMap<Dimension, f64>,
    /// Only filled when the action space has two or more factors.
    pub per_factor: BTreeMap<(Dimension, usize), f64>,
}

impl InterestingnessRecord {
    pub fn new(trace_id: &str, step: usize) -> Self {
        InterestingnessRecord {
            trace_id: trace_id.into(),
            step,
            values: BTreeMap::new(),
            per_factor: BTreeMap::new(),
        }
    }

    pub fn get(&self, key: SeriesKey) -> Option<f64> {
        match key {
            SeriesKey::Dim(d) => self.values.get(&d).copied(),
            SeriesKey::Factor(d, i) => self.per_factor.get(&(d, i)).copied(),
        }
    }

    pub fn keys(&self) -> impl Iterator<Item = SeriesKey> + '_ {
        self.values
            .keys()
            .map(|d| SeriesKey::Dim(*d))
            .chain(self.per_factor.keys().map(|(d, i)| SeriesKey::Factor(*d, *i)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValueMode {
    /// Min-max over every timestep of every trace (two passes).
    #[default]
    Offline,
    /// Running min-max over the trace prefix seen so far.
    Online,
}

/// How the TD error behind Incongruity pairs rewards with states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TdIndexing {
    /// `r_t + gamma V(s_t) - V(s_{t-1})`.
    #[default]
    AsPrinted,
    /// `r_{t-1} + gamma V(s_t) - V(s_{t-1})`: the reward earned on the
    /// transition from `s_{t-1}` to `s_t`.
    PreviousReward,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AnalyzerConfig {
    pub dimensions: Vec<Dimension>,
    pub rho: f64,
    pub value_mode: ValueMode,
    pub td_indexing: TdIndexing,
    /// Reference scale for the continuous Stochasticity surrogate.
    pub continuous_scale: f64,
}

impl Default for AnalyzerConfig {
    fn default() -> Self {
        AnalyzerConfig {
            dimensions: Dimension::ALL.to_vec(),
            rho: DEFAULT_RHO,
            value_mode: ValueMode::Offline,
            td_indexing: TdIndexing::AsPrinted,
            continuous_scale: 1.0,
        }
    }
}

/// Value-function extremes used for min-max scaling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizationState {
    pub v_min: f64,
    pub v_max: f64,
    pub mode: ValueMode,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AnalyzeError {
    #[error("no dimensions selected")]
    NoDimensions,
    #[error("rho must be finite")]
    BadRho,
    #[error("continuous reference scale must be finite and positive")]
    BadScale,
    #[error("trace {trace_id} step {step}: {source}")]
    Dispersion {
        trace_id: String,
        step: usize,
        source: dims::DispersionError,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum AnalysisWarning {
    /// No reward range in the header; the observed one was used.
    RewardRangeObserved { min: f64, max: f64 },
    /// Reward range has zero width; Incongruity is 0 throughout.
    DegenerateRewardRange,
    /// Value function is constant over the normalization window.
    DegenerateValueRange,
}

/// How many records carry each dimension.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Coverage {
    pub records: usize,
    pub dimensions: BTreeMap<Dimension, usize>,
    pub factor_columns: Vec<String>,
}

impl Coverage {
    pub fn available(&self) -> Vec<Dimension> {
        self.dimensions.iter().filter(|(_, n)| **n > 0).map(|(d, _)| *d).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Analysis {
    pub records: Vec<InterestingnessRecord>,
    pub coverage: Coverage,
    pub normalization: Option<NormalizationState>,
    pub warnings: Vec<AnalysisWarning>,
}

#[derive(Debug, Clone, Copy)]
struct Extremes {
    min: f64,
    max: f64,
}

impl Extremes {
    const EMPTY: Extremes = Extremes {
        min: f64::INFINITY,
        max: f64::NEG_INFINITY,
    };

    fn push(&mut self, x: f64) {
        self.min = self.min.min(x);
        self.max = self.max.max(x);
    }

    fn is_set(&self) -> bool {
        self.min <= self.max
    }

    fn width(&self) -> f64 {
        if self.is_set() {
            self.max - self.min
        } else {
            0.0
        }
    }
}

/// Dataset-wide normalizers: value range, expected-Q range, reward range.
#[derive(Debug, Clone, Copy)]
struct Normalizers {
    value: Extremes,
    q: Extremes,
    reward: Extremes,
}

impl Normalizers {
    fn observe(&mut self, dp: &InteractionDatapoint, fixed_reward: bool) {
        if let Some(v) = dp.value {
            self.value.push(v);
        }
        if let Some(q) = &dp.action_values {
            for x in q.expectations() {
                self.q.push(x);
            }
        }
        if !fixed_reward {
            self.reward.push(dp.reward);
        }
    }

    fn norm_state(&self, mode: ValueMode) -> NormalizationState {
        let (v_min, v_max) = if self.value.is_set() {
            (self.value.min, self.value.max)
        } else {
            (0.0, 0.0)
        };
        NormalizationState { v_min, v_max, mode }
    }
}

/// Computes interestingness for every datapoint of `ts`.
pub fn analyze(ts: &TraceSet, config: &AnalyzerConfig) -> Result<Analysis, AnalyzeError> {
    if config.dimensions.is_empty() {
        return Err(AnalyzeError::NoDimensions);
    }
    if !config.rho.is_finite() {
        return Err(AnalyzeError::BadRho);
    }
    if !(config.continuous_scale.is_finite() && config.continuous_scale > 0.0) {
        return Err(AnalyzeError::BadScale);
    }

    let mut warnings = Vec::new();
    let fixed_reward = ts.reward_range.is_some();
    let mut base = Normalizers {
        value: Extremes::EMPTY,
        q: Extremes::EMPTY,
        reward: Extremes::EMPTY,
    };
    if let Some((lo, hi)) = ts.reward_range {
        base.reward = Extremes { min: lo, max: hi };
    }

    // Phase 1: dataset-wide reduction (offline mode only).
    let mut normalization = None;
    if config.value_mode == ValueMode::Offline {
        for dp in ts.traces.iter().flat_map(|t| &t.datapoints) {
            base.observe(dp, fixed_reward);
        }
        let state = base.norm_state(ValueMode::Offline);
        if base.value.is_set() && base.value.width() == 0.0 {
            warnings.push(AnalysisWarning::DegenerateValueRange);
        }
        normalization = Some(state);
    }
    if !fixed_reward && base.reward.is_set() {
        log::warn!("no reward range declared; using observed range");
        warnings.push(AnalysisWarning::RewardRangeObserved {
            min: base.reward.min,
            max: base.reward.max,
        });
    }
    if base.reward.is_set() && base.reward.width() == 0.0 {
        log::warn!("reward range has zero width; incongruity is 0");
        warnings.push(AnalysisWarning::DegenerateRewardRange);
    }

    // Phase 2: per-timestep map.
    let mut records = Vec::with_capacity(ts.datapoint_count());
    for trace in &ts.traces {
        analyze_trace(ts, trace, config, &base, &mut records)?;
    }

    let coverage = coverage_of(&records);
    Ok(Analysis {
        records,
        coverage,
        normalization,
        warnings,
    })
}

fn coverage_of(records: &[InterestingnessRecord]) -> Coverage {
    let mut coverage = Coverage {
        records: records.len(),
        ..Coverage::default()
    };
    for d in Dimension::ALL {
        coverage.dimensions.insert(d, 0);
    }
    let mut factor_cols = alloc::collections::BTreeSet::new();
    for r in records {
        for d in r.values.keys() {
            *coverage.dimensions.entry(*d).or_default() += 1;
        }
        for (d, i) in r.per_factor.keys() {
            factor_cols.insert(SeriesKey::Factor(*d, *i));
        }
    }
    coverage.factor_columns = factor_cols.into_iter().map(SeriesKey::column_name).collect();
    coverage
}

fn analyze_trace(
    ts: &TraceSet,
    trace: &Trace,
    config: &AnalyzerConfig,
    base: &Normalizers,
    out: &mut Vec<InterestingnessRecord>,
) -> Result<(), AnalyzeError> {
    let wants = |d: Dimension| config.dimensions.contains(&d);
    let factors = &ts.action_space.factors;
    let multi_factor = factors.len() >= 2;
    let online = config.value_mode == ValueMode::Online;
    let fixed_reward = ts.reward_range.is_some();

    let mut running = *base;
    for (t, dp) in trace.datapoints.iter().enumerate() {
        if online {
            running.observe(dp, fixed_reward);
        }
        let norm = running.norm_state(config.value_mode);
        let mut rec = InterestingnessRecord::new(&trace.trace_id, dp.step);
        let prev = t.checked_sub(1).map(|i| &trace.datapoints[i]);
        let prev2 = t.checked_sub(2).map(|i| &trace.datapoints[i]);

        if let Some(v) = dp.value {
            if wants(Dimension::Value) {
                rec.values.insert(Dimension::Value, dims::value(v, &norm));
            }
            if let Some(v_prev) = prev.and_then(|p| p.value) {
                if wants(Dimension::GoalConduciveness) {
                    let n = |x: f64| dims::normalized_value(x, &norm);
                    let v2 = prev2.and_then(|p| p.value).map(n);
                    let g = dims::goal_conduciveness(n(v), n(v_prev), v2, config.rho);
                    rec.values.insert(Dimension::GoalConduciveness, g);
                }
                if wants(Dimension::Incongruity) {
                    let reward = match config.td_indexing {
                        TdIndexing::AsPrinted => dp.reward,
                        TdIndexing::PreviousReward => prev.map_or(dp.reward, |p| p.reward),
                    };
                    let i = dims::incongruity(reward, v, v_prev, ts.discount, running.reward.width());
                    rec.values.insert(Dimension::Incongruity, i);
                }
            }
        }

        if let Some(policy) = &dp.policy {
            if wants(Dimension::Confidence) {
                let mut per = Vec::with_capacity(policy.len());
                for (i, (p, f)) in policy.iter().zip(factors).enumerate() {
                    let c = match (p, f) {
                        (PolicyFactor::Discrete(d), _) => dims::confidence_discrete(d),
                        (PolicyFactor::Gaussian(g), FactorSpec::Continuous { lower, upper, .. }) => {
                            dims::confidence_continuous(g, lower, upper).map_err(|source| AnalyzeError::Dispersion {
                                trace_id: trace.trace_id.clone(),
                                step: dp.step,
                                source,
                            })?
                        }
                        (PolicyFactor::Gaussian(_), FactorSpec::Discrete { .. }) => continue,
                    };
                    if multi_factor {
                        rec.per_factor.insert((Dimension::Confidence, i), c);
                    }
                    per.push(c);
                }
                if let Some(c) = dims::aggregate_factors(&per) {
                    rec.values.insert(Dimension::Confidence, c);
                }
            }
        }

        if wants(Dimension::Riskiness) {
            let mut per = Vec::new();
            if let Some(policy) = &dp.policy {
                for (i, p) in policy.iter().enumerate() {
                    if let PolicyFactor::Discrete(d) = p {
                        if let Some(r) = dims::riskiness_policy(d) {
                            if multi_factor {
                                rec.per_factor.insert((Dimension::Riskiness, i), r);
                            }
                            per.push(r);
                        }
                    }
                }
            }
            let risk = match dims::aggregate_factors(&per) {
                Some(r) => Some(r),
                None => dp
                    .action_values
                    .as_ref()
                    .and_then(|q| dims::riskiness_value(&q.expectations(), running.q.width())),
            };
            if let Some(r) = risk {
                rec.values.insert(Dimension::Riskiness, r);
            }
        }

        if wants(Dimension::Stochasticity) {
            let s = match (&dp.action_values, &dp.ensemble) {
                (Some(ActionValues::Distributional(q)), _) => dims::stochasticity_discrete(q),
                (_, Some(ens)) if ens.is_distributional() => {
                    dims::stochasticity_continuous(&dims::gaussians(ens), config.continuous_scale).map_err(|source| {
                        AnalyzeError::Dispersion {
                            trace_id: trace.trace_id.clone(),
                            step: dp.step,
                            source,
                        }
                    })?
                }
                _ => None,
            };
            if let Some(s) = s {
                rec.values.insert(Dimension::Stochasticity, s);
            }
        }

        if wants(Dimension::Familiarity) {
            if let Some(f) = dp.ensemble.as_ref().and_then(dims::familiarity) {
                rec.values.insert(Dimension::Familiarity, f);
            }
        }

        out.push(rec);
    }
    Ok(())
}

/// Per-series mean and standard deviation.
pub type Profile = BTreeMap<SeriesKey, Summary>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("no interestingness records")]
pub struct EmptyRecords;

/// Mean and population standard deviation of every series over all
/// timesteps of all traces (radar-chart data).
pub fn interestingness_profile(records: &[InterestingnessRecord]) -> Result<Profile, EmptyRecords> {
    profile_of(records.iter())
}

pub fn profile_of<'a>(records: impl Iterator<Item = &'a InterestingnessRecord>) -> Result<Profile, EmptyRecords> {
    let mut columns: BTreeMap<SeriesKey, Vec<f64>> = BTreeMap::new();
    let mut any = false;
    for r in records {
        any = true;
        for key in r.keys() {
            if let Some(x) = r.get(key) {
                columns.entry(key).or_default().push(x);
            }
        }
    }
    if !any {
        return Err(EmptyRecords);
    }
    Ok(columns
        .into_iter()
        .filter_map(|(k, xs)| Summary::of(&xs).map(|s| (k, s)))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trace::*;
    use alloc::vec;

    fn dp(step: usize, value: f64) -> InteractionDatapoint {
        InteractionDatapoint {
            step,
            observation: vec![0.0],
            action: vec![ActionChoice::Index(0)],
            reward: 0.0,
            value: Some(value),
            policy: None,
            action_values: None,
            ensemble: None,
        }
    }

    fn set_of(values: &[f64]) -> TraceSet {
        TraceSet {
            action_space: ActionSpaceSpec::single_discrete("a", 2),
            discount: 0.9,
            reward_range: Some((-1.0, 1.0)),
            traces: vec![Trace {
                trace_id: "t".into(),
                datapoints: values.iter().enumerate().map(|(i, v)| dp(i, *v)).collect(),
                terminal: false,
                metadata: BTreeMap::new(),
            }],
        }
    }

    #[test]
    fn series_key_column_names_round_trip() {
        for key in [
            SeriesKey::Dim(Dimension::GoalConduciveness),
            SeriesKey::Factor(Dimension::Confidence, 3),
        ] {
            assert_eq!(SeriesKey::parse(&key.column_name()), Some(key));
        }
        assert_eq!(SeriesKey::parse("value[1]"), None);
        assert_eq!(SeriesKey::parse("nonsense"), None);
    }

    #[test]
    fn offline_value_uses_global_extremes() {
        let a = analyze(&set_of(&[2.0, 4.0, 6.0]), &AnalyzerConfig::default()).unwrap();
        let vals: Vec<f64> = a.records.iter().map(|r| r.values[&Dimension::Value]).collect();
        assert_eq!(vals, vec![-1.0, 0.0, 1.0]);
        assert_eq!(a.normalization.unwrap().v_min, 2.0);
    }

    #[test]
    fn value_only_trace_availability() {
        let a = analyze(&set_of(&[0.0, 1.0, 2.0]), &AnalyzerConfig::default()).unwrap();
        assert!(!a.records[0].values.contains_key(&Dimension::GoalConduciveness));
        assert!(!a.records[0].values.contains_key(&Dimension::Incongruity));
        assert!(a.records[1].values.contains_key(&Dimension::GoalConduciveness));
        assert_eq!(
            a.coverage.available(),
            vec![Dimension::Value, Dimension::GoalConduciveness, Dimension::Incongruity]
        );
    }

    #[test]
    fn warm_up_uses_first_order_difference() {
        let cfg = AnalyzerConfig {
            rho: 1.0,
            ..AnalyzerConfig::default()
        };
        let a = analyze(&set_of(&[0.0, 1.0, 0.0, 1.0]), &cfg).unwrap();
        let g1 = a.records[1].values[&Dimension::GoalConduciveness];
        assert!((g1 - dims::goal_conduciveness(1.0, 0.0, None, 1.0)).abs() < 1e-15);
        let g2 = a.records[2].values[&Dimension::GoalConduciveness];
        assert!((g2 - dims::goal_conduciveness(0.0, 1.0, Some(0.0), 1.0)).abs() < 1e-15);
    }

    #[test]
    fn empty_dimension_list_is_an_error() {
        let cfg = AnalyzerConfig {
            dimensions: vec![],
            ..AnalyzerConfig::default()
        };
        assert_eq!(analyze(&set_of(&[0.0]), &cfg).unwrap_err(), AnalyzeError::NoDimensions);
    }

    #[test]
    fn profile_examples() {
        let mut a = InterestingnessRecord::new("t", 0);
        a.values.insert(Dimension::Value, -1.0);
        let mut b = InterestingnessRecord::new("t", 1);
        b.values.insert(Dimension::Value, 1.0);
        let p = interestingness_profile(&[a.clone(), b]).unwrap();
        assert_eq!(p[&SeriesKey::Dim(Dimension::Value)].mean, 0.0);
        let p = interestingness_profile(&[a.clone(), a]).unwrap();
        assert_eq!(p[&SeriesKey::Dim(Dimension::Value)].stddev, 0.0);
        assert_eq!(interestingness_profile(&[]), Err(EmptyRecords));
    }

    #[test]
    fn td_indexing_switch() {
        let mut ts = set_of(&[1.0, 1.0]);
        ts.traces[0].datapoints[0].reward = 0.5;
        ts.traces[0].datapoints[1].reward = -0.5;
        let printed = analyze(&ts, &AnalyzerConfig::default()).unwrap();
        let prev = analyze(
            &ts,
            &AnalyzerConfig {
                td_indexing: TdIndexing::PreviousReward,
                ..AnalyzerConfig::default()
            },
        )
        .unwrap();
        let i = |a: &Analysis| a.records[1].values[&Dimension::Incongruity];
        assert!((i(&printed) - (-0.5 + 0.9 - 1.0) / 2.0).abs() < 1e-15);
        assert!((i(&prev) - (0.5 + 0.9 - 1.0) / 2.0).abs() < 1e-15);
    }
}
