//! Per-step environment features used as explanatory variables.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use alloc::{format, vec};

use crate::analyzers::{InterestingnessRecord, SeriesKey};
use crate::rollout::{GridworldSpec, LineworldSpec, Scenario};
use crate::trace::{ActionChoice, Trace, TraceSet};

pub const GRID_FEATURES: [&str; 12] = [
    "x",
    "y",
    "dist_goal",
    "dist_hazard",
    "near_hazard",
    "hazards_adjacent",
    "walls_adjacent",
    "step",
    "prev_action",
    "action_repeat",
    "slip_prob",
    "goal_reward",
];

pub const LINE_FEATURES: [&str; 5] = ["x", "dist_goal", "step", "push", "prev_push"];

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FeatureError {
    #[error("unknown feature {0:?}")]
    UnknownFeature(String),
    #[error("no features selected")]
    NoFeatures,
    #[error("trace {0}: observation does not match the environment")]
    BadObservation(String),
    #[error("trace {trace_id}: regime {regime} has no environment")]
    UnknownRegime { trace_id: String, regime: f64 },
    #[error("duplicate row for trace {0} step {1}")]
    DuplicateRow(String, usize),
    #[error("feature rows have inconsistent widths")]
    Ragged,
}

/// Where feature values come from.
#[derive(Debug, Clone, PartialEq)]
pub enum FeatureSource {
    /// One spec per regime, indexed by `metadata["regime"]` (0 if absent).
    Gridworld(Vec<GridworldSpec>),
    Lineworld(LineworldSpec),
    /// Raw observation components, step index and previous action.
    Generic,
}

impl FeatureSource {
    pub fn from_scenario(s: &Scenario) -> Self {
        match s {
            Scenario::Gridworld { env, .. } => FeatureSource::Gridworld(vec![env.clone()]),
            Scenario::Lineworld { env, .. } => FeatureSource::Lineworld(env.clone()),
            Scenario::Mixture { regimes, .. } => FeatureSource::Gridworld(regimes.iter().map(|r| r.env.clone()).collect()),
        }
    }

    /// All feature names this source can produce for `ts`.
    pub fn available(&self, ts: &TraceSet) -> Vec<String> {
        match self {
            FeatureSource::Gridworld(_) => GRID_FEATURES.iter().map(|s| s.to_string()).collect(),
            FeatureSource::Lineworld(_) => LINE_FEATURES.iter().map(|s| s.to_string()).collect(),
            FeatureSource::Generic => {
                let dim = ts
                    .traces
                    .iter()
                    .flat_map(|t| t.datapoints.first())
                    .map(|d| d.observation.len())
                    .next()
                    .unwrap_or(0);
                let mut names: Vec<String> = (0..dim).map(|i| format!("obs[{i}]")).collect();
                names.push("step".into());
                names.push("prev_action".into());
                names
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExtractorConfig {
    /// Subset and order of features; `None` keeps everything available.
    pub features: Option<Vec<String>>,
}

/// One row per `(trace_id, step)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub names: Vec<String>,
    pub keys: Vec<(String, usize)>,
    pub rows: Vec<Vec<f64>>,
}

/// Feature rows joined with one interestingness series; rows where the
/// series is absent are dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub target: SeriesKey,
    pub names: Vec<String>,
    pub keys: Vec<(String, usize)>,
    pub x: Vec<Vec<f64>>,
    pub y: Vec<f64>,
}

impl FeatureMatrix {
    pub fn new(names: Vec<String>, keys: Vec<(String, usize)>, rows: Vec<Vec<f64>>) -> Result<Self, FeatureError> {
        if names.is_empty() {
            return Err(FeatureError::NoFeatures);
        }
        if rows.len() != keys.len() || rows.iter().any(|r| r.len() != names.len()) {
            return Err(FeatureError::Ragged);
        }
        let mut seen = alloc::collections::BTreeSet::new();
        for (id, step) in &keys {
            if !seen.insert((id.as_str(), *step)) {
                return Err(FeatureError::DuplicateRow(id.clone(), *step));
            }
        }
        Ok(FeatureMatrix { names, keys, rows })
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn dataset(&self, records: &[InterestingnessRecord], target: SeriesKey) -> Dataset {
        let lookup: BTreeMap<(&str, usize), f64> = records
            .iter()
            .filter_map(|r| r.get(target).map(|v| ((r.trace_id.as_str(), r.step), v)))
            .collect();
        let mut keys = Vec::new();
        let mut x = Vec::new();
        let mut y = Vec::new();
        for (key, row) in self.keys.iter().zip(&self.rows) {
            if let Some(v) = lookup.get(&(key.0.as_str(), key.1)) {
                keys.push(key.clone());
                x.push(row.clone());
                y.push(*v);
            }
        }
        Dataset {
            target,
            names: self.names.clone(),
            keys,
            x,
            y,
        }
    }
}

fn regime_of(trace: &Trace) -> f64 {
    trace.metadata.get("regime").and_then(|v| v.as_f64()).unwrap_or(0.0)
}

fn action_index(a: &[ActionChoice]) -> Option<usize> {
    match a.first() {
        Some(ActionChoice::Index(i)) => Some(*i),
        _ => None,
    }
}

fn action_mean(a: &[ActionChoice]) -> f64 {
    let vals: Vec<f64> = a
        .iter()
        .flat_map(|c| match c {
            ActionChoice::Index(i) => vec![*i as f64],
            ActionChoice::Vector(v) => v.clone(),
        })
        .collect();
    crate::stats::mean(&vals).unwrap_or(0.0)
}

fn grid_row(env: &GridworldSpec, trace: &Trace, t: usize) -> Result<BTreeMap<&'static str, f64>, FeatureError> {
    let d = &trace.datapoints[t];
    let bad = || FeatureError::BadObservation(trace.trace_id.clone());
    let [ox, oy] = d.observation[..] else {
        return Err(bad());
    };
    if ox < 0.0 || oy < 0.0 || ox as usize >= env.width || oy as usize >= env.height {
        return Err(bad());
    }
    let (x, y) = (ox as usize, oy as usize);
    let s = env.index(x, y);
    let is_hazard = |cx: usize, cy: usize| env.hazards.iter().any(|h| h.x == cx && h.y == cy);
    let mut hazards_adjacent = 0.0;
    let mut walls_adjacent = 0.0;
    for (dx, dy) in [(0i64, -1i64), (0, 1), (-1, 0), (1, 0)] {
        let nx = x as i64 + dx;
        let ny = y as i64 + dy;
        if nx < 0 || ny < 0 || nx >= env.width as i64 || ny >= env.height as i64 {
            walls_adjacent += 1.0;
        } else if is_hazard(nx as usize, ny as usize) {
            hazards_adjacent += 1.0;
        }
    }
    let dist_hazard = env.hazard_distance(s) as f64;
    let prev = if t > 0 { action_index(&trace.datapoints[t - 1].action) } else { None };
    let cur = action_index(&d.action);
    let mut row = BTreeMap::new();
    row.insert("x", x as f64);
    row.insert("y", y as f64);
    row.insert("dist_goal", env.goal_distance(s) as f64);
    row.insert("dist_hazard", dist_hazard);
    row.insert("near_hazard", if dist_hazard <= 1.0 { 1.0 } else { 0.0 });
    row.insert("hazards_adjacent", hazards_adjacent);
    row.insert("walls_adjacent", walls_adjacent);
    row.insert("step", t as f64);
    row.insert("prev_action", prev.map_or(-1.0, |a| a as f64));
    row.insert("action_repeat", if prev.is_some() && prev == cur { 1.0 } else { 0.0 });
    row.insert("slip_prob", env.p_slip);
    row.insert(
        "goal_reward",
        env.goals.iter().map(|g| g.reward).fold(f64::NEG_INFINITY, f64::max).max(0.0),
    );
    Ok(row)
}

fn line_row(env: &LineworldSpec, trace: &Trace, t: usize) -> Result<BTreeMap<&'static str, f64>, FeatureError> {
    let d = &trace.datapoints[t];
    let [x] = d.observation[..] else {
        return Err(FeatureError::BadObservation(trace.trace_id.clone()));
    };
    let mut row = BTreeMap::new();
    row.insert("x", x);
    row.insert("dist_goal", env.length - x);
    row.insert("step", t as f64);
    row.insert("push", action_mean(&d.action));
    row.insert(
        "prev_push",
        if t > 0 { action_mean(&trace.datapoints[t - 1].action) } else { 0.0 },
    );
    Ok(row)
}

/// Extracts one feature row per datapoint.
pub fn build_features(ts: &TraceSet, source: &FeatureSource, config: &ExtractorConfig) -> Result<FeatureMatrix, FeatureError> {
    let available = source.available(ts);
    let names: Vec<String> = match &config.features {
        None => available.clone(),
        Some(sel) => {
            if let Some(bad) = sel.iter().find(|n| !available.contains(n)) {
                return Err(FeatureError::UnknownFeature(bad.clone()));
            }
            sel.clone()
        }
    };
    if names.is_empty() {
        return Err(FeatureError::NoFeatures);
    }
    let cols: Vec<usize> = names.iter().map(|n| available.iter().position(|a| a == n).unwrap_or(0)).collect();

    let mut keys = Vec::with_capacity(ts.datapoint_count());
    let mut rows = Vec::with_capacity(ts.datapoint_count());
    for trace in &ts.traces {
        for t in 0..trace.datapoints.len() {
            let full: Vec<f64> = match source {
                FeatureSource::Gridworld(envs) => {
                    let regime = regime_of(trace);
                    let env = envs
                        .get(regime as usize)
                        .filter(|_| regime >= 0.0 && crate::math::floor(regime) == regime)
                        .ok_or_else(|| FeatureError::UnknownRegime {
                            trace_id: trace.trace_id.clone(),
                            regime,
                        })?;
                    let row = grid_row(env, trace, t)?;
                    GRID_FEATURES.iter().map(|n| row[n]).collect()
                }
                FeatureSource::Lineworld(env) => {
                    let row = line_row(env, trace, t)?;
                    LINE_FEATURES.iter().map(|n| row[n]).collect()
                }
                FeatureSource::Generic => {
                    let d = &trace.datapoints[t];
                    if d.observation.len() + 2 != available.len() {
                        return Err(FeatureError::BadObservation(trace.trace_id.clone()));
                    }
                    let mut v = d.observation.clone();
                    v.push(t as f64);
                    let prev = if t > 0 { action_index(&trace.datapoints[t - 1].action) } else { None };
                    v.push(prev.map_or(-1.0, |a| a as f64));
                    v
                }
            };
            keys.push((trace.trace_id.clone(), trace.datapoints[t].step));
            rows.push(cols.iter().map(|&c| full[c]).collect());
        }
    }
    FeatureMatrix::new(names, keys, rows)
}
