//! Interaction-data schema.
//!
//! A [`TraceSet`] holds every trace recorded for one agent together with
//! the action-space description, the discount factor and (optionally) the
//! reward range of the task. Each [`InteractionDatapoint`] stores what was
//! observed at one timestep plus whatever the agent's learned models
//! reported when probed at that step. Model outputs are optional; the
//! analyzers only produce the dimensions whose inputs are present.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

/// Tolerance on probability sums.
pub const PROB_SUM_TOLERANCE: f64 = 1e-6;

/// One independently controlled part of the action space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FactorSpec {
    Discrete {
        name: String,
        n: usize,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        labels: Vec<String>,
    },
    Continuous {
        name: String,
        lower: Vec<f64>,
        upper: Vec<f64>,
    },
}

impl FactorSpec {
    pub fn name(&self) -> &str {
        match self {
            FactorSpec::Discrete { name, .. } | FactorSpec::Continuous { name, .. } => name,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionSpaceSpec {
    pub factors: Vec<FactorSpec>,
}

impl ActionSpaceSpec {
    pub fn single_discrete(name: &str, n: usize) -> Self {
        ActionSpaceSpec {
            factors: alloc::vec![FactorSpec::Discrete {
                name: name.into(),
                n,
                labels: Vec::new(),
            }],
        }
    }

    pub fn validate(&self) -> Result<(), ValidationError> {
        if self.factors.is_empty() {
            return Err(ValidationError::header("action_space.factors", "at least one factor required"));
        }
        let mut names = BTreeSet::new();
        for (i, f) in self.factors.iter().enumerate() {
            let field = format!("action_space.factors[{i}]");
            if !names.insert(f.name()) {
                return Err(ValidationError::header(&field, "duplicate factor name"));
            }
            match f {
                FactorSpec::Discrete { n, labels, .. } => {
                    if *n < 1 {
                        return Err(ValidationError::header(&field, "discrete factor needs n >= 1"));
                    }
                    if !labels.is_empty() && labels.len() != *n {
                        return Err(ValidationError::header(&field, "label count differs from n"));
                    }
                }
                FactorSpec::Continuous { lower, upper, .. } => {
                    if lower.is_empty() || lower.len() != upper.len() {
                        return Err(ValidationError::header(&field, "bounds must be non-empty and equally long"));
                    }
                    let ordered = lower
                        .iter()
                        .zip(upper)
                        .all(|(l, u)| l.is_finite() && u.is_finite() && l < u);
                    if !ordered {
                        return Err(ValidationError::header(&field, "need finite lower < upper componentwise"));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Categorical distribution, e.g. a discrete policy `pi(.|s)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscreteDistribution {
    pub probs: Vec<f64>,
}

impl DiscreteDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self, String> {
        let d = DiscreteDistribution { probs };
        d.check()?;
        Ok(d)
    }

    pub fn uniform(n: usize) -> Self {
        DiscreteDistribution {
            probs: alloc::vec![1.0 / n as f64; n],
        }
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    fn check(&self) -> Result<(), String> {
        check_probs(&self.probs)
    }
}

/// Distribution over a fixed ordered return support (categorical Q).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomDistribution {
    pub atoms: Vec<f64>,
    pub probs: Vec<f64>,
}

impl AtomDistribution {
    pub fn new(atoms: Vec<f64>, probs: Vec<f64>) -> Result<Self, String> {
        let d = AtomDistribution { atoms, probs };
        d.check()?;
        Ok(d)
    }

    pub fn expectation(&self) -> f64 {
        self.atoms.iter().zip(&self.probs).map(|(z, p)| z * p).sum()
    }

    fn check(&self) -> Result<(), String> {
        if self.atoms.len() != self.probs.len() {
            return Err(format!(
                "{} atoms but {} probabilities",
                self.atoms.len(),
                self.probs.len()
            ));
        }
        if self.atoms.iter().any(|z| !z.is_finite()) {
            return Err("non-finite atom".into());
        }
        if self.atoms.windows(2).any(|w| w[0] >= w[1]) {
            return Err("atoms must be strictly increasing".into());
        }
        check_probs(&self.probs)
    }
}

/// Diagonal Gaussian, used for continuous policies and probabilistic
/// forward-model outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianSpec {
    pub mean: Vec<f64>,
    pub stddev: Vec<f64>,
}

impl GaussianSpec {
    pub fn new(mean: Vec<f64>, stddev: Vec<f64>) -> Result<Self, String> {
        let g = GaussianSpec { mean, stddev };
        g.check()?;
        Ok(g)
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    fn check(&self) -> Result<(), String> {
        if self.mean.is_empty() || self.mean.len() != self.stddev.len() {
            return Err("mean and stddev must be non-empty and equally long".into());
        }
        if self.mean.iter().any(|m| !m.is_finite()) {
            return Err("non-finite mean".into());
        }
        if self.stddev.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
            return Err("stddev must be finite and > 0".into());
        }
        Ok(())
    }
}

fn check_probs(probs: &[f64]) -> Result<(), String> {
    if probs.is_empty() {
        return Err("empty distribution".into());
    }
    if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
        return Err("probabilities must be finite and >= 0".into());
    }
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > PROB_SUM_TOLERANCE {
        return Err(format!("probabilities sum to {sum}"));
    }
    Ok(())
}

/// One forward model's prediction of the next state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum EnsembleMember {
    Point(Vec<f64>),
    Gaussian(GaussianSpec),
}

impl EnsembleMember {
    pub fn dim(&self) -> usize {
        match self {
            EnsembleMember::Point(v) => v.len(),
            EnsembleMember::Gaussian(g) => g.dim(),
        }
    }
}

/// Predictions of `K` bootstrapped forward models for the same `(s, a)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsemblePrediction {
    pub members: Vec<EnsembleMember>,
}

impl EnsemblePrediction {
    pub fn is_distributional(&self) -> bool {
        matches!(self.members.first(), Some(EnsembleMember::Gaussian(_)))
    }

    fn check(&self) -> Result<(), String> {
        if self.members.len() < 2 {
            return Err("ensemble needs at least 2 members".into());
        }
        let first = &self.members[0];
        let dim = first.dim();
        for m in &self.members {
            let same_kind = matches!(
                (first, m),
                (EnsembleMember::Point(_), EnsembleMember::Point(_))
                    | (EnsembleMember::Gaussian(_), EnsembleMember::Gaussian(_))
            );
            if !same_kind {
                return Err("members mix point and distributional predictions".into());
            }
            if m.dim() != dim || dim == 0 {
                return Err("members disagree on dimensionality".into());
            }
            match m {
                EnsembleMember::Point(v) => {
                    if v.iter().any(|x| !x.is_finite()) {
                        return Err("non-finite point prediction".into());
                    }
                }
                EnsembleMember::Gaussian(g) => g.check()?,
            }
        }
        Ok(())
    }
}

/// Chosen action for one factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ActionChoice {
    Index(usize),
    Vector(Vec<f64>),
}

/// Policy output for one factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PolicyFactor {
    Discrete(DiscreteDistribution),
    Gaussian(GaussianSpec),
}

/// Action-value output, either expected `Q(s, a)` per action or a return
/// distribution per action.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ActionValues {
    Scalar(Vec<f64>),
    Distributional(Vec<AtomDistribution>),
}

impl ActionValues {
    pub fn len(&self) -> usize {
        match self {
            ActionValues::Scalar(q) => q.len(),
            ActionValues::Distributional(d) => d.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Expected value per action.
    pub fn expectations(&self) -> Vec<f64> {
        match self {
            ActionValues::Scalar(q) => q.clone(),
            ActionValues::Distributional(d) => d.iter().map(AtomDistribution::expectation).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InteractionDatapoint {
    pub step: usize,
    pub observation: Vec<f64>,
    pub action: Vec<ActionChoice>,
    pub reward: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub policy: Option<Vec<PolicyFactor>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action_values: Option<ActionValues>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ensemble: Option<EnsemblePrediction>,
}

/// Free-form per-trace annotation (seed, score, outcome, regime, ...).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MetaValue {
    Number(f64),
    Text(String),
}

impl MetaValue {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            MetaValue::Number(x) => Some(*x),
            MetaValue::Text(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub trace_id: String,
    pub datapoints: Vec<InteractionDatapoint>,
    pub terminal: bool,
    pub metadata: BTreeMap<String, MetaValue>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceSet {
    pub action_space: ActionSpaceSpec,
    pub discount: f64,
    pub reward_range: Option<(f64, f64)>,
    pub traces: Vec<Trace>,
}

/// Where in a trace set a schema violation happened.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationError {
    pub trace_id: Option<String>,
    pub step: Option<usize>,
    pub field: String,
    pub reason: String,
}

impl ValidationError {
    pub fn header(field: &str, reason: &str) -> Self {
        ValidationError {
            trace_id: None,
            step: None,
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub fn at(trace_id: &str, step: Option<usize>, field: &str, reason: impl Into<String>) -> Self {
        ValidationError {
            trace_id: Some(trace_id.into()),
            step,
            field: field.into(),
            reason: reason.into(),
        }
    }
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(id) = &self.trace_id {
            write!(f, "trace {id}")?;
            if let Some(step) = self.step {
                write!(f, " step {step}")?;
            }
            write!(f, ": ")?;
        }
        write!(f, "{}: {}", self.field, self.reason)
    }
}

impl core::error::Error for ValidationError {}

impl InteractionDatapoint {
    pub fn has_model_output(&self) -> bool {
        self.value.is_some() || self.policy.is_some() || self.action_values.is_some() || self.ensemble.is_some()
    }

    /// Checks this datapoint against the action space and optional reward
    /// range; `trace_id` is used only for error reporting.
    pub fn validate(
        &self,
        trace_id: &str,
        space: &ActionSpaceSpec,
        reward_range: Option<(f64, f64)>,
    ) -> Result<(), ValidationError> {
        let step = Some(self.step);
        let err = |field: &str, reason: String| ValidationError::at(trace_id, step, field, reason);

        if self.observation.iter().any(|x| !x.is_finite()) {
            return Err(err("observation", "non-finite entry".into()));
        }
        if !self.reward.is_finite() {
            return Err(err("reward", "non-finite".into()));
        }
        if let Some((lo, hi)) = reward_range {
            if self.reward < lo || self.reward > hi {
                return Err(err("reward", format!("{} outside reward range [{lo}, {hi}]", self.reward)));
            }
        }
        if !self.has_model_output() {
            return Err(err(
                "value|policy|action_values|ensemble",
                "at least one model output is required".into(),
            ));
        }
        if let Some(v) = self.value {
            if !v.is_finite() {
                return Err(err("value", "non-finite".into()));
            }
        }

        if self.action.len() != space.factors.len() {
            return Err(err(
                "action",
                format!("{} entries for {} factors", self.action.len(), space.factors.len()),
            ));
        }
        for (i, (a, f)) in self.action.iter().zip(&space.factors).enumerate() {
            let field = format!("action[{i}]");
            match (a, f) {
                (ActionChoice::Index(idx), FactorSpec::Discrete { n, .. }) => {
                    if idx >= n {
                        return Err(err(&field, format!("index {idx} out of {n} actions")));
                    }
                }
                (ActionChoice::Vector(v), FactorSpec::Continuous { lower, upper, .. }) => {
                    if v.len() != lower.len() {
                        return Err(err(&field, format!("dimension {} != {}", v.len(), lower.len())));
                    }
                    let inside = v
                        .iter()
                        .zip(lower.iter().zip(upper))
                        .all(|(x, (l, u))| x.is_finite() && x >= l && x <= u);
                    if !inside {
                        return Err(err(&field, "component outside factor bounds".into()));
                    }
                }
                _ => return Err(err(&field, "kind does not match factor".into())),
            }
        }

        if let Some(policy) = &self.policy {
            if policy.len() != space.factors.len() {
                return Err(err(
                    "policy",
                    format!("{} entries for {} factors", policy.len(), space.factors.len()),
                ));
            }
            for (i, (p, f)) in policy.iter().zip(&space.factors).enumerate() {
                let field = format!("policy[{i}]");
                match (p, f) {
                    (PolicyFactor::Discrete(d), FactorSpec::Discrete { n, .. }) => {
                        d.check().map_err(|r| err(&field, r))?;
                        if d.len() != *n {
                            return Err(err(&field, format!("{} probabilities for {n} actions", d.len())));
                        }
                    }
                    (PolicyFactor::Gaussian(g), FactorSpec::Continuous { lower, .. }) => {
                        g.check().map_err(|r| err(&field, r))?;
                        if g.dim() != lower.len() {
                            return Err(err(&field, format!("dimension {} != {}", g.dim(), lower.len())));
                        }
                    }
                    _ => return Err(err(&field, "kind does not match factor".into())),
                }
            }
        }

        if let Some(q) = &self.action_values {
            if q.is_empty() {
                return Err(err("action_values", "no actions".into()));
            }
            match q {
                ActionValues::Scalar(vals) => {
                    if vals.iter().any(|x| !x.is_finite()) {
                        return Err(err("action_values", "non-finite entry".into()));
                    }
                }
                ActionValues::Distributional(dists) => {
                    for (i, d) in dists.iter().enumerate() {
                        d.check().map_err(|r| err(&format!("action_values[{i}]"), r))?;
                    }
                }
            }
            if let [FactorSpec::Discrete { n, .. }] = space.factors.as_slice() {
                if q.len() != *n {
                    return Err(err("action_values", format!("{} entries for {n} actions", q.len())));
                }
            }
        }

        if let Some(ens) = &self.ensemble {
            ens.check().map_err(|r| err("ensemble", r))?;
        }
        Ok(())
    }
}

impl Trace {
    pub fn len(&self) -> usize {
        self.datapoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.datapoints.is_empty()
    }

    pub fn score(&self) -> f64 {
        self.datapoints.iter().map(|d| d.reward).sum()
    }

    pub fn validate(&self, space: &ActionSpaceSpec, reward_range: Option<(f64, f64)>) -> Result<(), ValidationError> {
        if self.datapoints.is_empty() {
            return Err(ValidationError::at(&self.trace_id, None, "datapoints", "trace is empty"));
        }
        for (t, dp) in self.datapoints.iter().enumerate() {
            if dp.step != t {
                return Err(ValidationError::at(
                    &self.trace_id,
                    Some(dp.step),
                    "step",
                    format!("expected step {t}, steps must be contiguous from 0"),
                ));
            }
            dp.validate(&self.trace_id, space, reward_range)?;
        }
        for (k, v) in &self.metadata {
            if let MetaValue::Number(x) = v {
                if !x.is_finite() {
                    return Err(ValidationError::at(&self.trace_id, None, &format!("metadata.{k}"), "non-finite"));
                }
            }
        }
        Ok(())
    }
}

/// Reward extremes found in the data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RewardRange {
    pub min: f64,
    pub max: f64,
}

impl RewardRange {
    pub fn width(&self) -> f64 {
        self.max - self.min
    }

    pub fn is_degenerate(&self) -> bool {
        self.width() <= 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("trace set contains no datapoints")]
pub struct EmptyTraceSet;

impl TraceSet {
    pub fn validate(&self) -> Result<(), ValidationError> {
        self.action_space.validate()?;
        if !(self.discount.is_finite() && (0.0..=1.0).contains(&self.discount)) {
            return Err(ValidationError::header("discount", "must lie in [0, 1]"));
        }
        if let Some((lo, hi)) = self.reward_range {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(ValidationError::header("reward_range", "need finite min <= max"));
            }
        }
        let mut ids = BTreeSet::new();
        for trace in &self.traces {
            if !ids.insert(trace.trace_id.as_str()) {
                return Err(ValidationError::at(&trace.trace_id, None, "trace_id", "duplicate trace id"));
            }
            trace.validate(&self.action_space, self.reward_range)?;
        }
        Ok(())
    }

    pub fn datapoint_count(&self) -> usize {
        self.traces.iter().map(Trace::len).sum()
    }

    pub fn trace(&self, id: &str) -> Option<&Trace> {
        self.traces.iter().find(|t| t.trace_id == id)
    }

    /// Reward range to use for normalization: the declared one when set,
    /// otherwise the observed extremes.
    pub fn effective_reward_range(&self) -> Result<RewardRange, EmptyTraceSet> {
        match self.reward_range {
            Some((min, max)) => Ok(RewardRange { min, max }),
            None => observed_reward_range(self),
        }
    }
}

/// Elementwise min/max of all rewards across all traces.
pub fn observed_reward_range(ts: &TraceSet) -> Result<RewardRange, EmptyTraceSet> {
    let mut it = ts.traces.iter().flat_map(|t| t.datapoints.iter().map(|d| d.reward));
    let first = it.next().ok_or(EmptyTraceSet)?;
    let (min, max) = it.fold((first, first), |(lo, hi), r| (lo.min(r), hi.max(r)));
    let range = RewardRange { min, max };
    if range.is_degenerate() {
        log::warn!("observed reward range is degenerate ({min}, {max})");
    }
    Ok(range)
}
