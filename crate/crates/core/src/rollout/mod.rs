//! Desk-scale trace generation.
//!
//! Two toy tasks cover every kind of model output the analyzers consume:
//!
//! * [`gridworld`]: a slippery grid with goal and hazard cells. The agent
//!   is tabular: value iteration gives `V` and `Q`, a softmax over `Q`
//!   gives the policy, a categorical (51-atom) return distribution is
//!   built by distributional Bellman backups, and an ensemble of
//!   bootstrapped count models predicts the next state.
//! * [`lineworld`]: a 1-D continuous corridor driven by several continuous
//!   actuators with Gaussian policies and a Gaussian forward-model
//!   ensemble.
//!
//! Every trace draws from its own RNG stream derived from `(seed, index)`,
//! so generation is deterministic and order-independent.

pub mod gridworld;
pub mod lineworld;

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::trace::{MetaValue, TraceSet};

pub use gridworld::{GridAgent, GridAgentConfig, GridworldSpec};
pub use lineworld::{LineAgent, LineAgentConfig, LineworldSpec};

pub type TraceRng = ChaCha8Rng;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RolloutError {
    #[error("invalid environment: {0}")]
    InvalidEnv(String),
    #[error("invalid agent configuration: {0}")]
    InvalidAgent(String),
    #[error("requested an empty trace set")]
    NoTraces,
    #[error("regime mixture needs at least one regime")]
    NoRegimes,
    #[error("regime weights must be non-negative, one per regime, and sum to 1")]
    BadWeights,
    #[error("regimes disagree on {0}")]
    RegimeMismatch(&'static str),
    #[error("agent does not cover the environment's states")]
    AgentMismatch,
}

/// SplitMix64 finalizer; decorrelates `(seed, stream)` pairs.
pub fn mix_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(0xD1B5_4A32_D192_ED03);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn trace_rng(seed: u64, index: u64) -> TraceRng {
    ChaCha8Rng::seed_from_u64(mix_seed(seed, index))
}

/// Stream reserved for agent training, away from trace indices.
pub(crate) const TRAINING_STREAM: u64 = u64::MAX - 1;

pub(crate) fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
    // Box-Muller; u1 in (0, 1] keeps the log finite.
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen::<f64>();
    crate::math::sqrt(-2.0 * crate::math::log(u1)) * libm::cos(2.0 * core::f64::consts::PI * u2)
}

pub(crate) fn sample_categorical<R: Rng>(rng: &mut R, probs: &[f64]) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.iter().rposition(|p| *p > 0.0).unwrap_or(0)
}

pub(crate) fn trace_id(index: usize) -> String {
    format!("t{index:05}")
}

pub(crate) fn base_metadata(seed: u64, index: usize) -> BTreeMap<String, MetaValue> {
    let mut m = BTreeMap::new();
    m.insert("seed".into(), MetaValue::Text(format!("{seed}")));
    m.insert("index".into(), MetaValue::Number(index as f64));
    m
}

/// A gridworld task together with its agent settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridScenario {
    pub env: GridworldSpec,
    #[serde(default)]
    pub agent: GridAgentConfig,
}

/// Everything `gen` can produce.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Scenario {
    Gridworld {
        env: GridworldSpec,
        #[serde(default)]
        agent: GridAgentConfig,
    },
    Lineworld {
        env: LineworldSpec,
        #[serde(default)]
        agent: LineAgentConfig,
    },
    Mixture {
        regimes: Vec<GridScenario>,
        weights: Vec<f64>,
    },
}

impl Scenario {
    pub fn generate(&self, n_traces: usize, seed: u64) -> Result<TraceSet, RolloutError> {
        match self {
            Scenario::Gridworld { env, agent } => {
                let bundle = gridworld::train_toy_agent(env, agent, agent.episodes, mix_seed(seed, TRAINING_STREAM))?;
                gridworld::rollout(env, &bundle, n_traces, seed)
            }
            Scenario::Lineworld { env, agent } => {
                let bundle = lineworld::train_toy_agent(env, agent, agent.episodes, mix_seed(seed, TRAINING_STREAM))?;
                lineworld::rollout(env, &bundle, n_traces, seed)
            }
            Scenario::Mixture { regimes, weights } => make_regime_mixture(regimes, weights, n_traces, seed),
        }
    }
}

/// Largest-remainder apportionment of `n` items to `weights`.
pub fn apportion(weights: &[f64], n: usize) -> Vec<usize> {
    let raw: Vec<f64> = weights.iter().map(|w| w * n as f64).collect();
    let mut counts: Vec<usize> = raw.iter().map(|r| crate::math::floor(*r) as usize).collect();
    let mut left = n.saturating_sub(counts.iter().sum());
    let mut order: Vec<usize> = (0..weights.len()).filter(|&i| weights[i] > 0.0).collect();
    order.sort_by(|&a, &b| {
        let fa = raw[a] - counts[a] as f64;
        let fb = raw[b] - counts[b] as f64;
        fb.total_cmp(&fa).then(a.cmp(&b))
    });
    for &i in order.iter().cycle() {
        if left == 0 {
            break;
        }
        counts[i] += 1;
        left -= 1;
    }
    counts
}

/// Traces from several gridworld regimes in one set, each tagged with
/// `metadata["regime"]`. Regime counts follow `weights` exactly (largest
/// remainder) and their order is shuffled with `seed`.
pub fn make_regime_mixture(
    regimes: &[GridScenario],
    weights: &[f64],
    n_traces: usize,
    seed: u64,
) -> Result<TraceSet, RolloutError> {
    if regimes.is_empty() {
        return Err(RolloutError::NoRegimes);
    }
    if weights.len() != regimes.len()
        || weights.iter().any(|w| !(w.is_finite() && *w >= 0.0))
        || (weights.iter().sum::<f64>() - 1.0).abs() > 1e-9
    {
        return Err(RolloutError::BadWeights);
    }
    if n_traces == 0 {
        return Err(RolloutError::NoTraces);
    }
    let gamma = regimes[0].env.discount;
    if regimes.iter().any(|r| r.env.discount != gamma) {
        return Err(RolloutError::RegimeMismatch("discount"));
    }

    let bundles = regimes
        .iter()
        .enumerate()
        .map(|(i, r)| {
            gridworld::train_toy_agent(
                &r.env,
                &r.agent,
                r.agent.episodes,
                mix_seed(seed, TRAINING_STREAM - 1 - i as u64),
            )
        })
        .collect::<Result<Vec<_>, _>>()?;

    let counts = apportion(weights, n_traces);
    let mut labels: Vec<usize> = counts.iter().enumerate().flat_map(|(r, c)| core::iter::repeat(r).take(*c)).collect();
    let mut rng = trace_rng(seed, TRAINING_STREAM - 1000);
    for i in (1..labels.len()).rev() {
        let j = rng.gen_range(0..=i);
        labels.swap(i, j);
    }

    let mut traces = Vec::with_capacity(n_traces);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for r in regimes {
        let (a, b) = r.env.reward_bounds();
        lo = lo.min(a);
        hi = hi.max(b);
    }
    for (index, &regime) in labels.iter().enumerate() {
        let mut trace = gridworld::rollout_one(&regimes[regime].env, &bundles[regime], index, seed);
        trace.metadata.insert("regime".into(), MetaValue::Number(regime as f64));
        traces.push(trace);
    }
    Ok(TraceSet {
        action_space: gridworld::action_space(),
        discount: gamma,
        reward_range: Some((lo, hi)),
        traces,
    })
}
