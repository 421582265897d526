//! One-dimensional corridor with continuous, multi-factor actions.
//!
//! Position `x` lives in `[0, length]`. Each of `factors` actuators picks
//! an action in `[-1, 1]`; the agent moves by `step_size` times their mean
//! plus Gaussian noise, and reaches the terminal goal once `x` would pass
//! `length`. The agent's Gaussian policy is tabulated over `bins` equal
//! position bins.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{base_metadata, standard_normal, trace_id, trace_rng, RolloutError};
use crate::math::{clamp, fabs, normal_cdf, sqrt};
use crate::trace::{
    ActionChoice, ActionSpaceSpec, EnsembleMember, EnsemblePrediction, FactorSpec, GaussianSpec, InteractionDatapoint,
    MetaValue, PolicyFactor, Trace, TraceSet,
};

const MIN_STD: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LineworldSpec {
    pub length: f64,
    pub bins: usize,
    pub factors: usize,
    pub step_size: f64,
    /// Standard deviation of the transition noise.
    pub noise: f64,
    pub goal_reward: f64,
    pub step_reward: f64,
    pub max_len: usize,
    pub discount: f64,
    /// Episodes start uniformly in `[0, start_max)`.
    pub start_max: f64,
}

impl Default for LineworldSpec {
    fn default() -> Self {
        LineworldSpec {
            length: 10.0,
            bins: 20,
            factors: 3,
            step_size: 1.0,
            noise: 0.3,
            goal_reward: 1.0,
            step_reward: -0.01,
            max_len: 40,
            discount: 0.95,
            start_max: 5.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LineAgentConfig {
    /// Mean action of every actuator.
    pub drive: f64,
    /// Policy standard deviation of actuator 0 at the far end; actuator `f`
    /// uses `policy_std / (1 + f)`, shrinking towards the goal.
    pub policy_std: f64,
    pub ensemble_size: usize,
    pub episodes: usize,
}

impl Default for LineAgentConfig {
    fn default() -> Self {
        LineAgentConfig {
            drive: 0.6,
            policy_std: 0.6,
            ensemble_size: 5,
            episodes: 100,
        }
    }
}

impl LineworldSpec {
    pub fn validate(&self) -> Result<(), RolloutError> {
        let bad = |m: &str| Err(RolloutError::InvalidEnv(m.into()));
        if !(self.length.is_finite() && self.length > 0.0) {
            return bad("length must be positive");
        }
        if self.bins < 1 || self.factors < 1 || self.max_len < 1 {
            return bad("bins, factors and max_len must be >= 1");
        }
        if !(self.step_size.is_finite() && self.step_size > 0.0) {
            return bad("step_size must be positive");
        }
        if !(self.noise.is_finite() && self.noise > 0.0) {
            return bad("noise must be positive");
        }
        if !(self.discount >= 0.0 && self.discount < 1.0) {
            return bad("discount must lie in [0, 1)");
        }
        if !(self.goal_reward.is_finite() && self.step_reward.is_finite()) {
            return bad("rewards must be finite");
        }
        if !(self.start_max > 0.0 && self.start_max <= self.length) {
            return bad("start_max must lie in (0, length]");
        }
        Ok(())
    }

    pub fn bin_of(&self, x: f64) -> usize {
        let b = (x / self.length * self.bins as f64) as usize;
        b.min(self.bins - 1)
    }

    pub fn bin_center(&self, b: usize) -> f64 {
        (b as f64 + 0.5) * self.length / self.bins as f64
    }

    pub fn reward_bounds(&self) -> (f64, f64) {
        let lo = self.step_reward.min(self.goal_reward);
        let hi = self.step_reward.max(self.goal_reward);
        (lo, hi)
    }

    pub fn action_space(&self) -> ActionSpaceSpec {
        ActionSpaceSpec {
            factors: (0..self.factors)
                .map(|f| FactorSpec::Continuous {
                    name: format!("actuator{f}"),
                    lower: vec![-1.0],
                    upper: vec![1.0],
                })
                .collect(),
        }
    }
}

/// Linear-Gaussian forward model of the displacement, per position bin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinModel {
    pub slope: f64,
    pub intercept: f64,
    pub stddev: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LineAgent {
    /// Policy mean per `(bin, factor)`.
    pub mean: Vec<Vec<f64>>,
    pub stddev: Vec<Vec<f64>>,
    pub v: Vec<f64>,
    /// `ensemble[k][bin]`.
    pub ensemble: Vec<Vec<BinModel>>,
}

impl LineAgent {
    pub fn value_at(&self, env: &LineworldSpec, x: f64) -> f64 {
        self.v[env.bin_of(x)]
    }
}

fn policy_tables(env: &LineworldSpec, cfg: &LineAgentConfig) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let mean = (0..env.bins).map(|_| vec![clamp(cfg.drive, -1.0, 1.0); env.factors]).collect();
    let stddev = (0..env.bins)
        .map(|b| {
            let far = 1.0 - env.bin_center(b) / env.length;
            (0..env.factors)
                .map(|f| (cfg.policy_std / (1.0 + f as f64) * (0.25 + 0.75 * far)).max(MIN_STD))
                .collect()
        })
        .collect();
    (mean, stddev)
}

/// Policy evaluation on the binned chain, with next positions modelled as
/// Gaussian (mean drift `step_size * drive`, variance from policy and
/// transition noise).
fn evaluate(env: &LineworldSpec, mean: &[Vec<f64>], stddev: &[Vec<f64>]) -> Vec<f64> {
    let nb = env.bins;
    let width = env.length / nb as f64;
    let f = env.factors as f64;
    let mut trans = Vec::with_capacity(nb);
    for b in 0..nb {
        let drift = env.step_size * mean[b].iter().sum::<f64>() / f;
        let var_pol: f64 = stddev[b].iter().map(|s| s * s).sum::<f64>() * env.step_size * env.step_size / (f * f);
        let sd = sqrt(var_pol + env.noise * env.noise);
        let mu = env.bin_center(b) + drift;
        let p_goal = 1.0 - normal_cdf((env.length - mu) / sd);
        let row: Vec<f64> = (0..nb)
            .map(|j| {
                let upper = normal_cdf(((j + 1) as f64 * width - mu) / sd);
                let lower = if j == 0 { 0.0 } else { normal_cdf((j as f64 * width - mu) / sd) };
                let hi = if j + 1 == nb { 1.0 - p_goal } else { upper };
                (hi - lower).max(0.0)
            })
            .collect();
        trans.push((p_goal, row));
    }
    let mut v = vec![0.0; nb];
    for _ in 0..100_000 {
        let mut delta: f64 = 0.0;
        for b in 0..nb {
            let (p_goal, row) = &trans[b];
            let cont: f64 = row.iter().zip(&v).map(|(p, x)| p * x).sum();
            let new = p_goal * env.goal_reward + (1.0 - p_goal) * env.step_reward + env.discount * cont;
            delta = delta.max(fabs(new - v[b]));
            v[b] = new;
        }
        if delta < 1e-13 {
            break;
        }
    }
    v
}

fn sample_action<R: Rng>(rng: &mut R, agent: &LineAgent, b: usize) -> Vec<f64> {
    agent.mean[b]
        .iter()
        .zip(&agent.stddev[b])
        .map(|(m, s)| clamp(m + s * standard_normal(rng), -1.0, 1.0))
        .collect()
}

/// Returns `(next_x, reward, reached_goal)`.
fn step<R: Rng>(rng: &mut R, env: &LineworldSpec, x: f64, action: &[f64]) -> (f64, f64, bool) {
    let push = env.step_size * action.iter().sum::<f64>() / action.len() as f64;
    let next = x + push + env.noise * standard_normal(rng);
    if next >= env.length {
        (env.length, env.goal_reward, true)
    } else {
        (next.max(0.0), env.step_reward, false)
    }
}

fn fit_bin(samples: &[(f64, f64)], prior_std: f64) -> BinModel {
    let n = samples.len();
    if n == 0 {
        return BinModel {
            slope: 0.0,
            intercept: 0.0,
            stddev: prior_std,
        };
    }
    let nf = n as f64;
    let ma = samples.iter().map(|s| s.0).sum::<f64>() / nf;
    let md = samples.iter().map(|s| s.1).sum::<f64>() / nf;
    let saa: f64 = samples.iter().map(|s| (s.0 - ma) * (s.0 - ma)).sum();
    let sad: f64 = samples.iter().map(|s| (s.0 - ma) * (s.1 - md)).sum();
    let slope = if n >= 3 && saa > 1e-12 { sad / saa } else { 0.0 };
    let intercept = md - slope * ma;
    let stddev = if n >= 2 {
        let sse: f64 = samples
            .iter()
            .map(|s| {
                let r = s.1 - (intercept + slope * s.0);
                r * r
            })
            .sum();
        sqrt(sse / nf).max(MIN_STD)
    } else {
        prior_std
    };
    BinModel {
        slope,
        intercept,
        stddev,
    }
}

/// Builds the Gaussian policy tables, evaluates them, and fits `K`
/// bootstrapped per-bin linear-Gaussian displacement models to `episodes`
/// logged episodes of the policy from uniform random starts.
pub fn train_toy_agent(
    env: &LineworldSpec,
    cfg: &LineAgentConfig,
    episodes: usize,
    seed: u64,
) -> Result<LineAgent, RolloutError> {
    env.validate()?;
    if episodes < 1 {
        return Err(RolloutError::InvalidAgent("episodes must be >= 1".into()));
    }
    if cfg.ensemble_size < 2 {
        return Err(RolloutError::InvalidAgent("ensemble needs K >= 2".into()));
    }
    if !(cfg.policy_std > 0.0 && cfg.drive.is_finite()) {
        return Err(RolloutError::InvalidAgent("policy_std must be positive".into()));
    }
    let (mean, stddev) = policy_tables(env, cfg);
    let v = evaluate(env, &mean, &stddev);
    let mut agent = LineAgent {
        mean,
        stddev,
        v,
        ensemble: Vec::new(),
    };

    let mut rng = trace_rng(seed, 0);
    let mut log: Vec<(usize, f64, f64)> = Vec::new();
    for _ in 0..episodes {
        let mut x = rng.gen::<f64>() * env.length;
        for _ in 0..env.max_len {
            let b = env.bin_of(x);
            let a = sample_action(&mut rng, &agent, b);
            let (next, _, done) = step(&mut rng, env, x, &a);
            let a_mean = a.iter().sum::<f64>() / a.len() as f64;
            log.push((b, a_mean, next - x));
            if done {
                break;
            }
            x = next;
        }
    }
    let prior_std = env.length / 4.0;
    agent.ensemble = (0..cfg.ensemble_size)
        .map(|_| {
            let mut per_bin: Vec<Vec<(f64, f64)>> = vec![Vec::new(); env.bins];
            for _ in 0..log.len() {
                let (b, a, d) = log[rng.gen_range(0..log.len())];
                per_bin[b].push((a, d));
            }
            per_bin.iter().map(|s| fit_bin(s, prior_std)).collect()
        })
        .collect();
    Ok(agent)
}

pub fn rollout_one(env: &LineworldSpec, agent: &LineAgent, index: usize, seed: u64) -> Trace {
    let mut rng = trace_rng(seed, index as u64);
    let mut x = rng.gen::<f64>() * env.start_max;
    let mut datapoints = Vec::new();
    let mut reached = false;
    for t in 0..env.max_len {
        let b = env.bin_of(x);
        let a = sample_action(&mut rng, agent, b);
        let (next, r, done) = step(&mut rng, env, x, &a);
        let a_mean = a.iter().sum::<f64>() / a.len() as f64;
        datapoints.push(InteractionDatapoint {
            step: t,
            observation: vec![x],
            action: a.iter().map(|v| ActionChoice::Vector(vec![*v])).collect(),
            reward: r,
            value: Some(agent.v[b]),
            policy: Some(
                agent.mean[b]
                    .iter()
                    .zip(&agent.stddev[b])
                    .map(|(m, s)| {
                        PolicyFactor::Gaussian(GaussianSpec {
                            mean: vec![*m],
                            stddev: vec![*s],
                        })
                    })
                    .collect(),
            ),
            action_values: None,
            ensemble: Some(EnsemblePrediction {
                members: agent
                    .ensemble
                    .iter()
                    .map(|m| {
                        let bm = m[b];
                        EnsembleMember::Gaussian(GaussianSpec {
                            mean: vec![bm.intercept + bm.slope * a_mean],
                            stddev: vec![bm.stddev],
                        })
                    })
                    .collect(),
            }),
        });
        if done {
            reached = true;
            break;
        }
        x = next;
    }
    let mut metadata = base_metadata(seed, index);
    let score = datapoints.iter().map(|d| d.reward).sum();
    metadata.insert("score".into(), MetaValue::Number(score));
    metadata.insert(
        "outcome".into(),
        MetaValue::Text(if reached { "goal" } else { "timeout" }.into()),
    );
    Trace {
        trace_id: trace_id(index),
        datapoints,
        terminal: reached,
        metadata,
    }
}

pub fn rollout(env: &LineworldSpec, agent: &LineAgent, n_traces: usize, seed: u64) -> Result<TraceSet, RolloutError> {
    env.validate()?;
    if n_traces == 0 {
        return Err(RolloutError::NoTraces);
    }
    if agent.v.len() != env.bins || agent.mean.iter().any(|m| m.len() != env.factors) {
        return Err(RolloutError::AgentMismatch);
    }
    Ok(TraceSet {
        action_space: env.action_space(),
        discount: env.discount,
        reward_range: Some(env.reward_bounds()),
        traces: (0..n_traces).map(|i| rollout_one(env, agent, i, seed)).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_increase_towards_goal() {
        let env = LineworldSpec::default();
        let agent = train_toy_agent(&env, &LineAgentConfig::default(), 20, 4).unwrap();
        assert!(agent.v.windows(2).all(|w| w[0] < w[1]), "{:?}", agent.v);
        assert!(agent.v[env.bins - 1] <= env.goal_reward);
    }

    #[test]
    fn factor_spread_differs() {
        let env = LineworldSpec::default();
        let agent = train_toy_agent(&env, &LineAgentConfig::default(), 5, 4).unwrap();
        assert!(agent.stddev[0][0] > agent.stddev[0][1]);
        assert!(agent.stddev[0][0] > agent.stddev[env.bins - 1][0]);
    }

    #[test]
    fn rollouts_validate() {
        let env = LineworldSpec::default();
        let agent = train_toy_agent(&env, &LineAgentConfig::default(), 20, 4).unwrap();
        let ts = rollout(&env, &agent, 5, 9).unwrap();
        ts.validate().unwrap();
        assert_eq!(ts.action_space.factors.len(), 3);
    }

    #[test]
    fn empty_bin_uses_prior() {
        let m = fit_bin(&[], 2.5);
        assert_eq!((m.slope, m.intercept, m.stddev), (0.0, 0.0, 2.5));
    }
}
