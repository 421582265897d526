//! Slippery gridworld with a tabular agent.
//!
//! Cells are indexed `y * width + x`. Actions are `up, down, left, right`;
//! with probability `p_slip` the executed move is drawn uniformly from all
//! four (so the intended move still happens with `1 - 3 p_slip / 4`).
//! Moving off the grid leaves the agent in place. Goal and hazard cells are
//! terminal and pay their reward on entry, on top of `step_reward`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{base_metadata, sample_categorical, trace_id, trace_rng, RolloutError};
use crate::math::{ceil, exp, fabs, floor, powi};
use crate::trace::{
    ActionChoice, ActionSpaceSpec, ActionValues, AtomDistribution, DiscreteDistribution, EnsembleMember,
    EnsemblePrediction, FactorSpec, InteractionDatapoint, MetaValue, PolicyFactor, Trace, TraceSet,
};

pub const N_ACTIONS: usize = 4;
pub const ACTION_LABELS: [&str; N_ACTIONS] = ["up", "down", "left", "right"];
const MOVES: [(i64, i64); N_ACTIONS] = [(0, -1), (0, 1), (-1, 0), (1, 0)];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RewardCell {
    pub x: usize,
    pub y: usize,
    pub reward: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StartDistribution {
    /// Uniform over non-terminal cells.
    #[default]
    Uniform,
    /// Uniform over the listed `[x, y]` cells.
    Cells(Vec<[usize; 2]>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridworldSpec {
    pub width: usize,
    pub height: usize,
    pub goals: Vec<RewardCell>,
    #[serde(default)]
    pub hazards: Vec<RewardCell>,
    #[serde(default)]
    pub step_reward: f64,
    pub p_slip: f64,
    pub max_len: usize,
    #[serde(default)]
    pub start: StartDistribution,
    pub discount: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridAgentConfig {
    /// Softmax temperature over `Q`; `0` gives the greedy policy.
    pub temperature: f64,
    pub ensemble_size: usize,
    pub atoms: usize,
    /// Support of the categorical return distribution; defaults to the
    /// task's return range.
    pub atom_range: Option<(f64, f64)>,
    /// Exploration episodes logged to train the forward-model ensemble.
    pub episodes: usize,
}

impl Default for GridAgentConfig {
    fn default() -> Self {
        GridAgentConfig {
            temperature: 0.1,
            ensemble_size: 5,
            atoms: 51,
            atom_range: None,
            episodes: 200,
        }
    }
}

impl GridworldSpec {
    pub fn cells(&self) -> usize {
        self.width * self.height
    }

    pub fn index(&self, x: usize, y: usize) -> usize {
        y * self.width + x
    }

    pub fn coords(&self, s: usize) -> (usize, usize) {
        (s % self.width, s / self.width)
    }

    pub fn validate(&self) -> Result<(), RolloutError> {
        let bad = |m: &str| Err(RolloutError::InvalidEnv(m.into()));
        if self.width == 0 || self.height == 0 {
            return bad("grid must be at least 1x1");
        }
        if !(0.0..=1.0).contains(&self.p_slip) {
            return bad("p_slip must lie in [0, 1]");
        }
        if self.max_len < 1 {
            return bad("max_len must be >= 1");
        }
        if !(self.discount >= 0.0 && self.discount < 1.0) {
            return bad("discount must lie in [0, 1)");
        }
        if self.goals.is_empty() {
            return bad("at least one goal cell required");
        }
        if !self.step_reward.is_finite() {
            return bad("step_reward must be finite");
        }
        let mut seen = BTreeMap::new();
        for c in self.goals.iter().chain(&self.hazards) {
            if c.x >= self.width || c.y >= self.height {
                return Err(RolloutError::InvalidEnv(format!("cell ({}, {}) outside grid", c.x, c.y)));
            }
            if !c.reward.is_finite() {
                return bad("cell rewards must be finite");
            }
            if seen.insert(self.index(c.x, c.y), ()).is_some() {
                return Err(RolloutError::InvalidEnv(format!("cell ({}, {}) listed twice", c.x, c.y)));
            }
        }
        if seen.len() == self.cells() {
            return bad("no non-terminal cell left to start from");
        }
        if let StartDistribution::Cells(cells) = &self.start {
            if cells.is_empty() {
                return bad("start cell list is empty");
            }
            for [x, y] in cells {
                if *x >= self.width || *y >= self.height || seen.contains_key(&self.index(*x, *y)) {
                    return Err(RolloutError::InvalidEnv(format!("start cell ({x}, {y}) invalid")));
                }
            }
        }
        Ok(())
    }

    /// Entry reward of terminal cells, `None` for ordinary cells.
    pub fn terminal_rewards(&self) -> Vec<Option<f64>> {
        let mut t = vec![None; self.cells()];
        for c in self.goals.iter().chain(&self.hazards) {
            t[self.index(c.x, c.y)] = Some(c.reward);
        }
        t
    }

    /// Smallest and largest possible single-step reward.
    pub fn reward_bounds(&self) -> (f64, f64) {
        let mut lo = self.step_reward;
        let mut hi = self.step_reward;
        for c in self.goals.iter().chain(&self.hazards) {
            lo = lo.min(self.step_reward + c.reward);
            hi = hi.max(self.step_reward + c.reward);
        }
        (lo, hi)
    }

    /// Bounds on the discounted return of an episode of at most `max_len`
    /// steps (terminal rewards are collected at most once).
    pub fn return_bounds(&self) -> (f64, f64) {
        let g = self.discount;
        let horizon = if g < 1.0 {
            (1.0 - powi(g, self.max_len as u32)) / (1.0 - g)
        } else {
            self.max_len as f64
        };
        let cell_min = self.goals.iter().chain(&self.hazards).map(|c| c.reward).fold(0.0, f64::min);
        let cell_max = self.goals.iter().chain(&self.hazards).map(|c| c.reward).fold(0.0, f64::max);
        let lo = self.step_reward.min(0.0) * horizon + cell_min;
        let hi = self.step_reward.max(0.0) * horizon + cell_max;
        (lo, hi)
    }

    fn move_from(&self, s: usize, a: usize) -> usize {
        let (x, y) = self.coords(s);
        let (dx, dy) = MOVES[a];
        let nx = x as i64 + dx;
        let ny = y as i64 + dy;
        if nx < 0 || ny < 0 || nx >= self.width as i64 || ny >= self.height as i64 {
            s
        } else {
            self.index(nx as usize, ny as usize)
        }
    }

    /// Next-state distribution for intended action `a`.
    pub fn transitions(&self, s: usize, a: usize) -> Vec<(usize, f64)> {
        let mut out: Vec<(usize, f64)> = Vec::with_capacity(N_ACTIONS);
        for (executed, _) in MOVES.iter().enumerate() {
            let p = if executed == a { 1.0 - self.p_slip } else { 0.0 } + self.p_slip / N_ACTIONS as f64;
            if p <= 0.0 {
                continue;
            }
            let next = self.move_from(s, executed);
            match out.iter_mut().find(|(n, _)| *n == next) {
                Some(entry) => entry.1 += p,
                None => out.push((next, p)),
            }
        }
        out
    }

    pub fn step<R: Rng>(&self, rng: &mut R, terminal: &[Option<f64>], s: usize, a: usize) -> (usize, f64) {
        let executed = if self.p_slip > 0.0 && rng.gen::<f64>() < self.p_slip {
            rng.gen_range(0..N_ACTIONS)
        } else {
            a
        };
        let next = self.move_from(s, executed);
        (next, self.step_reward + terminal[next].unwrap_or(0.0))
    }

    pub fn start_cells(&self) -> Vec<usize> {
        match &self.start {
            StartDistribution::Cells(cells) => cells.iter().map(|[x, y]| self.index(*x, *y)).collect(),
            StartDistribution::Uniform => {
                let term = self.terminal_rewards();
                (0..self.cells()).filter(|s| term[*s].is_none()).collect()
            }
        }
    }

    /// Manhattan distance from cell `s` to the nearest goal.
    pub fn goal_distance(&self, s: usize) -> usize {
        nearest(self, s, &self.goals).unwrap_or(self.width + self.height)
    }

    pub fn hazard_distance(&self, s: usize) -> usize {
        nearest(self, s, &self.hazards).unwrap_or(self.width + self.height)
    }
}

fn nearest(env: &GridworldSpec, s: usize, cells: &[RewardCell]) -> Option<usize> {
    let (x, y) = env.coords(s);
    cells.iter().map(|c| x.abs_diff(c.x) + y.abs_diff(c.y)).min()
}

pub fn action_space() -> ActionSpaceSpec {
    ActionSpaceSpec {
        factors: vec![FactorSpec::Discrete {
            name: "move".into(),
            n: N_ACTIONS,
            labels: ACTION_LABELS.iter().map(|s| String::from(*s)).collect(),
        }],
    }
}

/// Bootstrapped tabular forward model: next-state counts per `(s, a)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CountModel {
    counts: Vec<[BTreeMap<usize, u32>; N_ACTIONS]>,
}

impl CountModel {
    fn new(cells: usize) -> Self {
        CountModel {
            counts: (0..cells).map(|_| Default::default()).collect(),
        }
    }

    pub fn visits(&self, s: usize, a: usize) -> u32 {
        self.counts[s][a].values().sum()
    }

    /// Expected displacement `(dx, dy)` of the next cell; zero when the
    /// model has never seen `(s, a)`.
    pub fn predict(&self, env: &GridworldSpec, s: usize, a: usize) -> Vec<f64> {
        let total = self.visits(s, a);
        if total == 0 {
            return vec![0.0, 0.0];
        }
        let (x, y) = env.coords(s);
        let (mut dx, mut dy) = (0.0, 0.0);
        for (&next, &c) in &self.counts[s][a] {
            let (nx, ny) = env.coords(next);
            let w = c as f64 / total as f64;
            dx += w * (nx as f64 - x as f64);
            dy += w * (ny as f64 - y as f64);
        }
        vec![dx, dy]
    }
}

/// Tabular agent exposing every model output the analyzers use.
#[derive(Debug, Clone, PartialEq)]
pub struct GridAgent {
    pub q: Vec<[f64; N_ACTIONS]>,
    pub v: Vec<f64>,
    pub policy: Vec<[f64; N_ACTIONS]>,
    pub atoms: Vec<f64>,
    /// Categorical return distribution per `(s, a)`.
    pub q_dist: Vec<[Vec<f64>; N_ACTIONS]>,
    pub ensemble: Vec<CountModel>,
    pub warnings: Vec<String>,
}

impl GridAgent {
    pub fn greedy(&self, s: usize) -> usize {
        argmax(&self.q[s])
    }

    /// `max_s |V(s) - Q(s, greedy(s))|` under the true dynamics.
    pub fn bellman_residual(&self, env: &GridworldSpec) -> f64 {
        let term = env.terminal_rewards();
        let mut worst: f64 = 0.0;
        for s in 0..env.cells() {
            if term[s].is_some() {
                continue;
            }
            let q = backup(env, &term, &self.v, s, self.greedy(s));
            worst = worst.max(fabs(self.v[s] - q));
        }
        worst
    }
}

fn argmax(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in xs.iter().enumerate() {
        if *x > xs[best] {
            best = i;
        }
    }
    best
}

fn backup(env: &GridworldSpec, term: &[Option<f64>], v: &[f64], s: usize, a: usize) -> f64 {
    env.transitions(s, a)
        .into_iter()
        .map(|(next, p)| {
            let cont = if term[next].is_some() { 0.0 } else { env.discount * v[next] };
            p * (env.step_reward + term[next].unwrap_or(0.0) + cont)
        })
        .sum()
}

/// Softmax of `q / temperature`; one-hot at the lowest argmax when the
/// temperature is zero.
pub fn softmax_policy(q: &[f64; N_ACTIONS], temperature: f64) -> [f64; N_ACTIONS] {
    let mut out = [0.0; N_ACTIONS];
    if temperature <= 0.0 {
        out[argmax(q)] = 1.0;
        return out;
    }
    let m = q.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut z = 0.0;
    for (o, x) in out.iter_mut().zip(q) {
        *o = exp((x - m) / temperature);
        z += *o;
    }
    out.iter_mut().for_each(|o| *o /= z);
    out
}

/// Projects `reward + discount * atoms` (weighted by `probs`, scaled by
/// `mass`) onto the fixed support and accumulates into `target`.
fn project(atoms: &[f64], reward: f64, discount: f64, probs: Option<&[f64]>, mass: f64, target: &mut [f64]) {
    let n = atoms.len();
    let lo = atoms[0];
    let hi = atoms[n - 1];
    let delta = (hi - lo) / (n - 1) as f64;
    let mut put = |value: f64, p: f64| {
        let tz = value.clamp(lo, hi);
        let b = (tz - lo) / delta;
        let l = floor(b) as usize;
        let u = (ceil(b) as usize).min(n - 1);
        if l == u {
            target[l] += p;
        } else {
            target[l] += p * (u as f64 - b);
            target[u] += p * (b - l as f64);
        }
    };
    match probs {
        None => put(reward, mass),
        Some(ps) => {
            for (z, p) in atoms.iter().zip(ps) {
                if *p > 0.0 {
                    put(reward + discount * z, mass * p);
                }
            }
        }
    }
}

/// Trains the tabular agent: value iteration on the true dynamics, a
/// softmax policy, categorical return distributions for the greedy policy,
/// and `K` count models fitted to bootstrap resamples of `episodes`
/// exploration episodes (uniform random starts and actions).
pub fn train_toy_agent(
    env: &GridworldSpec,
    cfg: &GridAgentConfig,
    episodes: usize,
    seed: u64,
) -> Result<GridAgent, RolloutError> {
    env.validate()?;
    if episodes < 1 {
        return Err(RolloutError::InvalidAgent("episodes must be >= 1".into()));
    }
    if cfg.ensemble_size < 2 {
        return Err(RolloutError::InvalidAgent("ensemble needs K >= 2".into()));
    }
    if cfg.atoms < 2 {
        return Err(RolloutError::InvalidAgent("need at least 2 atoms".into()));
    }
    if !(cfg.temperature >= 0.0 && cfg.temperature.is_finite()) {
        return Err(RolloutError::InvalidAgent("temperature must be finite and >= 0".into()));
    }

    let n = env.cells();
    let term = env.terminal_rewards();
    let mut warnings = Vec::new();

    let mut v = vec![0.0; n];
    for _ in 0..1_000_000 {
        let mut delta: f64 = 0.0;
        for s in 0..n {
            if term[s].is_some() {
                continue;
            }
            let best = (0..N_ACTIONS)
                .map(|a| backup(env, &term, &v, s, a))
                .fold(f64::NEG_INFINITY, f64::max);
            delta = delta.max(fabs(best - v[s]));
            v[s] = best;
        }
        if delta < 1e-13 {
            break;
        }
    }
    let q: Vec<[f64; N_ACTIONS]> = (0..n)
        .map(|s| {
            let mut row = [0.0; N_ACTIONS];
            if term[s].is_none() {
                for (a, r) in row.iter_mut().enumerate() {
                    *r = backup(env, &term, &v, s, a);
                }
            }
            row
        })
        .collect();
    let policy = q.iter().map(|row| softmax_policy(row, cfg.temperature)).collect();

    if env.goals.iter().all(|g| g.reward <= 0.0) || env.start_cells().iter().all(|s| v[*s] <= 0.0) {
        let msg = String::from("no start state has a positive-value path to a goal");
        log::warn!("{msg}");
        warnings.push(msg);
    }

    let (mut lo, mut hi) = cfg.atom_range.unwrap_or_else(|| env.return_bounds());
    if !(lo < hi) {
        lo -= 1.0;
        hi += 1.0;
    }
    let atoms: Vec<f64> = (0..cfg.atoms)
        .map(|k| lo + (hi - lo) * k as f64 / (cfg.atoms - 1) as f64)
        .collect();
    let q_dist = categorical_returns(env, &term, &q, &atoms);

    let ensemble = fit_ensemble(env, &term, cfg.ensemble_size, episodes, seed);

    let agent = GridAgent {
        q,
        v,
        policy,
        atoms,
        q_dist,
        ensemble,
        warnings,
    };
    Ok(agent)
}

fn categorical_returns(
    env: &GridworldSpec,
    term: &[Option<f64>],
    q: &[[f64; N_ACTIONS]],
    atoms: &[f64],
) -> Vec<[Vec<f64>; N_ACTIONS]> {
    let n = env.cells();
    let k = atoms.len();
    let greedy: Vec<usize> = q.iter().map(|row| argmax(row)).collect();
    let mut zero = vec![0.0; k];
    project(atoms, 0.0, 0.0, None, 1.0, &mut zero);
    let mut dist: Vec<[Vec<f64>; N_ACTIONS]> = (0..n).map(|_| core::array::from_fn(|_| zero.clone())).collect();
    let transitions: Vec<[Vec<(usize, f64)>; N_ACTIONS]> =
        (0..n).map(|s| core::array::from_fn(|a| env.transitions(s, a))).collect();

    for _ in 0..20_000 {
        let mut next_dist = dist.clone();
        let mut change: f64 = 0.0;
        for s in 0..n {
            if term[s].is_some() {
                continue;
            }
            for a in 0..N_ACTIONS {
                let mut target = vec![0.0; k];
                for &(next, p) in &transitions[s][a] {
                    let r = env.step_reward + term[next].unwrap_or(0.0);
                    if term[next].is_some() {
                        project(atoms, r, 0.0, None, p, &mut target);
                    } else {
                        project(atoms, r, env.discount, Some(&dist[next][greedy[next]]), p, &mut target);
                    }
                }
                let total: f64 = target.iter().sum();
                target.iter_mut().for_each(|x| *x /= total);
                for (old, new) in dist[s][a].iter().zip(&target) {
                    change = change.max(fabs(old - new));
                }
                next_dist[s][a] = target;
            }
        }
        dist = next_dist;
        if change < 1e-12 {
            break;
        }
    }
    dist
}

fn fit_ensemble(env: &GridworldSpec, term: &[Option<f64>], k: usize, episodes: usize, seed: u64) -> Vec<CountModel> {
    let mut rng = trace_rng(seed, 0);
    let starts: Vec<usize> = (0..env.cells()).filter(|s| term[*s].is_none()).collect();
    let mut log: Vec<(usize, usize, usize)> = Vec::new();
    for _ in 0..episodes {
        let mut s = starts[rng.gen_range(0..starts.len())];
        for _ in 0..env.max_len {
            let a = rng.gen_range(0..N_ACTIONS);
            let (next, _) = env.step(&mut rng, term, s, a);
            log.push((s, a, next));
            if term[next].is_some() {
                break;
            }
            s = next;
        }
    }
    (0..k)
        .map(|_| {
            let mut model = CountModel::new(env.cells());
            for _ in 0..log.len() {
                let (s, a, next) = log[rng.gen_range(0..log.len())];
                *model.counts[s][a].entry(next).or_default() += 1;
            }
            model
        })
        .collect()
}

fn datapoint(env: &GridworldSpec, agent: &GridAgent, step: usize, s: usize, a: usize, reward: f64) -> InteractionDatapoint {
    let (x, y) = env.coords(s);
    InteractionDatapoint {
        step,
        observation: vec![x as f64, y as f64],
        action: vec![ActionChoice::Index(a)],
        reward,
        value: Some(agent.v[s]),
        policy: Some(vec![PolicyFactor::Discrete(DiscreteDistribution {
            probs: agent.policy[s].to_vec(),
        })]),
        action_values: Some(ActionValues::Distributional(
            agent.q_dist[s]
                .iter()
                .map(|p| AtomDistribution {
                    atoms: agent.atoms.clone(),
                    probs: p.clone(),
                })
                .collect(),
        )),
        ensemble: Some(EnsemblePrediction {
            members: agent
                .ensemble
                .iter()
                .map(|m| EnsembleMember::Point(m.predict(env, s, a)))
                .collect(),
        }),
    }
}

/// Rolls out one episode with the RNG stream of trace `index`.
pub fn rollout_one(env: &GridworldSpec, agent: &GridAgent, index: usize, seed: u64) -> Trace {
    let mut rng = trace_rng(seed, index as u64);
    let term = env.terminal_rewards();
    let starts = env.start_cells();
    let mut s = starts[rng.gen_range(0..starts.len())];
    let mut datapoints = Vec::new();
    let mut outcome = "timeout";
    for step in 0..env.max_len {
        let a = sample_categorical(&mut rng, &agent.policy[s]);
        let (next, r) = env.step(&mut rng, &term, s, a);
        datapoints.push(datapoint(env, agent, step, s, a, r));
        if term[next].is_some() {
            outcome = if env.goals.iter().any(|g| env.index(g.x, g.y) == next) {
                "goal"
            } else {
                "hazard"
            };
            break;
        }
        s = next;
    }
    let mut metadata = base_metadata(seed, index);
    let score = datapoints.iter().map(|d| d.reward).sum();
    metadata.insert("score".into(), MetaValue::Number(score));
    metadata.insert("outcome".into(), MetaValue::Text(outcome.into()));
    Trace {
        trace_id: trace_id(index),
        terminal: outcome != "timeout",
        datapoints,
        metadata,
    }
}

pub fn rollout(env: &GridworldSpec, agent: &GridAgent, n_traces: usize, seed: u64) -> Result<TraceSet, RolloutError> {
    env.validate()?;
    if n_traces == 0 {
        return Err(RolloutError::NoTraces);
    }
    if agent.v.len() != env.cells() || agent.policy.len() != env.cells() || agent.q_dist.len() != env.cells() {
        return Err(RolloutError::AgentMismatch);
    }
    let traces = (0..n_traces).map(|i| rollout_one(env, agent, i, seed)).collect();
    Ok(TraceSet {
        action_space: action_space(),
        discount: env.discount,
        reward_range: Some(env.reward_bounds()),
        traces,
    })
}
