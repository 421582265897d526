//! Random but schema-valid trace sets for property and fuzz tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use ixdrl_core::trace::{
    ActionChoice, ActionSpaceSpec, ActionValues, AtomDistribution, DiscreteDistribution, EnsembleMember,
    EnsemblePrediction, FactorSpec, GaussianSpec, InteractionDatapoint, PolicyFactor, Trace, TraceSet,
};
use rand::Rng;

pub use ixdrl_core::rollout::trace_rng;

pub fn simplex<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    match rng.gen_range(0..4) {
        // one-hot and uniform edge cases
        0 => {
            let hot = rng.gen_range(0..n);
            (0..n).map(|i| if i == hot { 1.0 } else { 0.0 }).collect()
        }
        1 => vec![1.0 / n as f64; n],
        _ => {
            let raw: Vec<f64> = (0..n).map(|_| rng.gen::<f64>().powi(3)).collect();
            let s: f64 = raw.iter().sum();
            if s > 0.0 {
                raw.iter().map(|x| x / s).collect()
            } else {
                vec![1.0 / n as f64; n]
            }
        }
    }
}

pub fn random_space<R: Rng>(rng: &mut R) -> ActionSpaceSpec {
    match rng.gen_range(0..3) {
        0 | 1 => ActionSpaceSpec::single_discrete("a", rng.gen_range(1..=6)),
        _ => ActionSpaceSpec {
            factors: vec![
                FactorSpec::Discrete {
                    name: "d".into(),
                    n: rng.gen_range(2..=4),
                    labels: vec![],
                },
                FactorSpec::Continuous {
                    name: "c".into(),
                    lower: vec![-1.0; 2],
                    upper: vec![1.0, 3.0],
                },
            ],
        },
    }
}

fn gaussian<R: Rng>(rng: &mut R, dim: usize) -> GaussianSpec {
    GaussianSpec {
        mean: (0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect(),
        stddev: (0..dim).map(|_| rng.gen_range(0.001..3.0)).collect(),
    }
}

/// Per-datapoint field presence; the generator draws one of these and the
/// availability checks read it back.
#[derive(Debug, Clone, Copy)]
pub struct Presence {
    pub value: bool,
    pub policy: bool,
    pub action_values: bool,
    pub ensemble: bool,
}

pub fn random_datapoint<R: Rng>(rng: &mut R, space: &ActionSpaceSpec, step: usize, rr: (f64, f64)) -> InteractionDatapoint {
    let mut p = Presence {
        value: rng.gen_bool(0.7),
        policy: rng.gen_bool(0.6),
        action_values: rng.gen_bool(0.5),
        ensemble: rng.gen_bool(0.5),
    };
    if !(p.value || p.policy || p.action_values || p.ensemble) {
        p.value = true;
    }
    let action = space
        .factors
        .iter()
        .map(|f| match f {
            FactorSpec::Discrete { n, .. } => ActionChoice::Index(rng.gen_range(0..*n)),
            FactorSpec::Continuous { lower, upper, .. } => {
                ActionChoice::Vector(lower.iter().zip(upper).map(|(l, u)| rng.gen_range(*l..=*u)).collect())
            }
        })
        .collect();
    let policy = p.policy.then(|| {
        space
            .factors
            .iter()
            .map(|f| match f {
                FactorSpec::Discrete { n, .. } => PolicyFactor::Discrete(DiscreteDistribution { probs: simplex(rng, *n) }),
                FactorSpec::Continuous { lower, .. } => PolicyFactor::Gaussian(gaussian(rng, lower.len())),
            })
            .collect()
    });
    let n_actions = match space.factors.as_slice() {
        [FactorSpec::Discrete { n, .. }] => *n,
        _ => rng.gen_range(1..=5),
    };
    let action_values = p.action_values.then(|| {
        if rng.gen_bool(0.5) {
            ActionValues::Scalar((0..n_actions).map(|_| rng.gen_range(-5.0..5.0)).collect())
        } else {
            let k = rng.gen_range(2..=9);
            let atoms: Vec<f64> = (0..k).map(|i| -1.0 + 2.0 * i as f64 / (k - 1) as f64).collect();
            ActionValues::Distributional(
                (0..n_actions)
                    .map(|_| AtomDistribution {
                        atoms: atoms.clone(),
                        probs: simplex(rng, k),
                    })
                    .collect(),
            )
        }
    });
    let ensemble = p.ensemble.then(|| {
        let k = rng.gen_range(2..=5);
        let dim = rng.gen_range(1..=4);
        let members = if rng.gen_bool(0.5) {
            (0..k)
                .map(|_| {
                    if rng.gen_bool(0.1) {
                        EnsembleMember::Point(vec![0.0; dim])
                    } else {
                        EnsembleMember::Point((0..dim).map(|_| rng.gen_range(-3.0..3.0)).collect())
                    }
                })
                .collect()
        } else {
            (0..k).map(|_| EnsembleMember::Gaussian(gaussian(rng, dim))).collect()
        };
        EnsemblePrediction { members }
    });
    InteractionDatapoint {
        step,
        observation: (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        action,
        reward: rng.gen_range(rr.0..=rr.1),
        value: p.value.then(|| rng.gen_range(-10.0..10.0)),
        policy,
        action_values,
        ensemble,
    }
}

pub fn random_traceset<R: Rng>(rng: &mut R, n_traces: usize, max_len: usize) -> TraceSet {
    let space = random_space(rng);
    let declared = rng.gen_bool(0.5);
    let rr = (-1.0, 1.0);
    let traces = (0..n_traces)
        .map(|i| {
            let len = rng.gen_range(1..=max_len);
            Trace {
                trace_id: format!("t{i:04}"),
                datapoints: (0..len).map(|s| random_datapoint(rng, &space, s, rr)).collect(),
                terminal: rng.gen_bool(0.5),
                metadata: BTreeMap::new(),
            }
        })
        .collect();
    TraceSet {
        action_space: space,
        discount: rng.gen_range(0.5..=1.0),
        reward_range: declared.then_some(rr),
        traces,
    }
}
