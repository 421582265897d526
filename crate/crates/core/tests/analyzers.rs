use std::collections::BTreeMap;

use ixdrl_core::analyzers::dims;
use ixdrl_core::analyzers::{analyze, AnalyzerConfig, Dimension};
use ixdrl_core::trace::{
    ActionChoice, ActionSpaceSpec, AtomDistribution, DiscreteDistribution, EnsembleMember, EnsemblePrediction,
    InteractionDatapoint, Trace, TraceSet,
};
use proptest::prelude::*;

fn probs(n: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..1.0, n).prop_filter_map("all zero", |raw| {
        let s: f64 = raw.iter().sum();
        (s > 1e-6).then(|| raw.iter().map(|x| x / s).collect())
    })
}

fn value_trace(id: &str, values: &[f64], rewards: &[f64]) -> Trace {
    Trace {
        trace_id: id.into(),
        datapoints: values
            .iter()
            .zip(rewards)
            .enumerate()
            .map(|(step, (v, r))| InteractionDatapoint {
                step,
                observation: vec![step as f64],
                action: vec![ActionChoice::Index(0)],
                reward: *r,
                value: Some(*v),
                policy: None,
                action_values: None,
                ensemble: None,
            })
            .collect(),
        terminal: true,
        metadata: BTreeMap::new(),
    }
}

proptest! {
    #[test]
    fn confidence_ignores_action_order(p in probs(2..=8), seed in any::<u64>()) {
        let mut q = p.clone();
        let n = q.len();
        q.rotate_left((seed as usize) % n);
        q.reverse();
        let a = dims::confidence_discrete(&DiscreteDistribution { probs: p });
        let b = dims::confidence_discrete(&DiscreteDistribution { probs: q });
        prop_assert!((a - b).abs() < 1e-12);
        prop_assert!((-1.0..=1.0).contains(&a));
    }

    #[test]
    fn riskiness_ignores_action_order(p in probs(2..=8)) {
        let mut q = p.clone();
        q.reverse();
        let a = dims::riskiness_policy(&DiscreteDistribution { probs: p }).unwrap();
        let b = dims::riskiness_policy(&DiscreteDistribution { probs: q }).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn leik_is_symmetric_under_reversal(p in probs(2..=51)) {
        let mut r = p.clone();
        r.reverse();
        prop_assert!((dims::leik_dispersion(&p) - dims::leik_dispersion(&r)).abs() < 1e-9);
        let atoms: Vec<f64> = (0..p.len()).map(|i| i as f64).collect();
        let d = dims::stochasticity_discrete(&[AtomDistribution { atoms, probs: p }]).unwrap();
        prop_assert!((-1.0..=1.0).contains(&d));
    }

    #[test]
    fn familiarity_is_bounded_and_order_free(
        members in prop::collection::vec(prop::collection::vec(-5.0f64..5.0, 3), 2..8),
    ) {
        let ens = EnsemblePrediction { members: members.iter().cloned().map(EnsembleMember::Point).collect() };
        let mut rev = ens.clone();
        rev.members.reverse();
        let a = dims::familiarity(&ens).unwrap();
        let b = dims::familiarity(&rev).unwrap();
        prop_assert!((-1.0..=1.0).contains(&a));
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn goal_conduciveness_is_odd(a in 0.0f64..1.0, b in 0.0f64..1.0, rho in 0.1f64..200.0) {
        let up = dims::goal_conduciveness(a, b, None, rho);
        let down = dims::goal_conduciveness(b, a, None, rho);
        prop_assert!((up + down).abs() < 1e-12);
    }

    /// Offline Value depends only on each value's position inside the
    /// dataset range, so a positive affine map of V leaves it unchanged.
    #[test]
    fn value_is_affine_invariant(
        vs in prop::collection::vec(-10.0f64..10.0, 2..30),
        scale in 0.5f64..4.0,
        shift in -5.0f64..5.0,
    ) {
        let rewards = vec![0.0; vs.len()];
        let mapped: Vec<f64> = vs.iter().map(|v| scale * v + shift).collect();
        let set = |vals: &[f64]| TraceSet {
            action_space: ActionSpaceSpec::single_discrete("a", 2),
            discount: 1.0,
            reward_range: Some((-1.0, 1.0)),
            traces: vec![value_trace("t", vals, &rewards)],
        };
        let cfg = AnalyzerConfig { dimensions: vec![Dimension::Value], ..AnalyzerConfig::default() };
        let a = analyze(&set(&vs), &cfg).unwrap();
        let b = analyze(&set(&mapped), &cfg).unwrap();
        for (x, y) in a.records.iter().zip(&b.records) {
            let (x, y) = (x.values[&Dimension::Value], y.values[&Dimension::Value]);
            prop_assert!((x - y).abs() < 1e-9);
        }
    }
}

#[test]
fn value_spans_the_full_range() {
    let ts = TraceSet {
        action_space: ActionSpaceSpec::single_discrete("a", 2),
        discount: 0.9,
        reward_range: Some((0.0, 1.0)),
        traces: vec![value_trace("a", &[0.0, 5.0], &[0.0, 1.0]), value_trace("b", &[10.0], &[0.0])],
    };
    let a = analyze(&ts, &AnalyzerConfig::default()).unwrap();
    let v: Vec<f64> = a.records.iter().map(|r| r.values[&Dimension::Value]).collect();
    assert_eq!(v, vec![-1.0, 0.0, 1.0]);
    // only the second step of "a" has a predecessor
    assert_eq!(a.coverage.dimensions[&Dimension::Incongruity], 1);
    // (1 + 0.9 * 5 - 0) / 1 clamps to 1
    assert_eq!(a.records[1].values[&Dimension::Incongruity], 1.0);
}
