mod support;

use std::path::Path;

use ixdrl::tables;
use ixdrl::{load_traceset, parse_traceset, traceset_to_string};
use ixdrl_core::analyzers::{analyze, AnalyzerConfig};
use ixdrl_core::rollout::Scenario;
use support::{random_traceset, trace_rng};

fn asset(rel: &str) -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join(rel)
}

fn scenario(rel: &str) -> Scenario {
    serde_json::from_str(&std::fs::read_to_string(asset(rel)).unwrap()).unwrap()
}

#[test]
fn random_sets_round_trip() {
    let mut rng = trace_rng(21, 0);
    for _ in 0..40 {
        let ts = random_traceset(&mut rng, 5, 12);
        let text = traceset_to_string(&ts);
        let back = parse_traceset(&text).unwrap();
        assert_eq!(back, ts);
        assert_eq!(traceset_to_string(&back), text);
    }
}

#[test]
fn distributional_gridworld_round_trips() {
    // 51 atoms per action, the widest support the generator emits
    let ts = scenario("configs/gridworld.json").generate(8, 5).unwrap();
    let back = parse_traceset(&traceset_to_string(&ts)).unwrap();
    assert_eq!(back, ts);
}

#[test]
fn bundled_sample_matches_its_generator() {
    let loaded = load_traceset(&asset("data/gridworld_sample.jsonl")).unwrap();
    let sc = scenario("configs/gridworld_small.json");
    assert_eq!(loaded, sc.generate(100, 0).unwrap());
    let Scenario::Gridworld { env, .. } = &sc else { unreachable!() };
    let (lo, hi) = env.reward_bounds();
    assert_eq!(loaded.reward_range, Some((lo, hi)));
    assert!(loaded.traces.iter().all(|t| t.len() <= env.max_len));
    assert_eq!(loaded.discount, env.discount);
}

#[test]
fn interestingness_csv_round_trips() {
    let ts = load_traceset(&asset("data/gridworld_sample.jsonl")).unwrap();
    let a = analyze(&ts, &AnalyzerConfig::default()).unwrap();
    let bytes = tables::interestingness_to_csv(&a.records).unwrap();
    assert_eq!(tables::interestingness_from_csv(&bytes).unwrap(), a.records);
}

#[test]
fn bad_lines_are_located() {
    let good = std::fs::read_to_string(asset("data/golden.jsonl")).unwrap();
    let mut lines: Vec<String> = good.lines().map(String::from).collect();
    lines[2] = lines[2].replacen("\"reward\":", "\"reward\":\"x\",\"was\":", 1);
    let err = parse_traceset(&lines.join("\n")).unwrap_err().to_string();
    assert!(err.contains("line 3"), "{err}");
}
