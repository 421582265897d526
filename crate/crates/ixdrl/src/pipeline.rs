//! Stage functions and the end-to-end pipeline.
//!
//! Each stage writes its outputs through an [`ArtifactWriter`], which keeps
//! a SHA-256 per file. The pipeline ends by writing `manifest.json`.

use std::collections::BTreeSet;
use std::fs;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use ixdrl_core::analyzers::{analyze, interestingness_profile, Analysis, AnalyzerConfig, Dimension, InterestingnessRecord, SeriesKey};
use ixdrl_core::attribution::{
    build_features, find_abnormal, global_importance, local_explanation, train_for, AbnormalReport, ExtractorConfig,
    FeatureMatrix, FeatureSource, GbtParams, GlobalImportance, LocalExplanation,
};
use ixdrl_core::clustering::report::cluster_report;
use ixdrl_core::clustering::{cluster_records, Clustering};
use ixdrl_core::rollout::Scenario;
use ixdrl_core::TraceSet;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::charts::{self, Chart};
use crate::format::{self, FormatError};
use crate::tables::{self, csv_bytes};

/// Environment variable naming the default output root.
pub const OUT_ENV: &str = "IXDRL_OUT";

pub fn default_out_root() -> PathBuf {
    std::env::var_os(OUT_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("ixdrl-out"))
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("{stage} stage failed: {message}")]
    Stage { stage: &'static str, message: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Stage { .. } => 3,
        }
    }

    pub fn stage(stage: &'static str, message: impl ToString) -> Self {
        CliError::Stage {
            stage,
            message: message.to_string(),
        }
    }
}

/// Trace-file errors: content problems are validation failures, I/O
/// problems fail the stage that needed the file.
pub fn load_traces(stage: &'static str, path: &Path) -> Result<TraceSet, CliError> {
    format::load_traceset(path).map_err(|e| match e {
        FormatError::Io { .. } => CliError::stage(stage, e),
        other => CliError::Validation(format!("{}: {other}", path.display())),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArtifactEntry {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

/// Writes files below a root directory and records their hashes.
pub struct ArtifactWriter {
    root: PathBuf,
    entries: Vec<ArtifactEntry>,
}

impl ArtifactWriter {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        ArtifactWriter {
            root: root.into(),
            entries: Vec::new(),
        }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn write(&mut self, stage: &'static str, rel: &str, bytes: &[u8]) -> Result<PathBuf, CliError> {
        let path = self.root.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| CliError::stage(stage, format!("{}: {e}", parent.display())))?;
        }
        fs::write(&path, bytes).map_err(|e| CliError::stage(stage, format!("{}: {e}", path.display())))?;
        self.entries.retain(|e| e.path != rel);
        self.entries.push(ArtifactEntry {
            path: rel.replace('\\', "/"),
            sha256: hex::encode(Sha256::digest(bytes)),
            bytes: bytes.len() as u64,
        });
        Ok(path)
    }

    pub fn json<T: Serialize>(&mut self, stage: &'static str, rel: &str, value: &T) -> Result<PathBuf, CliError> {
        let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| CliError::stage(stage, e))?;
        bytes.push(b'\n');
        self.write(stage, rel, &bytes)
    }

    /// Writes `<stem>.svg` and its data twin `<stem>.csv`.
    pub fn chart(&mut self, stage: &'static str, stem: &str, chart: &Chart) -> Result<(), CliError> {
        self.write(stage, &format!("{stem}.svg"), chart.svg.as_bytes())?;
        self.write(stage, &format!("{stem}.csv"), &chart.csv)?;
        Ok(())
    }

    pub fn entries(&self) -> &[ArtifactEntry] {
        &self.entries
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Gen,
    Validate,
    Analyze,
    Cluster,
    Explain,
    Report,
}

impl Stage {
    pub const ALL: [Stage; 6] = [Stage::Gen, Stage::Validate, Stage::Analyze, Stage::Cluster, Stage::Explain, Stage::Report];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Gen => "gen",
            Stage::Validate => "validate",
            Stage::Analyze => "analyze",
            Stage::Cluster => "cluster",
            Stage::Explain => "explain",
            Stage::Report => "report",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenConfig {
    pub scenario: Option<Scenario>,
    /// Scenario JSON file, relative to the config file.
    pub scenario_path: Option<PathBuf>,
    pub traces: usize,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            scenario: None,
            scenario_path: None,
            traces: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClusterConfig {
    pub k_min: usize,
    pub k_max: usize,
}

impl Default for ClusterConfig {
    fn default() -> Self {
        ClusterConfig { k_min: 2, k_max: 15 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExplainConfig {
    /// Interestingness columns to model, e.g. `value` or `confidence[1]`.
    pub dims: Vec<String>,
    pub gbt: GbtParams,
    /// Waterfalls rendered for the most extreme abnormal steps.
    pub waterfalls: usize,
    pub features: ExtractorConfig,
}

impl Default for ExplainConfig {
    fn default() -> Self {
        ExplainConfig {
            dims: vec!["value".into(), "confidence".into()],
            gbt: GbtParams::default(),
            waterfalls: 3,
            features: ExtractorConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReportConfig {
    /// Time-series plots for this many traces (in file order).
    pub timeseries_traces: usize,
}

impl Default for ReportConfig {
    fn default() -> Self {
        ReportConfig { timeseries_traces: 3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub out_dir: Option<PathBuf>,
    pub seed: u64,
    pub stages: Vec<Stage>,
    /// Trace file used when `gen` is not selected.
    pub input: Option<PathBuf>,
    /// Interestingness CSV used when `analyze` is not selected.
    pub interestingness: Option<PathBuf>,
    /// Feature CSV; otherwise features come from the scenario, or from raw
    /// observations when there is none.
    pub features: Option<PathBuf>,
    pub gen: GenConfig,
    pub analyze: AnalyzerConfig,
    pub cluster: ClusterConfig,
    pub explain: ExplainConfig,
    pub report: ReportConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            out_dir: None,
            seed: 0,
            stages: Stage::ALL.to_vec(),
            input: None,
            interestingness: None,
            features: None,
            gen: GenConfig::default(),
            analyze: AnalyzerConfig::default(),
            cluster: ClusterConfig::default(),
            explain: ExplainConfig::default(),
            report: ReportConfig::default(),
        }
    }
}

impl PipelineConfig {
    /// Reads a config and resolves its input paths against the file's
    /// directory.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::stage("config", format!("{}: {e}", path.display())))?;
        let mut cfg: PipelineConfig =
            serde_json::from_str(&text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut cfg.input, &mut cfg.interestingness, &mut cfg.features, &mut cfg.gen.scenario_path]
            .into_iter()
            .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    pub fn scenario(&self) -> Result<Option<Scenario>, CliError> {
        if let Some(s) = &self.gen.scenario {
            return Ok(Some(s.clone()));
        }
        match &self.gen.scenario_path {
            Some(p) => load_scenario(p).map(Some),
            None => Ok(None),
        }
    }

    pub fn k_range(&self) -> RangeInclusive<usize> {
        self.cluster.k_min..=self.cluster.k_max
    }
}

pub fn load_scenario(path: &Path) -> Result<Scenario, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::stage("gen", format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

pub fn parse_series(name: &str) -> Result<SeriesKey, CliError> {
    SeriesKey::parse(name).ok_or_else(|| {
        let known: Vec<&str> = Dimension::ALL.iter().map(|d| d.name()).collect();
        CliError::Validation(format!("unknown dimension {name:?}; expected one of {}", known.join(", ")))
    })
}

/// `"2..15"`, `"2..=15"` or a single `"4"`.
pub fn parse_k_range(s: &str) -> Result<RangeInclusive<usize>, String> {
    let bad = || format!("bad k range {s:?}; use e.g. 2..15");
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (a, b.trim_start_matches('=')),
        None => (s, s),
    };
    let lo: usize = lo.trim().parse().map_err(|_| bad())?;
    let hi: usize = hi.trim().parse().map_err(|_| bad())?;
    if lo < 2 || hi < lo {
        return Err(bad());
    }
    Ok(lo..=hi)
}

// ---- stages ----

pub fn gen_stage(scenario: &Scenario, traces: usize, seed: u64) -> Result<TraceSet, CliError> {
    scenario.generate(traces, seed).map_err(|e| CliError::stage("gen", e))
}

pub fn analyze_stage(
    w: &mut ArtifactWriter,
    dir: &str,
    ts: &TraceSet,
    cfg: &AnalyzerConfig,
) -> Result<Analysis, CliError> {
    let analysis = analyze(ts, cfg).map_err(|e| CliError::stage("analyze", e))?;
    let csv = tables::interestingness_to_csv(&analysis.records).map_err(|e| CliError::stage("analyze", e))?;
    w.write("analyze", &join(dir, "interestingness.csv"), &csv)?;
    w.json("analyze", &join(dir, "coverage.json"), &coverage_json(&analysis))?;
    Ok(analysis)
}

pub fn coverage_json(a: &Analysis) -> serde_json::Value {
    let available: Vec<&str> = a.coverage.available().iter().map(|d| d.name()).collect();
    let missing: Vec<&str> = Dimension::ALL
        .iter()
        .filter(|d| !a.coverage.available().contains(d))
        .map(|d| d.name())
        .collect();
    serde_json::json!({
        "records": a.coverage.records,
        "dimensions": a.coverage.dimensions,
        "available": available,
        "unavailable": missing,
        "factor_columns": a.coverage.factor_columns,
        "normalization": a.normalization,
        "warnings": a.warnings,
    })
}

fn join(dir: &str, file: &str) -> String {
    if dir.is_empty() {
        file.to_string()
    } else {
        format!("{}/{file}", dir.trim_end_matches('/'))
    }
}

fn mean_or_none(p: &ixdrl_core::analyzers::Profile, k: SeriesKey) -> Option<f64> {
    p.get(&k).map(|s| s.mean)
}

pub fn cluster_stage(
    w: &mut ArtifactWriter,
    dir: &str,
    records: &[InterestingnessRecord],
    ts: Option<&TraceSet>,
    k_range: RangeInclusive<usize>,
) -> Result<Clustering, CliError> {
    let n_traces = records.iter().map(|r| r.trace_id.as_str()).collect::<BTreeSet<_>>().len();
    let hi = (*k_range.end()).min(n_traces.saturating_sub(1));
    let lo = *k_range.start();
    if hi < lo {
        return Err(CliError::stage("cluster", format!("{n_traces} traces cannot be cut into {lo} or more clusters")));
    }
    let c = cluster_records(records, lo..=hi).map_err(|e| CliError::stage("cluster", e))?;
    let best = c.sweep.best();

    w.write(
        "cluster",
        &join(dir, "assignments.csv"),
        &csv_bytes(
            &["trace_id", "cluster"],
            best.trace_ids
                .iter()
                .zip(&best.labels)
                .map(|(id, l)| vec![id.clone(), l.to_string()]),
        ),
    )?;
    let mut header = vec!["trace_id".to_string()];
    header.extend(c.sweep.assignments.iter().map(|a| format!("k{}", a.k)));
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    w.write(
        "cluster",
        &join(dir, "assignments_by_k.csv"),
        &csv_bytes(
            &header_refs,
            best.trace_ids.iter().enumerate().map(|(i, id)| {
                let mut row = vec![id.clone()];
                row.extend(c.sweep.assignments.iter().map(|a| a.labels[i].to_string()));
                row
            }),
        ),
    )?;
    w.json(
        "cluster",
        &join(dir, "dendrogram.json"),
        &serde_json::json!({
            "trace_ids": best.trace_ids,
            "features": c.features.keys.iter().map(|k| k.column_name()).collect::<Vec<_>>(),
            "dendrogram": c.dendrogram,
        }),
    )?;
    let pts: Vec<(f64, f64)> = c.sweep.assignments.iter().map(|a| (a.k as f64, a.silhouette)).collect();
    w.chart("cluster", &join(dir, "silhouette"), &charts::line_chart("silhouette vs k", "k", "silhouette", &pts))?;

    let dims: Vec<SeriesKey> = c.features.keys.iter().copied().filter(|k| matches!(k, SeriesKey::Dim(_))).collect();
    let axes: Vec<String> = dims.iter().map(|k| k.column_name()).collect();
    let report = match ts {
        Some(ts) => cluster_report(best, ts, records).map_err(|e| CliError::stage("cluster", e))?,
        None => cluster_report_without_traces(best, records)?,
    };
    let profiles: Vec<(String, Vec<Option<f64>>)> = report
        .rows
        .iter()
        .map(|row| {
            (
                format!("cluster {} (n={})", row.cluster, row.size),
                dims.iter().map(|k| mean_or_none(&row.profile, *k)).collect(),
            )
        })
        .collect();
    w.chart(
        "cluster",
        &join(dir, "radar"),
        &charts::radar(&format!("cluster profiles (k={})", best.k), &axes, &profiles),
    )?;

    let mut header = vec!["cluster".to_string(), "size".to_string()];
    for m in report.metric_names.iter() {
        header.push(format!("{m}_mean"));
        header.push(format!("{m}_std"));
    }
    header.extend(c.features.keys.iter().map(|k| format!("{}_mean", k.column_name())));
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    w.write(
        "cluster",
        &join(dir, "stats.csv"),
        &csv_bytes(
            &header_refs,
            report.rows.iter().map(|row| {
                let mut cells = vec![row.cluster.to_string(), row.size.to_string()];
                for m in &report.metric_names {
                    let s = row.metrics.get(m);
                    cells.push(s.map(|s| s.mean.to_string()).unwrap_or_default());
                    cells.push(s.map(|s| s.stddev.to_string()).unwrap_or_default());
                }
                cells.extend(c.features.keys.iter().map(|k| mean_or_none(&row.profile, *k).map(|v| v.to_string()).unwrap_or_default()));
                cells
            }),
        ),
    )?;
    Ok(c)
}

fn cluster_report_without_traces(
    best: &ixdrl_core::clustering::ClusterAssignment,
    records: &[InterestingnessRecord],
) -> Result<ixdrl_core::clustering::report::ClusterReport, CliError> {
    // Trace lengths are still known from the records themselves.
    let mut ts = TraceSet {
        action_space: ixdrl_core::trace::ActionSpaceSpec::single_discrete("a", 1),
        discount: 0.0,
        reward_range: None,
        traces: Vec::new(),
    };
    for id in &best.trace_ids {
        let len = records.iter().filter(|r| &r.trace_id == id).count();
        ts.traces.push(ixdrl_core::Trace {
            trace_id: id.clone(),
            datapoints: vec![placeholder_datapoint(); len],
            terminal: false,
            metadata: Default::default(),
        });
    }
    cluster_report(best, &ts, records).map_err(|e| CliError::stage("cluster", e))
}

fn placeholder_datapoint() -> ixdrl_core::InteractionDatapoint {
    ixdrl_core::InteractionDatapoint {
        step: 0,
        observation: Vec::new(),
        action: Vec::new(),
        reward: 0.0,
        value: None,
        policy: None,
        action_values: None,
        ensemble: None,
    }
}

/// What `explain` produced for one interestingness series.
#[derive(Debug, Clone)]
pub struct ExplainOutcome {
    pub target: SeriesKey,
    pub trained: ixdrl_core::attribution::TrainedModel,
    pub dataset: ixdrl_core::attribution::Dataset,
    pub abnormal: AbnormalReport,
    pub importance: Option<GlobalImportance>,
    pub waterfalls: Vec<LocalExplanation>,
}

fn file_safe(s: &str) -> String {
    s.chars().map(|c| if c.is_ascii_alphanumeric() || c == '_' || c == '-' { c } else { '_' }).collect()
}

#[allow(clippy::too_many_arguments)]
pub fn explain_stage(
    w: &mut ArtifactWriter,
    dir: &str,
    features: &FeatureMatrix,
    records: &[InterestingnessRecord],
    target: SeriesKey,
    params: &GbtParams,
    seed: u64,
    waterfalls: usize,
) -> Result<ExplainOutcome, CliError> {
    let data = features.dataset(records, target);
    let name = target.column_name();
    let trained = train_for(&data, params, seed).map_err(|e| CliError::stage("explain", format!("{name}: {e}")))?;
    w.json(
        "explain",
        &join(dir, "model.json"),
        &serde_json::json!({
            "target": name,
            "passed_gate": trained.passed_gate,
            "test_mae": trained.test_mae,
            "baseline_mae": trained.baseline_mae,
            "train_rows": trained.train_rows.len(),
            "test_rows": trained.test_rows.len(),
            "model": trained.model,
        }),
    )?;
    w.write(
        "explain",
        &join(dir, "learning_curve.csv"),
        &csv_bytes(
            &["round", "train_rmse"],
            trained.train_rmse.iter().enumerate().map(|(i, v)| vec![i.to_string(), v.to_string()]),
        ),
    )?;

    let abnormal = find_abnormal(records, target).map_err(|e| CliError::stage("explain", e))?;
    w.write(
        "explain",
        &join(dir, "abnormal.csv"),
        &csv_bytes(
            &["trace_id", "step", "value", "lower_fence", "upper_fence"],
            abnormal.flagged.iter().map(|a| {
                vec![
                    a.trace_id.clone(),
                    a.step.to_string(),
                    a.value.to_string(),
                    abnormal.lower.to_string(),
                    abnormal.upper.to_string(),
                ]
            }),
        ),
    )?;

    if !trained.passed_gate {
        log::warn!("{name}: model excluded by the quality gate; no attributions written");
        return Ok(ExplainOutcome {
            target,
            trained,
            dataset: data,
            abnormal,
            importance: None,
            waterfalls: Vec::new(),
        });
    }
    let gi = global_importance(&trained, &data).map_err(|e| CliError::stage("explain", e))?;
    w.write(
        "explain",
        &join(dir, "ranking.csv"),
        &csv_bytes(
            &["rank", "feature", "mean_abs_phi", "mean_phi"],
            gi.ranking.iter().enumerate().map(|(i, f)| {
                vec![(i + 1).to_string(), f.name.clone(), f.mean_abs.to_string(), f.mean_signed.to_string()]
            }),
        ),
    )?;
    let swarm = charts::beeswarm(&format!("{name}: feature attributions"), &gi).map_err(|e| CliError::stage("explain", e))?;
    w.chart("explain", &join(dir, "beeswarm"), &swarm)?;

    let mut locals = Vec::new();
    for a in abnormal.flagged.iter().take(waterfalls) {
        let Some(row) = data.keys.iter().position(|(id, s)| *id == a.trace_id && *s == a.step) else {
            continue;
        };
        let le = local_explanation(&trained, &data, row).map_err(|e| CliError::stage("explain", e))?;
        let stem = join(dir, &format!("waterfall_{}_{}", file_safe(&a.trace_id), a.step));
        w.chart(
            "explain",
            &stem,
            &charts::waterfall(&format!("{name} at {} step {}", a.trace_id, a.step), &le),
        )?;
        locals.push(le);
    }
    Ok(ExplainOutcome {
        target,
        trained,
        dataset: data,
        abnormal,
        importance: Some(gi),
        waterfalls: locals,
    })
}

pub fn report_stage(
    w: &mut ArtifactWriter,
    dir: &str,
    records: &[InterestingnessRecord],
    traces: &[String],
    keys: Option<&[SeriesKey]>,
) -> Result<(), CliError> {
    let profile = interestingness_profile(records).map_err(|e| CliError::stage("report", e))?;
    w.write(
        "report",
        &join(dir, "profile.csv"),
        &csv_bytes(
            &["series", "mean", "stddev", "count"],
            profile
                .iter()
                .map(|(k, s)| vec![k.column_name(), s.mean.to_string(), s.stddev.to_string(), s.count.to_string()]),
        ),
    )?;
    let dims: Vec<SeriesKey> = Dimension::ALL
        .iter()
        .map(|d| SeriesKey::Dim(*d))
        .filter(|k| profile.contains_key(k) && keys.is_none_or(|ks| ks.contains(k)))
        .collect();
    let axes: Vec<String> = dims.iter().map(|k| k.column_name()).collect();
    let values = dims.iter().map(|k| mean_or_none(&profile, *k)).collect();
    w.chart("report", &join(dir, "radar"), &charts::radar("interestingness profile", &axes, &[("all traces".into(), values)]))?;
    for id in traces {
        let chart = charts::timeseries(records, id, keys).map_err(|e| CliError::stage("report", e))?;
        w.chart("report", &join(dir, &format!("timeseries_{}", file_safe(id))), &chart)?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub seed: u64,
    pub stages: Vec<Stage>,
    pub artifacts: Vec<ArtifactEntry>,
}

/// Everything a pipeline run produced, for callers that want more than
/// the files.
pub struct PipelineRun {
    pub manifest: Manifest,
    pub traces: Option<TraceSet>,
    pub analysis: Option<Analysis>,
    pub clustering: Option<Clustering>,
    pub explained: Vec<ExplainOutcome>,
}

pub fn run_pipeline(cfg: &PipelineConfig, out_dir: &Path) -> Result<PipelineRun, CliError> {
    let stages: BTreeSet<Stage> = cfg.stages.iter().copied().collect();
    if stages.is_empty() {
        return Err(CliError::Validation("no stages selected".into()));
    }
    let mut w = ArtifactWriter::new(out_dir);
    let mut shown = cfg.clone();
    shown.out_dir = None;
    w.json("config", "config.json", &shown)?;

    let scenario = cfg.scenario()?;
    let needs_traces = stages.iter().any(|s| matches!(s, Stage::Validate | Stage::Analyze | Stage::Cluster | Stage::Explain));
    let mut ts: Option<TraceSet> = None;
    if stages.contains(&Stage::Gen) {
        let sc = scenario
            .as_ref()
            .ok_or_else(|| CliError::stage("gen", "no scenario or scenario_path in config"))?;
        let generated = gen_stage(sc, cfg.gen.traces, cfg.seed)?;
        w.write("gen", "traces.jsonl", format::traceset_to_string(&generated).as_bytes())?;
        let fm = build_features(&generated, &FeatureSource::from_scenario(sc), &cfg.explain.features)
            .map_err(|e| CliError::stage("gen", e))?;
        w.write("gen", "features.csv", &tables::features_to_csv(&fm).map_err(|e| CliError::stage("gen", e))?)?;
        ts = Some(generated);
    } else if needs_traces {
        let first = *stages.iter().next().expect("non-empty");
        let input = cfg
            .input
            .as_ref()
            .ok_or_else(|| CliError::stage(first.name(), "no input trace file configured"))?;
        ts = Some(load_traces(first.name(), input)?);
    }

    if stages.contains(&Stage::Validate) {
        let t = ts.as_ref().expect("traces loaded");
        t.validate().map_err(|e| CliError::Validation(e.to_string()))?;
        w.json(
            "validate",
            "validation.json",
            &serde_json::json!({"valid": true, "traces": t.traces.len(), "datapoints": t.datapoint_count()}),
        )?;
    }

    let mut analysis = None;
    let records: Option<Vec<InterestingnessRecord>> = if stages.contains(&Stage::Analyze) {
        let a = analyze_stage(&mut w, "", ts.as_ref().expect("traces loaded"), &cfg.analyze)?;
        let r = a.records.clone();
        analysis = Some(a);
        Some(r)
    } else if stages.iter().any(|s| matches!(s, Stage::Cluster | Stage::Explain | Stage::Report)) {
        let stage = *stages.iter().find(|s| **s > Stage::Analyze).expect("later stage");
        let path = cfg
            .interestingness
            .as_ref()
            .ok_or_else(|| CliError::stage(stage.name(), "no interestingness table configured"))?;
        Some(tables::read_interestingness(path).map_err(|e| CliError::stage(stage.name(), e))?)
    } else {
        None
    };

    let mut clustering = None;
    if stages.contains(&Stage::Cluster) {
        let r = records.as_deref().expect("records available");
        clustering = Some(cluster_stage(&mut w, "clusters", r, ts.as_ref(), cfg.k_range())?);
    }

    let mut explained = Vec::new();
    if stages.contains(&Stage::Explain) {
        let r = records.as_deref().expect("records available");
        let t = ts.as_ref().expect("traces loaded");
        let fm = match (&cfg.features, &scenario) {
            (Some(path), _) => tables::read_features(path).map_err(|e| CliError::stage("explain", e))?,
            (None, Some(sc)) => build_features(t, &FeatureSource::from_scenario(sc), &cfg.explain.features)
                .map_err(|e| CliError::stage("explain", e))?,
            (None, None) => {
                build_features(t, &FeatureSource::Generic, &cfg.explain.features).map_err(|e| CliError::stage("explain", e))?
            }
        };
        for name in &cfg.explain.dims {
            let key = parse_series(name)?;
            let dir = format!("explain/{}", file_safe(&key.column_name()));
            explained.push(explain_stage(&mut w, &dir, &fm, r, key, &cfg.explain.gbt, cfg.seed, cfg.explain.waterfalls)?);
        }
    }

    if stages.contains(&Stage::Report) {
        let r = records.as_deref().expect("records available");
        let mut ids: Vec<String> = Vec::new();
        for rec in r {
            if ids.len() >= cfg.report.timeseries_traces {
                break;
            }
            if !ids.contains(&rec.trace_id) {
                ids.push(rec.trace_id.clone());
            }
        }
        report_stage(&mut w, "report", r, &ids, None)?;
    }

    let mut artifacts = w.entries().to_vec();
    artifacts.sort_by(|a, b| a.path.cmp(&b.path));
    let manifest = Manifest {
        seed: cfg.seed,
        stages: stages.into_iter().collect(),
        artifacts,
    };
    let mut bytes = serde_json::to_vec_pretty(&manifest).map_err(|e| CliError::stage("manifest", e))?;
    bytes.push(b'\n');
    fs::write(out_dir.join("manifest.json"), bytes).map_err(|e| CliError::stage("manifest", e))?;
    Ok(PipelineRun {
        manifest,
        traces: ts,
        analysis,
        clustering,
        explained,
    })
}
