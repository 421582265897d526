use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ixdrl::pipeline::{
    self, cluster_stage, coverage_json, default_out_root, explain_stage, gen_stage, load_scenario,
    load_traces, parse_k_range, parse_series, report_stage, ArtifactWriter, CliError, PipelineConfig, Stage,
};
use ixdrl::tables;
use ixdrl_core::analyzers::{analyze, AnalyzerConfig, Dimension, ValueMode};
use ixdrl_core::attribution::{build_features, ExtractorConfig, FeatureSource, GbtParams};

#[derive(Parser)]
#[command(name = "ixdrl", version, about = "Interestingness analytics for agent interaction traces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Roll out a toy agent and write a trace file.
    Gen {
        /// Scenario JSON (gridworld, lineworld or mixture).
        #[arg(long)]
        env: PathBuf,
        #[arg(long, default_value_t = 100)]
        traces: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write per-step task features for `explain`.
        #[arg(long)]
        features: Option<PathBuf>,
    },
    /// Check a trace file against the schema.
    Validate { file: PathBuf },
    /// Compute interestingness for every step.
    Analyze {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Coverage summary; defaults to coverage.json next to --out.
        #[arg(long)]
        coverage: Option<PathBuf>,
        #[command(flatten)]
        opts: AnalyzeOpts,
        /// Comma-separated subset of dimensions.
        #[arg(long, value_delimiter = ',')]
        dims: Option<Vec<String>>,
    },
    /// Cluster traces by mean interestingness.
    Cluster {
        #[arg(long = "in")]
        input: PathBuf,
        /// Trace file supplying lengths and metadata for cluster statistics.
        #[arg(long)]
        traces: Option<PathBuf>,
        #[arg(long, default_value = "2..15")]
        k: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Attribute one interestingness series to task features.
    Explain {
        #[arg(long)]
        traces: PathBuf,
        #[arg(long)]
        interestingness: PathBuf,
        /// Feature CSV; raw observations are used when omitted.
        #[arg(long)]
        features: Option<PathBuf>,
        #[arg(long)]
        dim: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        rounds: Option<usize>,
        #[arg(long)]
        max_depth: Option<usize>,
        #[arg(long)]
        learning_rate: Option<f64>,
        #[arg(long, default_value_t = 3)]
        waterfalls: usize,
    },
    /// Radar profile and per-trace time series.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
        /// Traces to plot over time; defaults to the first one.
        #[arg(long = "trace")]
        traces: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        dims: Option<Vec<String>>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the configured stages end to end and write a manifest.
    Pipeline {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        traces: Option<usize>,
        #[arg(long)]
        k: Option<String>,
        #[arg(long, value_delimiter = ',')]
        stages: Option<Vec<String>>,
        #[command(flatten)]
        opts: AnalyzeOpts,
    },
}

#[derive(Args)]
struct AnalyzeOpts {
    /// Normalize Value with running extremes instead of whole-set ones.
    #[arg(long)]
    online_value: bool,
    /// Gain of the Goal Conduciveness slope.
    #[arg(long)]
    rho: Option<f64>,
}

impl AnalyzeOpts {
    fn apply(&self, cfg: &mut AnalyzerConfig) {
        if self.online_value {
            cfg.value_mode = ValueMode::Online;
        }
        if let Some(rho) = self.rho {
            cfg.rho = rho;
        }
    }
}

fn out_or(out: &Option<PathBuf>, default: &str) -> PathBuf {
    out.clone().unwrap_or_else(|| default_out_root().join(default))
}

fn path_str(p: &Path) -> String {
    p.to_string_lossy().into_owned()
}

fn sibling(p: &Path, name: &str) -> PathBuf {
    p.parent().map(|d| d.join(name)).unwrap_or_else(|| PathBuf::from(name))
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Gen {
            env,
            traces,
            seed,
            out,
            features,
        } => {
            let scenario = load_scenario(&env)?;
            let ts = gen_stage(&scenario, traces, seed)?;
            let out = out_or(&out, "traces.jsonl");
            let mut w = ArtifactWriter::new("");
            w.write("gen", &path_str(&out), ixdrl::traceset_to_string(&ts).as_bytes())?;
            if let Some(fpath) = features {
                let fm = build_features(&ts, &FeatureSource::from_scenario(&scenario), &ExtractorConfig::default())
                    .map_err(|e| CliError::stage("gen", e))?;
                let bytes = tables::features_to_csv(&fm).map_err(|e| CliError::stage("gen", e))?;
                w.write("gen", &path_str(&fpath), &bytes)?;
            }
            println!("wrote {} traces ({} steps) to {}", ts.traces.len(), ts.datapoint_count(), out.display());
        }
        Command::Validate { file } => {
            let ts = load_traces("validate", &file)?;
            println!("ok: {} traces, {} datapoints", ts.traces.len(), ts.datapoint_count());
        }
        Command::Analyze {
            input,
            out,
            coverage,
            opts,
            dims,
        } => {
            let ts = load_traces("analyze", &input)?;
            let mut cfg = AnalyzerConfig::default();
            opts.apply(&mut cfg);
            if let Some(names) = dims {
                cfg.dimensions = names
                    .iter()
                    .map(|n| Dimension::from_name(n).ok_or_else(|| CliError::Validation(format!("unknown dimension {n:?}"))))
                    .collect::<Result<_, _>>()?;
            }
            let out = out_or(&out, "interestingness.csv");
            let coverage = coverage.unwrap_or_else(|| sibling(&out, "coverage.json"));
            let a = analyze(&ts, &cfg).map_err(|e| CliError::stage("analyze", e))?;
            let mut w = ArtifactWriter::new("");
            let csv = tables::interestingness_to_csv(&a.records).map_err(|e| CliError::stage("analyze", e))?;
            w.write("analyze", &path_str(&out), &csv)?;
            w.json("analyze", &path_str(&coverage), &coverage_json(&a))?;
            let avail: Vec<&str> = a.coverage.available().iter().map(|d| d.name()).collect();
            println!("{} records; dimensions: {}", a.records.len(), avail.join(", "));
        }
        Command::Cluster { input, traces, k, out } => {
            let k = parse_k_range(&k).map_err(CliError::Validation)?;
            let records = tables::read_interestingness(&input).map_err(|e| CliError::stage("cluster", e))?;
            let ts = traces.map(|p| load_traces("cluster", &p)).transpose()?;
            let out = out_or(&out, "clusters");
            let mut w = ArtifactWriter::new(out.clone());
            let c = cluster_stage(&mut w, "", &records, ts.as_ref(), k)?;
            let best = c.sweep.best();
            println!(
                "{} traces; best k = {} (silhouette {:.4}); sizes {:?}; outputs in {}",
                best.labels.len(),
                best.k,
                best.silhouette,
                best.sizes(),
                out.display()
            );
        }
        Command::Explain {
            traces,
            interestingness,
            features,
            dim,
            out,
            seed,
            rounds,
            max_depth,
            learning_rate,
            waterfalls,
        } => {
            let key = parse_series(&dim)?;
            let ts = load_traces("explain", &traces)?;
            let records = tables::read_interestingness(&interestingness).map_err(|e| CliError::stage("explain", e))?;
            let fm = match features {
                Some(p) => tables::read_features(&p).map_err(|e| CliError::stage("explain", e))?,
                None => build_features(&ts, &FeatureSource::Generic, &ExtractorConfig::default())
                    .map_err(|e| CliError::stage("explain", e))?,
            };
            let mut params = GbtParams::default();
            if let Some(r) = rounds {
                params.rounds = r;
            }
            if let Some(d) = max_depth {
                params.max_depth = d;
            }
            if let Some(l) = learning_rate {
                params.learning_rate = l;
            }
            let out = out_or(&out, "explain");
            let mut w = ArtifactWriter::new(out.clone());
            let o = explain_stage(&mut w, "", &fm, &records, key, &params, seed, waterfalls)?;
            println!(
                "{}: held-out MAE {:.4} vs baseline {:.4} ({}); {} abnormal steps",
                key.column_name(),
                o.trained.test_mae,
                o.trained.baseline_mae,
                if o.trained.passed_gate { "kept" } else { "excluded by quality gate" },
                o.abnormal.flagged.len()
            );
            if let Some(gi) = &o.importance {
                for (i, f) in gi.ranking.iter().take(5).enumerate() {
                    println!("  {}. {} ({:.4})", i + 1, f.name, f.mean_abs);
                }
            }
        }
        Command::Report {
            input,
            traces,
            dims,
            out,
        } => {
            let records = tables::read_interestingness(&input).map_err(|e| CliError::stage("report", e))?;
            let keys = dims
                .map(|names| names.iter().map(|n| parse_series(n)).collect::<Result<Vec<_>, _>>())
                .transpose()?;
            let traces = if traces.is_empty() {
                records.first().map(|r| vec![r.trace_id.clone()]).unwrap_or_default()
            } else {
                traces
            };
            let out = out_or(&out, "report");
            let mut w = ArtifactWriter::new(out.clone());
            report_stage(&mut w, "", &records, &traces, keys.as_deref())?;
            println!("wrote {} files to {}", w.entries().len(), out.display());
        }
        Command::Pipeline {
            config,
            out,
            seed,
            traces,
            k,
            stages,
            opts,
        } => {
            let mut cfg = PipelineConfig::load(&config)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(n) = traces {
                cfg.gen.traces = n;
            }
            if let Some(k) = k {
                let r = parse_k_range(&k).map_err(CliError::Validation)?;
                cfg.cluster.k_min = *r.start();
                cfg.cluster.k_max = *r.end();
            }
            if let Some(names) = stages {
                cfg.stages = names
                    .iter()
                    .map(|n| {
                        Stage::ALL
                            .into_iter()
                            .find(|s| s.name() == n)
                            .ok_or_else(|| CliError::Validation(format!("unknown stage {n:?}")))
                    })
                    .collect::<Result<_, _>>()?;
            }
            opts.apply(&mut cfg.analyze);
            let out = out.or_else(|| cfg.out_dir.clone()).unwrap_or_else(default_out_root);
            let run = pipeline::run_pipeline(&cfg, &out)?;
            println!(
                "{} artifacts; manifest at {}",
                run.manifest.artifacts.len(),
                out.join("manifest.json").display()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
