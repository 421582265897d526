//! JSON Lines trace files.
//!
//! Line 1 is a header (`schema_version`, `action_space`, `discount`,
//! optional `reward_range`). Every following line is one datapoint with its
//! `trace_id`. The first line of each trace may carry a `trace` object with
//! the terminal flag and metadata. Keys are written in sorted order and
//! floats in shortest round-trip form, so saving is byte-stable.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use ixdrl_core::trace::{ActionSpaceSpec, MetaValue};
use ixdrl_core::{InteractionDatapoint, Trace, TraceSet, ValidationError};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("{0}")]
    Invalid(#[from] ValidationError),
    #[error("empty trace file")]
    Empty,
}

impl FormatError {
    /// True for problems with the content rather than the file system.
    pub fn is_validation(&self) -> bool {
        !matches!(self, FormatError::Io { .. })
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Header {
    schema_version: u32,
    action_space: ActionSpaceSpec,
    discount: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    reward_range: Option<(f64, f64)>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TraceInfo {
    #[serde(default)]
    terminal: bool,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    metadata: BTreeMap<String, MetaValue>,
}

fn to_line<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("trace types serialize to JSON")
}

pub fn traceset_to_string(ts: &TraceSet) -> String {
    let header = Header {
        schema_version: SCHEMA_VERSION,
        action_space: ts.action_space.clone(),
        discount: ts.discount,
        reward_range: ts.reward_range,
    };
    let mut out = to_line(&header);
    out.push('\n');
    for trace in &ts.traces {
        for (i, dp) in trace.datapoints.iter().enumerate() {
            let Value::Object(mut obj) = serde_json::to_value(dp).expect("datapoint serializes") else {
                unreachable!("datapoints serialize to objects")
            };
            obj.insert("trace_id".into(), Value::String(trace.trace_id.clone()));
            if i == 0 && (trace.terminal || !trace.metadata.is_empty()) {
                let info = TraceInfo {
                    terminal: trace.terminal,
                    metadata: trace.metadata.clone(),
                };
                obj.insert("trace".into(), serde_json::to_value(info).expect("metadata serializes"));
            }
            out.push_str(&to_line(&Value::Object(obj)));
            out.push('\n');
        }
    }
    out
}

pub fn save_traceset(ts: &TraceSet, path: &Path) -> Result<(), FormatError> {
    let io = |source| FormatError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut f = fs::File::create(path).map_err(io)?;
    f.write_all(traceset_to_string(ts).as_bytes()).map_err(io)
}

fn syntax(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Syntax {
        line,
        message: message.into(),
    }
}

/// Parses and fully validates a trace file held in memory.
pub fn parse_traceset(text: &str) -> Result<TraceSet, FormatError> {
    parse_lines(text.lines().map(|l| Ok::<_, std::io::Error>(l.to_string())), Path::new("<memory>"))
}

pub fn load_traceset(path: &Path) -> Result<TraceSet, FormatError> {
    let f = fs::File::open(path).map_err(|source| FormatError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_lines(BufReader::new(f).lines(), path)
}

fn parse_lines(
    lines: impl Iterator<Item = Result<String, std::io::Error>>,
    path: &Path,
) -> Result<TraceSet, FormatError> {
    let mut header: Option<Header> = None;
    let mut order: Vec<String> = Vec::new();
    let mut traces: BTreeMap<String, Trace> = BTreeMap::new();
    for (i, line) in lines.enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|source| FormatError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        if header.is_none() {
            let h: Header = serde_json::from_str(&line).map_err(|e| syntax(lineno, format!("header: {e}")))?;
            if h.schema_version != SCHEMA_VERSION {
                return Err(syntax(lineno, format!("unsupported schema_version {}", h.schema_version)));
            }
            header = Some(h);
            continue;
        }
        let Value::Object(mut obj) = serde_json::from_str::<Value>(&line).map_err(|e| syntax(lineno, e.to_string()))?
        else {
            return Err(syntax(lineno, "datapoint must be a JSON object"));
        };
        let trace_id = match obj.remove("trace_id") {
            Some(Value::String(s)) if !s.is_empty() => s,
            _ => return Err(syntax(lineno, "trace_id: missing or not a non-empty string")),
        };
        let info = obj.remove("trace");
        let step_hint = obj.get("step").and_then(Value::as_u64);
        let dp: InteractionDatapoint = serde_json::from_value(Value::Object(obj)).map_err(|e| {
            let step = step_hint.map(|s| format!(" step {s}")).unwrap_or_default();
            syntax(lineno, format!("trace {trace_id}{step}: {e}"))
        })?;
        let trace = traces.entry(trace_id.clone()).or_insert_with(|| {
            order.push(trace_id.clone());
            Trace {
                trace_id: trace_id.clone(),
                datapoints: Vec::new(),
                terminal: false,
                metadata: BTreeMap::new(),
            }
        });
        if let Some(info) = info {
            if !trace.datapoints.is_empty() {
                return Err(syntax(lineno, format!("trace {trace_id}: `trace` object only allowed on its first line")));
            }
            let info: TraceInfo =
                serde_json::from_value(info).map_err(|e| syntax(lineno, format!("trace {trace_id}: trace: {e}")))?;
            trace.terminal = info.terminal;
            trace.metadata = info.metadata;
        }
        trace.datapoints.push(dp);
    }
    let header = header.ok_or(FormatError::Empty)?;
    let ts = TraceSet {
        action_space: header.action_space,
        discount: header.discount,
        reward_range: header.reward_range,
        traces: order.iter().filter_map(|id| traces.remove(id)).collect(),
    };
    ts.validate()?;
    Ok(ts)
}

/// Header-less JSON value of a single datapoint line, for tests and docs.
pub fn datapoint_line(trace_id: &str, dp: &InteractionDatapoint) -> Map<String, Value> {
    let Value::Object(mut obj) = serde_json::to_value(dp).expect("datapoint serializes") else {
        unreachable!()
    };
    obj.insert("trace_id".into(), Value::String(trace_id.into()));
    obj
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOLDEN: &str = include_str!("../data/golden.jsonl");

    #[test]
    fn golden_file_loads() {
        let ts = parse_traceset(GOLDEN).unwrap();
        assert_eq!(ts.traces.len(), 1);
        assert_eq!(ts.traces[0].datapoints.len(), 3);
    }

    #[test]
    fn save_is_byte_stable() {
        let ts = parse_traceset(GOLDEN).unwrap();
        let a = traceset_to_string(&ts);
        let b = traceset_to_string(&parse_traceset(&a).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn policy_sum_error_names_the_step() {
        let bad = GOLDEN.replacen("0.7", "0.6", 1);
        let err = parse_traceset(&bad).unwrap_err();
        assert!(err.is_validation());
        let msg = err.to_string();
        assert!(msg.contains("step 0") && msg.contains("policy"), "{msg}");
    }

    #[test]
    fn header_is_required() {
        assert!(matches!(parse_traceset(""), Err(FormatError::Empty)));
        assert!(matches!(parse_traceset("{}"), Err(FormatError::Syntax { line: 1, .. })));
    }
}
