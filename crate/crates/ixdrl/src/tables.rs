//! CSV tables: interestingness records and per-step features.
//!
//! Both tables are keyed by `(trace_id, step)`. Absent values are empty
//! cells; numbers use the shortest representation that parses back exactly.

use std::collections::BTreeSet;
use std::path::Path;

use ixdrl_core::analyzers::{Dimension, InterestingnessRecord, SeriesKey};
use ixdrl_core::attribution::FeatureMatrix;

#[derive(Debug, thiserror::Error)]
pub enum TableError {
    #[error("{}: {source}", path.display())]
    Io { path: std::path::PathBuf, source: std::io::Error },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("unknown column {0:?}")]
    UnknownColumn(String),
    #[error("row {row}: {message}")]
    Row { row: usize, message: String },
    #[error("table must start with trace_id,step")]
    BadHeader,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> TableError + '_ {
    move |source| TableError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Column order: every dimension in canonical order, then per-factor
/// columns present in any record.
pub fn interestingness_columns(records: &[InterestingnessRecord]) -> Vec<SeriesKey> {
    let factors: BTreeSet<SeriesKey> = records
        .iter()
        .flat_map(|r| r.keys())
        .filter(|k| matches!(k, SeriesKey::Factor(..)))
        .collect();
    Dimension::ALL
        .iter()
        .map(|d| SeriesKey::Dim(*d))
        .chain(factors)
        .collect()
}

pub fn interestingness_to_csv(records: &[InterestingnessRecord]) -> Result<Vec<u8>, TableError> {
    let cols = interestingness_columns(records);
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["trace_id".to_string(), "step".to_string()];
    header.extend(cols.iter().map(|c| c.column_name()));
    w.write_record(&header)?;
    for r in records {
        let mut row = vec![r.trace_id.clone(), r.step.to_string()];
        row.extend(cols.iter().map(|c| r.get(*c).map(|v| v.to_string()).unwrap_or_default()));
        w.write_record(&row)?;
    }
    w.into_inner().map_err(|e| TableError::Csv(e.into_error().into()))
}

pub fn write_interestingness(records: &[InterestingnessRecord], path: &Path) -> Result<(), TableError> {
    std::fs::write(path, interestingness_to_csv(records)?).map_err(io_err(path))
}

fn parse_key(row: usize, id: &str, step: &str) -> Result<(String, usize), TableError> {
    let step = step.parse::<usize>().map_err(|_| TableError::Row {
        row,
        message: format!("bad step {step:?}"),
    })?;
    if id.is_empty() {
        return Err(TableError::Row {
            row,
            message: "empty trace_id".into(),
        });
    }
    Ok((id.to_string(), step))
}

fn parse_cell(row: usize, col: &str, cell: &str) -> Result<Option<f64>, TableError> {
    if cell.is_empty() {
        return Ok(None);
    }
    let v = cell.parse::<f64>().map_err(|_| TableError::Row {
        row,
        message: format!("{col}: not a number: {cell:?}"),
    })?;
    if !v.is_finite() {
        return Err(TableError::Row {
            row,
            message: format!("{col}: non-finite value"),
        });
    }
    Ok(Some(v))
}

pub fn interestingness_from_csv(bytes: &[u8]) -> Result<Vec<InterestingnessRecord>, TableError> {
    let mut r = csv::Reader::from_reader(bytes);
    let header = r.headers()?.clone();
    if header.get(0) != Some("trace_id") || header.get(1) != Some("step") {
        return Err(TableError::BadHeader);
    }
    let keys = header
        .iter()
        .skip(2)
        .map(|c| SeriesKey::parse(c).ok_or_else(|| TableError::UnknownColumn(c.to_string())))
        .collect::<Result<Vec<_>, _>>()?;
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let row = i + 2;
        let (id, step) = parse_key(row, &rec[0], &rec[1])?;
        let mut ir = InterestingnessRecord::new(&id, step);
        for (key, cell) in keys.iter().zip(rec.iter().skip(2)) {
            if let Some(v) = parse_cell(row, &key.column_name(), cell)? {
                match *key {
                    SeriesKey::Dim(d) => {
                        ir.values.insert(d, v);
                    }
                    SeriesKey::Factor(d, f) => {
                        ir.per_factor.insert((d, f), v);
                    }
                }
            }
        }
        out.push(ir);
    }
    Ok(out)
}

pub fn read_interestingness(path: &Path) -> Result<Vec<InterestingnessRecord>, TableError> {
    interestingness_from_csv(&std::fs::read(path).map_err(io_err(path))?)
}

pub fn features_to_csv(fm: &FeatureMatrix) -> Result<Vec<u8>, TableError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["trace_id".to_string(), "step".to_string()];
    header.extend(fm.names.iter().cloned());
    w.write_record(&header)?;
    for ((id, step), row) in fm.keys.iter().zip(&fm.rows) {
        let mut cells = vec![id.clone(), step.to_string()];
        cells.extend(row.iter().map(|v| v.to_string()));
        w.write_record(&cells)?;
    }
    w.into_inner().map_err(|e| TableError::Csv(e.into_error().into()))
}

pub fn features_from_csv(bytes: &[u8]) -> Result<FeatureMatrix, TableError> {
    let mut r = csv::Reader::from_reader(bytes);
    let header = r.headers()?.clone();
    if header.get(0) != Some("trace_id") || header.get(1) != Some("step") {
        return Err(TableError::BadHeader);
    }
    let names: Vec<String> = header.iter().skip(2).map(str::to_string).collect();
    let mut keys = Vec::new();
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let row = i + 2;
        keys.push(parse_key(row, &rec[0], &rec[1])?);
        let vals = names
            .iter()
            .zip(rec.iter().skip(2))
            .map(|(n, c)| {
                parse_cell(row, n, c)?.ok_or_else(|| TableError::Row {
                    row,
                    message: format!("{n}: empty feature cell"),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(vals);
    }
    FeatureMatrix::new(names, keys, rows).map_err(|e| TableError::Row {
        row: 0,
        message: e.to_string(),
    })
}

pub fn write_features(fm: &FeatureMatrix, path: &Path) -> Result<(), TableError> {
    std::fs::write(path, features_to_csv(fm)?).map_err(io_err(path))
}

pub fn read_features(path: &Path) -> Result<FeatureMatrix, TableError> {
    features_from_csv(&std::fs::read(path).map_err(io_err(path))?)
}

/// Small helper for the many plain numeric tables the reports emit.
pub fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory csv write");
    for r in rows {
        w.write_record(&r).expect("in-memory csv write");
    }
    w.into_inner().expect("in-memory csv flush")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interestingness_round_trip() {
        let mut a = InterestingnessRecord::new("t0", 0);
        a.values.insert(Dimension::Value, -0.1234567890123);
        a.values.insert(Dimension::Confidence, 1.0);
        a.per_factor.insert((Dimension::Confidence, 1), 0.5);
        let mut b = InterestingnessRecord::new("t0", 1);
        b.values.insert(Dimension::Value, 0.3);
        let bytes = interestingness_to_csv(&[a.clone(), b.clone()]).unwrap();
        let text = String::from_utf8(bytes.clone()).unwrap();
        assert!(text.starts_with("trace_id,step,value,confidence,"));
        assert_eq!(interestingness_from_csv(&bytes).unwrap(), vec![a, b]);
    }

    #[test]
    fn unknown_column_is_rejected() {
        let err = interestingness_from_csv(b"trace_id,step,valour\nt,0,1\n").unwrap_err();
        assert!(matches!(err, TableError::UnknownColumn(c) if c == "valour"));
    }

    #[test]
    fn features_round_trip() {
        let fm = FeatureMatrix::new(
            vec!["x".into(), "y".into()],
            vec![("a".into(), 0), ("a".into(), 1)],
            vec![vec![0.1, 2.0], vec![-3.5, 1e-9]],
        )
        .unwrap();
        assert_eq!(features_from_csv(&features_to_csv(&fm).unwrap()).unwrap(), fm);
    }
}
