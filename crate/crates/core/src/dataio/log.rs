//! Canonical prediction-log CSV plus JSON sidecar.
//!
//! Header: `x_id, f_0..f_{d−1}, s_0..s_{k−1}, y_pred | p_pos, y_true`.
//! Floats are written with Rust's shortest round-trip formatting, so
//! `read_log(write_log(l)) == l` bit for bit.

use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::{DataError, LogMetadata, Observation, PredictionLog, PredictionRecord};
use crate::metrics::Task;

/// `run/log.csv` → `run/log.json`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("json")
}

fn outcome_column(task: Task) -> &'static str {
    match task {
        Task::Regression => "y_pred",
        Task::Classification => "p_pos",
    }
}

fn header(task: Task, d: usize, k: usize) -> Vec<String> {
    std::iter::once("x_id".to_string())
        .chain((0..d).map(|j| format!("f_{j}")))
        .chain((0..k).map(|j| format!("s_{j}")))
        .chain([outcome_column(task).to_string(), "y_true".to_string()])
        .collect()
}

pub fn write_log(path: &Path, log: &PredictionLog) -> Result<(), DataError> {
    let meta = &log.meta;
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
    w.write_record(header(meta.task, meta.d, meta.k))?;
    let mut row: Vec<String> = Vec::with_capacity(meta.d + meta.k + 3);
    for r in &log.records {
        if r.x.len() != meta.d || r.s.len() != meta.k || r.obs.task() != meta.task {
            return Err(DataError::InvalidSpec(format!(
                "record for x_id {} does not match the log's declared shape",
                r.x_id
            )));
        }
        row.clear();
        row.push(r.x_id.to_string());
        row.extend(r.x.iter().chain(&r.s).map(f64::to_string));
        match r.obs {
            Observation::Regression { y_pred, y_true } => {
                row.push(y_pred.to_string());
                row.push(y_true.to_string());
            }
            Observation::Classification { p_pos, y_true } => {
                row.push(p_pos.to_string());
                row.push(u8::from(y_true).to_string());
            }
        }
        w.write_record(&row)?;
    }
    w.into_inner()
        .map_err(|e| DataError::Io(e.into_error()))?
        .flush()?;
    let mut side = BufWriter::new(File::create(sidecar_path(path))?);
    serde_json::to_writer_pretty(&mut side, meta)?;
    side.write_all(b"\n")?;
    side.flush()?;
    Ok(())
}

/// One schema violation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub line: u64,
    pub column: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

impl From<&DataError> for Diagnostic {
    fn from(e: &DataError) -> Self {
        match e {
            DataError::Schema {
                line,
                column,
                message,
            } => Diagnostic {
                line: *line,
                column: column.clone(),
                message: message.clone(),
            },
            DataError::TaskMismatch { .. } => Diagnostic {
                line: 1,
                column: "task".into(),
                message: format!("TaskMismatch: {e}"),
            },
            other => Diagnostic {
                line: 0,
                column: String::new(),
                message: other.to_string(),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub rows: usize,
    pub task: Option<Task>,
    pub diagnostics: Vec<Diagnostic>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.diagnostics.is_empty()
    }
}

/// Reads a log, failing on the first violation. The sidecar is optional;
/// without it the task, `d` and `k` are inferred from the header.
pub fn read_log(path: &Path, expected: Option<Task>) -> Result<PredictionLog, DataError> {
    let parsed = parse(path, expected)?;
    match parsed.issues.into_iter().next() {
        Some(e) => Err(e),
        None => Ok(PredictionLog {
            meta: parsed.meta.expect("meta present when no issues"),
            records: parsed.records,
        }),
    }
}

/// Checks a log and reports every violation. Only I/O failures are errors.
pub fn validate_log(path: &Path, expected: Option<Task>) -> Result<ValidationReport, DataError> {
    let parsed = parse(path, expected)?;
    Ok(ValidationReport {
        rows: parsed.rows,
        task: parsed.meta.map(|m| m.task),
        diagnostics: parsed.issues.iter().map(Diagnostic::from).collect(),
    })
}

struct Parsed {
    meta: Option<LogMetadata>,
    records: Vec<PredictionRecord>,
    rows: usize,
    issues: Vec<DataError>,
}

fn schema(line: u64, column: impl Into<String>, message: impl Into<String>) -> DataError {
    DataError::Schema {
        line,
        column: column.into(),
        message: message.into(),
    }
}

fn parse(path: &Path, expected: Option<Task>) -> Result<Parsed, DataError> {
    let mut text = Vec::new();
    File::open(path)?.read_to_end(&mut text)?;
    let mut out = Parsed {
        meta: None,
        records: Vec::new(),
        rows: 0,
        issues: Vec::new(),
    };
    let mut rdr = csv::ReaderBuilder::new()
        .flexible(true)
        .from_reader(text.as_slice());
    let cols: Vec<String> = match rdr.headers() {
        Ok(h) => h.iter().map(|c| c.trim().to_string()).collect(),
        Err(e) => {
            out.issues.push(schema(1, "header", e.to_string()));
            return Ok(out);
        }
    };
    let Some(meta) = check_header(path, &cols, expected, &mut out.issues)? else {
        return Ok(out);
    };
    let (d, k, task) = (meta.d, meta.k, meta.task);
    let mut seen: HashMap<u64, (u64, Vec<f64>)> = HashMap::new();

    for result in rdr.records() {
        out.rows += 1;
        let rec = match result {
            Ok(r) => r,
            Err(e) => {
                let line = e.position().map_or(0, |p| p.line());
                out.issues.push(schema(line, "row", e.to_string()));
                continue;
            }
        };
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != cols.len() {
            out.issues.push(schema(
                line,
                "row",
                format!("expected {} fields, found {}", cols.len(), rec.len()),
            ));
            continue;
        }
        let before = out.issues.len();
        let x_id = match rec[0].trim().parse::<u64>() {
            Ok(v) => v,
            Err(_) => {
                out.issues.push(schema(line, "x_id", format!("not a non-negative integer: {:?}", &rec[0])));
                0
            }
        };
        let mut num = |j: usize| -> f64 {
            match rec[j].trim().parse::<f64>() {
                Ok(v) if v.is_finite() => v,
                _ => {
                    out.issues.push(schema(line, cols[j].clone(), format!("not a finite number: {:?}", &rec[j])));
                    f64::NAN
                }
            }
        };
        let x: Vec<f64> = (1..=d).map(&mut num).collect();
        let s: Vec<f64> = (d + 1..=d + k).map(&mut num).collect();
        let pred = num(d + k + 1);
        let truth = num(d + k + 2);
        let obs = match task {
            Task::Regression => Observation::Regression {
                y_pred: pred,
                y_true: truth,
            },
            Task::Classification => {
                if pred.is_finite() && !(0.0..=1.0).contains(&pred) {
                    out.issues.push(schema(line, "p_pos", format!("{pred} outside [0, 1]")));
                }
                if truth.is_finite() && truth != 0.0 && truth != 1.0 {
                    out.issues.push(schema(line, "y_true", format!("label {truth} is not 0 or 1")));
                }
                Observation::Classification {
                    p_pos: pred,
                    y_true: truth == 1.0,
                }
            }
        };
        if out.issues.len() > before {
            continue;
        }
        match seen.get(&x_id) {
            Some((first, x0)) => {
                if let Some(j) = (0..d).find(|&j| x0[j].to_bits() != x[j].to_bits()) {
                    out.issues.push(schema(
                        line,
                        format!("f_{j}"),
                        format!("features of x_id {x_id} differ from line {first}"),
                    ));
                    continue;
                }
            }
            None => {
                seen.insert(x_id, (line, x.clone()));
            }
        }
        out.records.push(PredictionRecord { x_id, x, s, obs });
    }
    out.meta = Some(meta);
    Ok(out)
}

// Returns metadata if the header is usable for row parsing.
fn check_header(
    path: &Path,
    cols: &[String],
    expected: Option<Task>,
    issues: &mut Vec<DataError>,
) -> Result<Option<LogMetadata>, DataError> {
    let has = |c: &str| cols.iter().any(|h| h == c);
    let task = match (has("y_pred"), has("p_pos")) {
        (true, false) => Some(Task::Regression),
        (false, true) => Some(Task::Classification),
        (true, true) => {
            issues.push(schema(1, "p_pos", "both y_pred and p_pos present"));
            None
        }
        (false, false) => {
            let col = match expected {
                Some(t) => outcome_column(t),
                None => "y_pred",
            };
            issues.push(schema(1, col, "missing column (expected y_pred or p_pos)"));
            None
        }
    };
    for required in ["x_id", "y_true"] {
        if !has(required) {
            issues.push(schema(1, required, "missing column"));
        }
    }
    let Some(task) = task else { return Ok(None) };
    if !issues.is_empty() {
        return Ok(None);
    }
    let d = cols.iter().filter(|c| c.starts_with("f_")).count();
    let k = cols.iter().filter(|c| c.starts_with("s_")).count();
    let want = header(task, d, k);
    if let Some(j) = (0..want.len().max(cols.len())).find(|&j| want.get(j) != cols.get(j)) {
        let found = cols.get(j).map_or("nothing", String::as_str);
        let column = want.get(j).cloned().unwrap_or_else(|| found.to_string());
        issues.push(schema(1, column, format!("header out of order: found {found:?} at position {j}")));
        return Ok(None);
    }
    if let Some(t) = expected {
        if t != task {
            issues.push(DataError::TaskMismatch {
                expected: t,
                found: task,
            });
            return Ok(None);
        }
    }

    let side = sidecar_path(path);
    let meta = if side.exists() {
        let m: LogMetadata = serde_json::from_reader(File::open(&side)?)?;
        if (m.task, m.d, m.k) != (task, d, k) {
            issues.push(schema(
                1,
                "sidecar",
                format!(
                    "sidecar declares {} with d={}, k={} but header has {} with d={}, k={}",
                    m.task, m.d, m.k, task, d, k
                ),
            ));
            return Ok(None);
        }
        m
    } else {
        LogMetadata {
            dataset: path
                .file_stem()
                .map_or_else(String::new, |s| s.to_string_lossy().into_owned()),
            task,
            d,
            k,
            seed: None,
            subject_columns: Vec::new(),
            subjects: Vec::new(),
        }
    };
    Ok(Some(meta))
}
