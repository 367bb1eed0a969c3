//! Synthetic benchmarks, prediction logs, grouped splits and assessor tables.

mod log;
mod split;
mod synth;
mod table;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::learners::{self, subject_columns, subject_vector, LearnerError, LearnerSpec};
use crate::metrics::{MetricError, Task};
use crate::seed;

pub use log::{read_log, sidecar_path, validate_log, write_log, Diagnostic, ValidationReport};
pub use split::{grouped_split, GroupedSplit};
pub use synth::{synth_dataset, Dataset, Shape, SynthSpec};
pub use table::{
    assessor_features, build_assessor_table, dataset_calibration, metric_values,
    subject_calibrations, AssessorTable,
};

#[derive(Debug, Error)]
pub enum DataError {
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
    #[error("line {line}, column {column}: {message}")]
    Schema {
        line: u64,
        column: String,
        message: String,
    },
    #[error("task mismatch: expected {expected}, found {found}")]
    TaskMismatch { expected: Task, found: Task },
    #[error("cannot split {ids} ids at fraction {fraction} with both sides non-empty")]
    DegenerateSplit { ids: usize, fraction: f64 },
    #[error(transparent)]
    Learner(#[from] LearnerError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

/// What the subject predicted and what was observed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Observation {
    Regression { y_pred: f64, y_true: f64 },
    Classification { p_pos: f64, y_true: bool },
}

impl Observation {
    pub fn task(&self) -> Task {
        match self {
            Observation::Regression { .. } => Task::Regression,
            Observation::Classification { .. } => Task::Classification,
        }
    }
}

/// One ⟨x, s, prediction, truth⟩ row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub x_id: u64,
    pub x: Vec<f64>,
    pub s: Vec<f64>,
    pub obs: Observation,
}

/// Sidecar description of a log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogMetadata {
    pub dataset: String,
    pub task: Task,
    pub d: usize,
    pub k: usize,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub subject_columns: Vec<String>,
    #[serde(default)]
    pub subjects: Vec<LearnerSpec>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PredictionLog {
    pub meta: LogMetadata,
    pub records: Vec<PredictionRecord>,
}

impl PredictionLog {
    pub fn task(&self) -> Task {
        self.meta.task
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn x_ids(&self) -> Vec<u64> {
        self.records.iter().map(|r| r.x_id).collect()
    }

    /// `y_pred − y_true` per row; `None` for classification logs.
    pub fn residuals(&self) -> Option<Vec<f64>> {
        self.records
            .iter()
            .map(|r| match r.obs {
                Observation::Regression { y_pred, y_true } => Some(y_pred - y_true),
                Observation::Classification { .. } => None,
            })
            .collect()
    }
}

/// Trains every subject in `grid` on one side of a grouped split of each
/// dataset and logs its predictions on the other side.
///
/// `holdout` is the fraction of instances logged. Subject `c` of dataset `i`
/// is fitted with seed `derive_seed(seed, [i, c])`.
pub fn generate_logs(
    datasets: &[Dataset],
    grid: &[LearnerSpec],
    holdout: f64,
    seed: u64,
) -> Result<Vec<PredictionLog>, DataError> {
    if grid.is_empty() {
        return Err(DataError::InvalidSpec("empty subject grid".into()));
    }
    if !(holdout > 0.0 && holdout < 1.0) {
        return Err(DataError::InvalidSpec(format!(
            "holdout fraction {holdout} outside (0, 1)"
        )));
    }
    datasets
        .iter()
        .enumerate()
        .map(|(i, ds)| log_dataset(ds, grid, holdout, seed, i as u64))
        .collect()
}

fn log_dataset(
    ds: &Dataset,
    grid: &[LearnerSpec],
    holdout: f64,
    seed: u64,
    index: u64,
) -> Result<PredictionLog, DataError> {
    for spec in grid {
        if spec.family.task() != ds.task {
            return Err(DataError::TaskMismatch {
                expected: ds.task,
                found: spec.family.task(),
            });
        }
    }
    let n = ds.features.nrows();
    let ids: Vec<u64> = (0..n as u64).collect();
    let split = grouped_split(&ids, 1.0 - holdout, seed::derive_seed(seed, &[index]))?;
    let train: Vec<usize> = (0..n).filter(|&i| split.is_train(i as u64)).collect();
    let test: Vec<usize> = (0..n).filter(|&i| !split.is_train(i as u64)).collect();
    let x_train = ds.features.select(ndarray::Axis(0), &train);
    let y_train = ds.targets.select(ndarray::Axis(0), &train);
    let x_test = ds.features.select(ndarray::Axis(0), &test);

    let per_subject: Vec<Vec<PredictionRecord>> = grid
        .par_iter()
        .enumerate()
        .map(|(c, spec)| {
            let spec = spec.seed(seed::derive_seed(seed, &[index, c as u64]));
            let model = learners::fit(&spec, x_train.view(), y_train.view())?;
            let pred = model.predict(x_test.view())?;
            let s = subject_vector(&spec).0;
            Ok(test
                .iter()
                .zip(pred.iter())
                .map(|(&row, &p)| {
                    let y = ds.targets[row];
                    PredictionRecord {
                        x_id: row as u64,
                        x: ds.features.row(row).to_vec(),
                        s: s.clone(),
                        obs: match ds.task {
                            Task::Regression => Observation::Regression {
                                y_pred: p,
                                y_true: y,
                            },
                            Task::Classification => Observation::Classification {
                                p_pos: p,
                                y_true: y == 1.0,
                            },
                        },
                    }
                })
                .collect())
        })
        .collect::<Result<_, DataError>>()?;

    let columns = subject_columns();
    Ok(PredictionLog {
        meta: LogMetadata {
            dataset: ds.name.clone(),
            task: ds.task,
            d: ds.features.ncols(),
            k: columns.len(),
            seed: Some(seed),
            subject_columns: columns,
            subjects: grid.to_vec(),
        },
        records: per_subject.into_iter().flatten().collect(),
    })
}
