use ndarray::{Array1, Array2};

use super::{DataError, Observation, PredictionLog, PredictionRecord};
use crate::metrics::{
    calibrate_b, eval_loss, eval_score, principal_of, CalibrationB, MetricKind,
};

/// Training data for one assessor: `x ++ s` per row and the metric the
/// subject achieved on that row.
#[derive(Debug, Clone, PartialEq)]
pub struct AssessorTable {
    pub features: Array2<f64>,
    pub targets: Array1<f64>,
    pub metric: MetricKind,
    pub b: Option<CalibrationB>,
}

pub fn build_assessor_table(
    records: &[PredictionRecord],
    metric: MetricKind,
    b: Option<CalibrationB>,
) -> Result<AssessorTable, DataError> {
    let rows: Vec<usize> = (0..records.len()).collect();
    Ok(AssessorTable {
        targets: metric_values(records, &rows, metric, b)?,
        features: assessor_features(records, &rows),
        metric,
        b,
    })
}

/// `x ++ s` for the selected rows. Widths are taken from the first row.
pub fn assessor_features(records: &[PredictionRecord], rows: &[usize]) -> Array2<f64> {
    let width = rows
        .first()
        .map_or(0, |&i| records[i].x.len() + records[i].s.len());
    let mut out = Array2::zeros((rows.len(), width));
    for (mut dst, &i) in out.outer_iter_mut().zip(rows) {
        let r = &records[i];
        for (d, &v) in dst.iter_mut().zip(r.x.iter().chain(&r.s)) {
            *d = v;
        }
    }
    out
}

/// The metric evaluated on the selected rows.
pub fn metric_values(
    records: &[PredictionRecord],
    rows: &[usize],
    metric: MetricKind,
    b: Option<CalibrationB>,
) -> Result<Array1<f64>, DataError> {
    rows.iter()
        .map(|&i| {
            let obs = records[i].obs;
            if obs.task() != metric.task() {
                return Err(DataError::TaskMismatch {
                    expected: metric.task(),
                    found: obs.task(),
                });
            }
            Ok(match obs {
                Observation::Regression { y_pred, y_true } => eval_loss(metric, y_pred, y_true, b)?,
                Observation::Classification { p_pos, y_true } => {
                    eval_score(metric, principal_of(p_pos, y_true)?)?
                }
            })
        })
        .collect()
}

/// `B` from the mean absolute residual over every row of a regression log.
pub fn dataset_calibration(log: &PredictionLog) -> Result<CalibrationB, DataError> {
    let residuals = log.residuals().ok_or(DataError::TaskMismatch {
        expected: crate::metrics::Task::Regression,
        found: log.task(),
    })?;
    Ok(calibrate_b(&residuals)?)
}

/// `B` per subject configuration, in order of first appearance.
pub fn subject_calibrations(log: &PredictionLog) -> Result<Vec<(Vec<f64>, CalibrationB)>, DataError> {
    let mut groups: Vec<(Vec<f64>, Vec<f64>)> = Vec::new();
    for r in &log.records {
        let Observation::Regression { y_pred, y_true } = r.obs else {
            return Err(DataError::TaskMismatch {
                expected: crate::metrics::Task::Regression,
                found: log.task(),
            });
        };
        match groups.iter_mut().find(|g| g.0 == r.s) {
            Some(g) => g.1.push(y_pred - y_true),
            None => groups.push((r.s.clone(), vec![y_pred - y_true])),
        }
    }
    groups
        .into_iter()
        .map(|(s, res)| Ok((s, calibrate_b(&res)?)))
        .collect()
}
