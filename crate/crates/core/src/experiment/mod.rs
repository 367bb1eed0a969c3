//! Target-versus-proxy assessor comparisons.
//!
//! A cell trains one assessor directly on the target metric and one on the
//! proxy metric, maps the proxy assessor's output onto the target scale, and
//! compares the two by Spearman correlation with the true target values on
//! held-out instances.

mod diagnostics;
mod matrix;

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataio::{
    assessor_features, dataset_calibration, grouped_split, metric_values, DataError,
    PredictionLog,
};
use crate::learners::{self, LearnerError, LearnerSpec};
use crate::metrics::{CalibrationB, MetricError, MetricKind, Task, TransformSpec};
use crate::stats::{
    paired_bootstrap_ci, spearman, verdict, BootstrapConfig, ConfidenceInterval,
    CorrelationResult, StatsError, Verdict,
};

pub use diagnostics::{
    distribution_report, underestimation_summary, DistributionReport, Histogram,
    UnderestimationSummary, HISTOGRAM_BINS,
};
pub use matrix::{family_seed, run_matrix, split_seed, FamilyGrid, Grid, MatrixConfig, MatrixReport};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Learner(#[from] LearnerError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("invalid experiment configuration: {0}")]
    InvalidConfig(String),
    #[error("{proxy} is not the signed counterpart of unsigned target {target}")]
    MetricMismatch { target: MetricKind, proxy: MetricKind },
    #[error("cell {target} <- {proxy} failed: {source}")]
    Cell {
        target: MetricKind,
        proxy: MetricKind,
        #[source]
        source: Box<ExperimentError>,
    },
}

/// One target-versus-proxy comparison on one dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSpec {
    pub dataset: String,
    /// Assessor learner. Its `seed` is the base from which the per-metric
    /// assessor seeds are derived.
    pub assessor: LearnerSpec,
    pub target: MetricKind,
    pub proxy: MetricKind,
    pub split_seed: u64,
    pub train_fraction: f64,
    pub bootstrap: BootstrapConfig,
    pub bootstrap_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub dataset: String,
    pub family: String,
    pub target: MetricKind,
    pub proxy: MetricKind,
    pub rho_target: CorrelationResult,
    pub rho_proxy: CorrelationResult,
    pub ci_target: ConfidenceInterval,
    pub ci_proxy: ConfidenceInterval,
    pub verdict: Verdict,
    pub n_train_rows: usize,
    pub n_test_rows: usize,
    /// Test-row instance ids that also occur among training rows.
    pub contaminated_ids: usize,
}

/// A cell's result plus the per-row vectors it was computed from.
#[derive(Debug, Clone, PartialEq)]
pub struct CellOutputs {
    pub result: CellResult,
    pub test_x_ids: Vec<u64>,
    /// True target metric on test rows.
    pub truth: Vec<f64>,
    pub target_pred: Vec<f64>,
    /// Proxy assessor output on the proxy scale.
    pub proxy_raw: Vec<f64>,
    /// Proxy assessor output mapped onto the target scale.
    pub proxy_pred: Vec<f64>,
}

/// Train/test partition of one log at the assessor level, shared by every
/// cell of that log.
pub(crate) struct Prepared {
    pub train_rows: Vec<usize>,
    pub test_rows: Vec<usize>,
    pub x_train: Array2<f64>,
    pub x_test: Array2<f64>,
    pub test_x_ids: Vec<u64>,
    pub contaminated_ids: usize,
    pub b: Option<CalibrationB>,
}

impl Prepared {
    pub fn new(
        log: &PredictionLog,
        fraction: f64,
        split_seed: u64,
        needs_b: bool,
    ) -> Result<Self, ExperimentError> {
        let ids = log.x_ids();
        let split = grouped_split(&ids, fraction, split_seed)?;
        let (train_rows, test_rows) = split.partition_rows(&ids);
        let train_ids: std::collections::HashSet<u64> =
            train_rows.iter().map(|&i| ids[i]).collect();
        let test_x_ids: Vec<u64> = test_rows.iter().map(|&i| ids[i]).collect();
        let contaminated_ids = test_x_ids
            .iter()
            .filter(|id| train_ids.contains(id))
            .collect::<std::collections::HashSet<_>>()
            .len();
        let b = if needs_b && log.task() == Task::Regression {
            Some(dataset_calibration(log)?)
        } else {
            None
        };
        Ok(Prepared {
            x_train: assessor_features(&log.records, &train_rows),
            x_test: assessor_features(&log.records, &test_rows),
            train_rows,
            test_rows,
            test_x_ids,
            contaminated_ids,
            b,
        })
    }

    /// Fits `assessor` on `metric` over the training rows and predicts the
    /// test rows.
    pub fn fit_predict(
        &self,
        log: &PredictionLog,
        assessor: &LearnerSpec,
        metric: MetricKind,
    ) -> Result<Array1<f64>, ExperimentError> {
        let y = metric_values(&log.records, &self.train_rows, metric, self.b)?;
        let model = learners::fit(assessor, self.x_train.view(), y.view())?;
        Ok(model.predict(self.x_test.view())?)
    }

    #[allow(clippy::too_many_arguments)]
    pub fn evaluate(
        &self,
        log: &PredictionLog,
        family: &str,
        target: MetricKind,
        proxy: MetricKind,
        target_pred: &Array1<f64>,
        proxy_raw: &Array1<f64>,
        bootstrap: &BootstrapConfig,
        bootstrap_seed: u64,
    ) -> Result<CellOutputs, ExperimentError> {
        let truth = metric_values(&log.records, &self.test_rows, target, self.b)?.to_vec();
        let map = TransformSpec::new(proxy, target, self.b)?;
        let proxy_pred = proxy_raw
            .iter()
            .map(|&v| map.apply(v))
            .collect::<Result<Vec<f64>, _>>()?;
        let target_pred = target_pred.to_vec();
        let rho_target = spearman(&target_pred, &truth)?;
        let rho_proxy = spearman(&proxy_pred, &truth)?;
        let cis = paired_bootstrap_ci(
            &truth,
            &[&target_pred, &proxy_pred],
            Some(&self.test_x_ids),
            bootstrap,
            bootstrap_seed,
        )?;
        let (ci_target, ci_proxy) = (cis[0], cis[1]);
        Ok(CellOutputs {
            result: CellResult {
                dataset: log.meta.dataset.clone(),
                family: family.to_string(),
                target,
                proxy,
                rho_target,
                rho_proxy,
                ci_target,
                ci_proxy,
                verdict: verdict(&ci_proxy, &ci_target, rho_proxy.rho, rho_target.rho),
                n_train_rows: self.train_rows.len(),
                n_test_rows: self.test_rows.len(),
                contaminated_ids: self.contaminated_ids,
            },
            test_x_ids: self.test_x_ids.clone(),
            truth,
            target_pred,
            proxy_raw: proxy_raw.to_vec(),
            proxy_pred,
        })
    }
}

/// Seed of the assessor trained on `metric`. Depends only on the base seed
/// and the metric, so a target assessor and an identical proxy assessor are
/// the same model.
pub fn assessor_seed(base: u64, metric: MetricKind) -> u64 {
    crate::seed::derive_seed(base, &[crate::seed::hash_str(metric.name())])
}

fn check_pair(task: Task, target: MetricKind, proxy: MetricKind) -> Result<(), ExperimentError> {
    for m in [target, proxy] {
        if m.task() != task {
            return Err(MetricError::WrongTask { kind: m, expected: task }.into());
        }
    }
    if !TransformSpec::exists(proxy, target) {
        return Err(MetricError::IncompatiblePair { from: proxy, to: target }.into());
    }
    Ok(())
}

/// Runs the full target-versus-proxy protocol for one cell.
pub fn run_cell(spec: &CellSpec, log: &PredictionLog) -> Result<CellOutputs, ExperimentError> {
    check_pair(log.task(), spec.target, spec.proxy)?;
    if spec.assessor.family.task() != Task::Regression {
        return Err(ExperimentError::InvalidConfig(format!(
            "assessor family {} does not regress real-valued metrics",
            spec.assessor.family
        )));
    }
    let needs_b = spec.target.is_logistic() || spec.proxy.is_logistic();
    let prep = Prepared::new(log, spec.train_fraction, spec.split_seed, needs_b)?;
    let fit = |m: MetricKind| {
        let a = spec.assessor.seed(assessor_seed(spec.assessor.seed, m));
        prep.fit_predict(log, &a, m)
    };
    let target_pred = fit(spec.target)?;
    let proxy_raw = if spec.proxy == spec.target {
        target_pred.clone()
    } else {
        fit(spec.proxy)?
    };
    prep.evaluate(
        log,
        spec.assessor.family.name(),
        spec.target,
        spec.proxy,
        &target_pred,
        &proxy_raw,
        &spec.bootstrap,
        spec.bootstrap_seed,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataio::{generate_logs, synth_dataset, SynthSpec};
    use crate::learners::{default_assessors, default_grid, Family};
    use crate::stats::Outcome;

    fn log(task: Task) -> PredictionLog {
        let ds = synth_dataset(&SynthSpec { n: 200, ..SynthSpec::new(task, 3) }).unwrap();
        generate_logs(&[ds], &default_grid(task)[..6], 0.3, 3).unwrap().remove(0)
    }

    fn cell(target: MetricKind, proxy: MetricKind) -> CellSpec {
        CellSpec {
            dataset: "t".into(),
            assessor: default_assessors()[0].seed(17),
            target,
            proxy,
            split_seed: 5,
            train_fraction: 0.7,
            bootstrap: BootstrapConfig { n_resamples: 200, ..Default::default() },
            bootstrap_seed: 6,
        }
    }

    #[test]
    fn self_cell_ties_with_zero_margin() {
        let l = log(Task::Regression);
        for m in MetricKind::REGRESSION {
            let out = run_cell(&cell(m, m), &l).unwrap();
            assert_eq!(out.target_pred, out.proxy_pred);
            assert_eq!(out.result.verdict.outcome, Outcome::Tie);
            assert_eq!(out.result.verdict.margin, 0.0);
        }
    }

    #[test]
    fn monotone_transform_preserves_rho_exactly() {
        let l = log(Task::Classification);
        let out = run_cell(&cell(MetricKind::QuadScore, MetricKind::LogScore), &l).unwrap();
        let raw = spearman(&out.proxy_raw, &out.truth).unwrap();
        assert_eq!(out.result.rho_proxy, raw);
    }

    #[test]
    fn split_is_clean_and_grouped() {
        let l = log(Task::Regression);
        let out = run_cell(&cell(MetricKind::SimpleUnsigned, MetricKind::SimpleSigned), &l).unwrap();
        assert_eq!(out.result.contaminated_ids, 0);
        // 60 logged instances × 6 subjects, 18 instances held out
        assert_eq!(out.result.n_test_rows, 18 * 6);
        assert_eq!(out.result.n_train_rows, 42 * 6);
    }

    #[test]
    fn invalid_cells_are_rejected() {
        let l = log(Task::Regression);
        assert!(run_cell(&cell(MetricKind::SimpleSigned, MetricKind::SimpleUnsigned), &l).is_err());
        assert!(run_cell(&cell(MetricKind::LogScore, MetricKind::LogScore), &l).is_err());
        let mut c = cell(MetricKind::SimpleSigned, MetricKind::SimpleSigned);
        c.assessor = LearnerSpec::new(Family::KnnClassifier);
        assert!(matches!(run_cell(&c, &l), Err(ExperimentError::InvalidConfig(_))));
    }
}
