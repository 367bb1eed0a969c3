use serde::{Deserialize, Serialize};

use super::{CellOutputs, ExperimentError};
use crate::dataio::{metric_values, Observation, PredictionLog};
use crate::metrics::{principal_of, CalibrationB, MetricKind};

/// Mean-reversion diagnostic for a signed proxy predicting an unsigned
/// target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnderestimationSummary {
    pub target: MetricKind,
    pub proxy: MetricKind,
    pub mean_truth: f64,
    /// mean(transformed proxy predictions) − mean(truth)
    pub proxy_gap: f64,
    /// mean(direct target predictions) − mean(truth)
    pub target_gap: f64,
    /// Gaps within deciles of the true target, lowest decile first.
    pub decile_proxy_gaps: Vec<f64>,
    pub decile_target_gaps: Vec<f64>,
}

fn mean(v: impl ExactSizeIterator<Item = f64>) -> f64 {
    let n = v.len() as f64;
    v.sum::<f64>() / n
}

pub fn underestimation_summary(out: &CellOutputs) -> Result<UnderestimationSummary, ExperimentError> {
    let (target, proxy) = (out.result.target, out.result.proxy);
    if !target.is_unsigned() || target.signed_counterpart() != Some(proxy) {
        return Err(ExperimentError::MetricMismatch { target, proxy });
    }
    let n = out.truth.len();
    if n == 0 {
        return Err(crate::stats::StatsError::TooFew { need: 1, got: 0 }.into());
    }
    let gap = |pred: &[f64], rows: &[usize]| {
        mean(rows.iter().map(|&i| pred[i])) - mean(rows.iter().map(|&i| out.truth[i]))
    };
    let all: Vec<usize> = (0..n).collect();
    let mut order = all.clone();
    order.sort_by(|&a, &b| out.truth[a].total_cmp(&out.truth[b]).then(a.cmp(&b)));
    let deciles: Vec<&[usize]> = (0..10)
        .map(|q| &order[q * n / 10..(q + 1) * n / 10])
        .filter(|s| !s.is_empty())
        .collect();
    Ok(UnderestimationSummary {
        target,
        proxy,
        mean_truth: mean(out.truth.iter().copied()),
        proxy_gap: gap(&out.proxy_pred, &all),
        target_gap: gap(&out.target_pred, &all),
        decile_proxy_gaps: deciles.iter().map(|d| gap(&out.proxy_pred, d)).collect(),
        decile_target_gaps: deciles.iter().map(|d| gap(&out.target_pred, d)).collect(),
    })
}

pub const HISTOGRAM_BINS: usize = 64;

/// Equal-width bins over the observed range. A constant input puts every
/// value in the first bin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub name: String,
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<u64>,
}

impl Histogram {
    pub fn new(name: impl Into<String>, values: &[f64]) -> Histogram {
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut counts = vec![0; HISTOGRAM_BINS];
        let width = hi - lo;
        for &v in values {
            let bin = if width > 0.0 {
                (((v - lo) / width) * HISTOGRAM_BINS as f64) as usize
            } else {
                0
            };
            counts[bin.min(HISTOGRAM_BINS - 1)] += 1;
        }
        Histogram {
            name: name.into(),
            lo,
            hi,
            counts,
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn edges(&self) -> Vec<f64> {
        let w = (self.hi - self.lo) / HISTOGRAM_BINS as f64;
        (0..=HISTOGRAM_BINS).map(|i| self.lo + w * i as f64).collect()
    }

    /// Centre of the fullest bin (lowest on ties).
    pub fn mode(&self) -> f64 {
        let best = self
            .counts
            .iter()
            .enumerate()
            .fold(0, |b, (i, &c)| if c > self.counts[b] { i } else { b });
        let w = (self.hi - self.lo) / HISTOGRAM_BINS as f64;
        self.lo + w * (best as f64 + 0.5)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionReport {
    pub dataset: String,
    pub rows: usize,
    pub histograms: Vec<Histogram>,
}

/// Histograms of residuals and each loss (regression) or of principals and
/// each score (classification).
pub fn distribution_report(
    log: &PredictionLog,
    metrics: &[MetricKind],
    b: Option<CalibrationB>,
) -> Result<DistributionReport, ExperimentError> {
    if log.is_empty() {
        return Err(ExperimentError::InvalidConfig(format!("log {} has no rows", log.meta.dataset)));
    }
    let base: Vec<f64> = log
        .records
        .iter()
        .map(|r| match r.obs {
            Observation::Regression { y_pred, y_true } => Ok(y_pred - y_true),
            Observation::Classification { p_pos, y_true } => Ok(principal_of(p_pos, y_true)?.value()),
        })
        .collect::<Result<_, ExperimentError>>()?;
    let base_name = match log.task() {
        crate::metrics::Task::Regression => "residual",
        crate::metrics::Task::Classification => "principal",
    };
    let rows: Vec<usize> = (0..log.len()).collect();
    let mut histograms = vec![Histogram::new(base_name, &base)];
    for &m in metrics {
        let v = metric_values(&log.records, &rows, m, b)?;
        histograms.push(Histogram::new(m.name(), v.as_slice().expect("contiguous")));
    }
    Ok(DistributionReport {
        dataset: log.meta.dataset.clone(),
        rows: log.len(),
        histograms,
    })
}
