//! Rank correlation and the significance machinery used to compare a proxy
//! assessor against a target assessor.

mod rank;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::seed;
pub use rank::{average_ranks, spearman};
use rank::{rank_correlation, RankPlan};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("need at least {need} observations, got {got}")]
    TooFew { need: usize, got: usize },
    #[error("zero rank variance")]
    DegenerateInput,
    #[error("non-finite input")]
    NonFinite,
    #[error("gave up after {attempts} resample draws")]
    ResampleExhaustion { attempts: usize },
    #[error("invalid bootstrap configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationResult {
    pub rho: f64,
    pub n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceInterval {
    pub lo: f64,
    pub hi: f64,
    pub level: f64,
    pub n_resamples: usize,
}

impl ConfidenceInterval {
    pub fn overlaps(&self, other: &ConfidenceInterval) -> bool {
        !(self.lo > other.hi || self.hi < other.lo)
    }
}

/// What gets resampled with replacement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResampleUnit {
    /// Individual (instance, subject) rows.
    #[default]
    Row,
    /// Whole instances: every row of a drawn instance enters the resample.
    Instance,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BootstrapConfig {
    pub n_resamples: usize,
    pub level: f64,
    pub unit: ResampleUnit,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        BootstrapConfig {
            n_resamples: 1000,
            level: 0.95,
            unit: ResampleUnit::Row,
        }
    }
}

impl BootstrapConfig {
    pub fn validate(&self) -> Result<(), StatsError> {
        if self.n_resamples < 1 {
            return Err(StatsError::InvalidConfig("n_resamples must be positive".into()));
        }
        if !(self.level > 0.0 && self.level < 1.0) {
            return Err(StatsError::InvalidConfig("level must lie in (0, 1)".into()));
        }
        Ok(())
    }
}

/// Minimum sample size accepted by the bootstrap.
pub const MIN_BOOTSTRAP_N: usize = 10;

/// Percentile bootstrap interval for `spearman(pred, truth)`.
pub fn bootstrap_ci(
    pred: &[f64],
    truth: &[f64],
    config: &BootstrapConfig,
    seed: u64,
) -> Result<ConfidenceInterval, StatsError> {
    let mut cis = paired_bootstrap_ci(truth, &[pred], None, config, seed)?;
    Ok(cis.remove(0))
}

/// Percentile bootstrap intervals for several prediction vectors against one
/// truth vector, all evaluated on the same resample indices.
///
/// Resample `i` draws from a generator seeded by `(seed, i, attempt)`, so the
/// result does not depend on how resamples are scheduled. A resample on which
/// any vector has zero rank variance is redrawn; at most
/// `10 · n_resamples` draws are made in total.
///
/// With [`ResampleUnit::Instance`], `groups` gives the instance id of every row.
pub fn paired_bootstrap_ci(
    truth: &[f64],
    preds: &[&[f64]],
    groups: Option<&[u64]>,
    config: &BootstrapConfig,
    seed: u64,
) -> Result<Vec<ConfidenceInterval>, StatsError> {
    config.validate()?;
    let n = truth.len();
    for p in preds {
        if p.len() != n {
            return Err(StatsError::LengthMismatch(p.len(), n));
        }
    }
    if n < MIN_BOOTSTRAP_N {
        return Err(StatsError::TooFew {
            need: MIN_BOOTSTRAP_N,
            got: n,
        });
    }
    if truth.iter().chain(preds.iter().flat_map(|p| p.iter())).any(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    // the full sample itself must be scorable
    for p in preds {
        spearman(p, truth)?;
    }

    let sampler = Sampler::new(n, groups, config.unit)?;
    let truth_plan = RankPlan::new(truth);
    let pred_plans: Vec<RankPlan> = preds.iter().map(|p| RankPlan::new(p)).collect();
    let budget = 10 * config.n_resamples;

    let draws: Vec<(usize, Option<Vec<f64>>)> = (0..config.n_resamples)
        .into_par_iter()
        .map(|i| {
            for attempt in 0..budget {
                let mut rng = seed::rng(seed::derive_seed(seed, &[i as u64, attempt as u64]));
                let counts = sampler.draw(&mut rng);
                let rt = truth_plan.ranks(&counts);
                let rhos: Result<Vec<f64>, _> = pred_plans
                    .iter()
                    .map(|plan| rank_correlation(&plan.ranks(&counts), &rt, &counts).map(|c| c.rho))
                    .collect();
                if let Ok(rhos) = rhos {
                    return (attempt + 1, Some(rhos));
                }
            }
            (budget, None)
        })
        .collect();

    let attempts: usize = draws.iter().map(|d| d.0).sum();
    if attempts > budget || draws.iter().any(|d| d.1.is_none()) {
        return Err(StatsError::ResampleExhaustion { attempts });
    }

    let alpha = 1.0 - config.level;
    Ok((0..preds.len())
        .map(|k| {
            let mut rhos: Vec<f64> = draws.iter().map(|d| d.1.as_ref().unwrap()[k]).collect();
            rhos.sort_by(f64::total_cmp);
            ConfidenceInterval {
                lo: quantile(&rhos, alpha / 2.0).clamp(-1.0, 1.0),
                hi: quantile(&rhos, 1.0 - alpha / 2.0).clamp(-1.0, 1.0),
                level: config.level,
                n_resamples: config.n_resamples,
            }
        })
        .collect())
}

// Linear interpolation between order statistics of a sorted slice.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

enum Sampler {
    Rows(usize),
    Instances {
        // row indices per distinct instance
        members: Vec<Vec<usize>>,
        n: usize,
    },
}

impl Sampler {
    fn new(n: usize, groups: Option<&[u64]>, unit: ResampleUnit) -> Result<Self, StatsError> {
        match unit {
            ResampleUnit::Row => Ok(Sampler::Rows(n)),
            ResampleUnit::Instance => {
                let groups = groups.ok_or_else(|| {
                    StatsError::InvalidConfig("instance resampling needs instance ids".into())
                })?;
                if groups.len() != n {
                    return Err(StatsError::LengthMismatch(groups.len(), n));
                }
                let mut by_id: std::collections::BTreeMap<u64, Vec<usize>> = Default::default();
                for (i, &g) in groups.iter().enumerate() {
                    by_id.entry(g).or_default().push(i);
                }
                Ok(Sampler::Instances {
                    members: by_id.into_values().collect(),
                    n,
                })
            }
        }
    }

    fn draw(&self, rng: &mut impl Rng) -> Vec<u32> {
        match self {
            Sampler::Rows(n) => {
                let mut counts = vec![0u32; *n];
                for _ in 0..*n {
                    counts[rng.random_range(0..*n)] += 1;
                }
                counts
            }
            Sampler::Instances { members, n } => {
                let mut counts = vec![0u32; *n];
                for _ in 0..members.len() {
                    for &row in &members[rng.random_range(0..members.len())] {
                        counts[row] += 1;
                    }
                }
                counts
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Win,
    Tie,
    Loss,
}

impl Outcome {
    pub fn points(self) -> i64 {
        match self {
            Outcome::Win => 1,
            Outcome::Tie => 0,
            Outcome::Loss => -1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub outcome: Outcome,
    /// `ρ_proxy − ρ_target`, or 0 when the intervals overlap.
    pub margin: f64,
}

/// Win when the proxy interval lies strictly above the target interval,
/// Loss when strictly below, Tie otherwise.
pub fn verdict(
    ci_proxy: &ConfidenceInterval,
    ci_target: &ConfidenceInterval,
    rho_proxy: f64,
    rho_target: f64,
) -> Verdict {
    let outcome = if ci_proxy.lo > ci_target.hi {
        Outcome::Win
    } else if ci_proxy.hi < ci_target.lo {
        Outcome::Loss
    } else {
        Outcome::Tie
    };
    let margin = match outcome {
        Outcome::Tie => 0.0,
        _ => rho_proxy - rho_target,
    };
    Verdict { outcome, margin }
}

/// +1 per win, −1 per loss.
pub fn score_of(verdicts: &[Verdict]) -> i64 {
    verdicts.iter().map(|v| v.outcome.points()).sum()
}
