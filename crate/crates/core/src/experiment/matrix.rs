use std::collections::HashMap;

use ndarray::Array1;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{assessor_seed, CellResult, ExperimentError, Prepared};
use crate::dataio::PredictionLog;
use crate::learners::LearnerSpec;
use crate::metrics::{MetricKind, Task, TransformSpec};
use crate::seed::{derive_seed, hash_str};
use crate::stats::BootstrapConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixConfig {
    pub assessors: Vec<LearnerSpec>,
    /// Row axis. Defaults to every metric of the task.
    pub targets: Vec<MetricKind>,
    /// Column axis. Defaults to every metric of the task.
    pub proxies: Vec<MetricKind>,
    pub train_fraction: f64,
    pub bootstrap: BootstrapConfig,
    pub seed: u64,
}

impl MatrixConfig {
    pub fn new(task: Task, assessors: Vec<LearnerSpec>, seed: u64) -> Self {
        MatrixConfig {
            assessors,
            targets: MetricKind::all_for(task).to_vec(),
            proxies: MetricKind::all_for(task).to_vec(),
            train_fraction: 0.7,
            bootstrap: BootstrapConfig::default(),
            seed,
        }
    }

    fn validate(&self, task: Task) -> Result<(), ExperimentError> {
        let bad = |m: String| Err(ExperimentError::InvalidConfig(m));
        if self.assessors.is_empty() {
            return bad("no assessor families".into());
        }
        if self.targets.is_empty() || self.proxies.is_empty() {
            return bad("empty metric axis".into());
        }
        for m in self.targets.iter().chain(&self.proxies) {
            if m.task() != task {
                return bad(format!("metric {} does not apply to {task} logs", m.name()));
            }
        }
        let mut labels: Vec<&str> = self.assessors.iter().map(|a| a.family.name()).collect();
        labels.sort_unstable();
        if labels.windows(2).any(|w| w[0] == w[1]) {
            return bad("assessor families must be distinct".into());
        }
        for a in &self.assessors {
            if a.family.task() != Task::Regression {
                return bad(format!("assessor family {} cannot regress metric values", a.family));
            }
            a.validate()?;
        }
        self.bootstrap.validate()?;
        Ok(())
    }
}

/// A targets × proxies grid; `None` marks not-applicable cells.
pub type Grid<T> = Vec<Vec<Option<T>>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyGrid {
    pub family: String,
    /// Sum of verdict points over datasets.
    pub score: Grid<i64>,
    /// Mean verdict margin over datasets.
    pub margin: Grid<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixReport {
    pub task: Task,
    pub targets: Vec<MetricKind>,
    pub proxies: Vec<MetricKind>,
    pub datasets: Vec<String>,
    pub families: Vec<FamilyGrid>,
    /// Mean over families of score / dataset count, in [−1, 1].
    pub aggregate_score: Grid<f64>,
    /// Mean over families of the margin grids.
    pub aggregate_margin: Grid<f64>,
    pub cells: Vec<CellResult>,
}

impl MatrixReport {
    pub fn is_applicable(&self, row: usize, col: usize) -> bool {
        TransformSpec::exists(self.proxies[col], self.targets[row])
    }

    pub fn cell(&self, dataset: &str, family: &str, target: MetricKind, proxy: MetricKind) -> Option<&CellResult> {
        self.cells.iter().find(|c| {
            c.dataset == dataset && c.family == family && c.target == target && c.proxy == proxy
        })
    }
}

fn dataset_key(index: usize, log: &PredictionLog) -> [u64; 2] {
    [index as u64, hash_str(&log.meta.dataset)]
}

/// Seed of the assessor-level split of the `index`-th log of a matrix run.
pub fn split_seed(seed: u64, index: usize, log: &PredictionLog) -> u64 {
    derive_seed(seed, &[hash_str("split"), index as u64, hash_str(&log.meta.dataset)])
}

/// Base seed of one assessor family on the `index`-th log; see [`assessor_seed`].
pub fn family_seed(seed: u64, index: usize, log: &PredictionLog, family: &str) -> u64 {
    let key = dataset_key(index, log);
    derive_seed(seed, &[key[0], key[1], hash_str(family)])
}

/// Runs every applicable (target, proxy) cell for every log and assessor
/// family.
///
/// All cells of one log share one assessor-level split. Each (log, family,
/// metric) assessor is trained once and reused by every cell that needs it.
/// Results do not depend on the rayon schedule.
pub fn run_matrix(logs: &[PredictionLog], config: &MatrixConfig) -> Result<MatrixReport, ExperimentError> {
    let Some(first) = logs.first() else {
        return Err(ExperimentError::InvalidConfig("no datasets".into()));
    };
    let task = first.task();
    if let Some(l) = logs.iter().find(|l| l.task() != task) {
        return Err(ExperimentError::InvalidConfig(format!(
            "mixed tasks: {} is {}, {} is {task}",
            l.meta.dataset,
            l.task(),
            first.meta.dataset
        )));
    }
    config.validate(task)?;
    let applicable: Vec<(MetricKind, MetricKind)> = config
        .targets
        .iter()
        .flat_map(|&t| config.proxies.iter().map(move |&p| (t, p)))
        .filter(|&(t, p)| TransformSpec::exists(p, t))
        .collect();
    let mut used: Vec<MetricKind> = applicable.iter().flat_map(|&(t, p)| [t, p]).collect();
    used.sort_unstable_by_key(|m| MetricKind::all_for(task).iter().position(|x| x == m));
    used.dedup();
    let needs_b = used.iter().any(|m| m.is_logistic());

    let prepared: Vec<Prepared> = logs
        .par_iter()
        .enumerate()
        .map(|(i, log)| {
            Prepared::new(log, config.train_fraction, split_seed(config.seed, i, log), needs_b)
        })
        .collect::<Result<_, _>>()?;

    let n_fam = config.assessors.len();
    let mut fits = Vec::new();
    let mut jobs = Vec::new();
    for d in 0..logs.len() {
        for f in 0..n_fam {
            fits.extend(used.iter().map(|&m| (d, f, m)));
            jobs.extend(applicable.iter().map(|&(t, p)| (d, f, t, p)));
        }
    }
    let predictions: HashMap<(usize, usize, MetricKind), Array1<f64>> = fits
        .par_iter()
        .map(|&(d, f, m)| {
            let base = &config.assessors[f];
            let family_base = family_seed(config.seed, d, &logs[d], base.family.name());
            let spec = base.seed(assessor_seed(family_base, m));
            let pred = prepared[d].fit_predict(&logs[d], &spec, m)?;
            Ok(((d, f, m), pred))
        })
        .collect::<Result<_, ExperimentError>>()?;

    let cells: Vec<CellResult> = jobs
        .par_iter()
        .map(|&(d, f, t, p)| {
            let family = config.assessors[f].family.name();
            let key = dataset_key(d, &logs[d]);
            let seed = derive_seed(
                config.seed,
                &[key[0], key[1], hash_str(family), hash_str(t.name()), hash_str(p.name())],
            );
            prepared[d]
                .evaluate(
                    &logs[d],
                    family,
                    t,
                    p,
                    &predictions[&(d, f, t)],
                    &predictions[&(d, f, p)],
                    &config.bootstrap,
                    seed,
                )
                .map(|o| o.result)
                .map_err(|e| ExperimentError::Cell {
                    target: t,
                    proxy: p,
                    source: Box::new(e),
                })
        })
        .collect::<Result<_, _>>()?;

    Ok(assemble(task, logs, config, cells))
}

fn assemble(task: Task, logs: &[PredictionLog], config: &MatrixConfig, cells: Vec<CellResult>) -> MatrixReport {
    let (rows, cols) = (config.targets.len(), config.proxies.len());
    let n_data = logs.len() as f64;
    let na = |r: usize, c: usize| !TransformSpec::exists(config.proxies[c], config.targets[r]);
    let families: Vec<FamilyGrid> = config
        .assessors
        .iter()
        .map(|a| {
            let name = a.family.name();
            let mut score = vec![vec![None; cols]; rows];
            let mut margin = vec![vec![None; cols]; rows];
            for r in 0..rows {
                for c in 0..cols {
                    if na(r, c) {
                        continue;
                    }
                    let here: Vec<&CellResult> = cells
                        .iter()
                        .filter(|x| x.family == name && x.target == config.targets[r] && x.proxy == config.proxies[c])
                        .collect();
                    score[r][c] = Some(here.iter().map(|x| x.verdict.outcome.points()).sum());
                    margin[r][c] = Some(here.iter().map(|x| x.verdict.margin).sum::<f64>() / n_data);
                }
            }
            FamilyGrid {
                family: name.to_string(),
                score,
                margin,
            }
        })
        .collect();
    let n_fam = families.len() as f64;
    let mean_over = |pick: &dyn Fn(&FamilyGrid, usize, usize) -> f64| -> Grid<f64> {
        (0..rows)
            .map(|r| {
                (0..cols)
                    .map(|c| (!na(r, c)).then(|| families.iter().map(|g| pick(g, r, c)).sum::<f64>() / n_fam))
                    .collect()
            })
            .collect()
    };
    let aggregate_score = mean_over(&|g, r, c| g.score[r][c].unwrap() as f64 / n_data);
    let aggregate_margin = mean_over(&|g, r, c| g.margin[r][c].unwrap());
    MatrixReport {
        task,
        targets: config.targets.clone(),
        proxies: config.proxies.clone(),
        datasets: logs.iter().map(|l| l.meta.dataset.clone()).collect(),
        families,
        aggregate_score,
        aggregate_margin,
        cells,
    }
}
