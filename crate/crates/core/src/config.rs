//! JSON run configuration shared by the CLI subcommands.
//!
//! ```json
//! {
//!   "task": "regression",
//!   "seed": 42,
//!   "datasets": [
//!     { "synth": { "n": 1000, "d": 5, "outlier_rate": 0.1, "outlier_scale": 5 } },
//!     { "log": "logs/exported.csv" }
//!   ],
//!   "grid": "default",
//!   "assessors": "default",
//!   "targets": ["L_S", "simple_unsigned"],
//!   "proxies": ["squared_signed"],
//!   "holdout": 0.3,
//!   "train_fraction": 0.7,
//!   "bootstrap": { "n_resamples": 1000, "level": 0.95, "unit": "row" },
//!   "output_dir": "out"
//! }
//! ```
//!
//! Only `task`, `seed` and `datasets` are required, and `seed` may come from
//! `--seed` instead. Synthetic entries take their task from the config and,
//! unless given, a seed derived from the global seed. Log paths are relative
//! to the config file.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::dataio::SynthSpec;
use crate::learners::{default_assessors, default_grid, LearnerSpec};
use crate::metrics::{MetricKind, Task};
use crate::seed::{derive_seed, hash_str};
use crate::stats::BootstrapConfig;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("config is missing required field `{0}`")]
    Missing(&'static str),
    #[error("unsupported metric name `{0}`")]
    UnknownMetric(String),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DatasetSource {
    Synth(SynthSpec),
    Log(PathBuf),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    task: Option<Task>,
    seed: Option<u64>,
    #[serde(default)]
    datasets: Vec<Value>,
    /// `"default"` or a list of learner specs.
    grid: Option<Value>,
    assessors: Option<Value>,
    targets: Option<Vec<String>>,
    proxies: Option<Vec<String>>,
    holdout: Option<f64>,
    train_fraction: Option<f64>,
    bootstrap: Option<BootstrapConfig>,
    output_dir: Option<PathBuf>,
}

/// A validated configuration with every default filled in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub task: Task,
    pub seed: u64,
    pub datasets: Vec<DatasetSource>,
    pub grid: Vec<LearnerSpec>,
    pub assessors: Vec<LearnerSpec>,
    pub targets: Vec<MetricKind>,
    pub proxies: Vec<MetricKind>,
    pub holdout: f64,
    pub train_fraction: f64,
    pub bootstrap: BootstrapConfig,
    pub output_dir: Option<PathBuf>,
}

fn metrics(names: Option<Vec<String>>, task: Task) -> Result<Vec<MetricKind>, ConfigError> {
    let Some(names) = names else {
        return Ok(MetricKind::all_for(task).to_vec());
    };
    let mut out = Vec::new();
    for n in names {
        let m: MetricKind = n.parse().map_err(|_| ConfigError::UnknownMetric(n.clone()))?;
        if m.task() != task {
            return Err(ConfigError::Invalid(format!("metric `{n}` does not apply to {task}")));
        }
        if !out.contains(&m) {
            out.push(m);
        }
    }
    if out.is_empty() {
        return Err(ConfigError::Invalid("empty metric list".into()));
    }
    Ok(out)
}

fn specs(list: Option<Value>, default: Vec<LearnerSpec>, what: &str) -> Result<Vec<LearnerSpec>, ConfigError> {
    match list {
        None => Ok(default),
        Some(Value::String(p)) if p == "default" => Ok(default),
        Some(Value::String(p)) => Err(ConfigError::Invalid(format!("unknown {what} preset `{p}`"))),
        Some(v) => {
            let v: Vec<LearnerSpec> = serde_json::from_value(v)
                .map_err(|e| ConfigError::Invalid(format!("{what}: {e}")))?;
            if v.is_empty() {
                return Err(ConfigError::Invalid(format!("empty {what}")));
            }
            Ok(v)
        }
    }
}

fn fraction(v: Option<f64>, default: f64, name: &str) -> Result<f64, ConfigError> {
    let f = v.unwrap_or(default);
    if f > 0.0 && f < 1.0 {
        Ok(f)
    } else {
        Err(ConfigError::Invalid(format!("{name} must lie in (0, 1), got {f}")))
    }
}

impl RunConfig {
    pub fn load(path: &Path, seed_override: Option<u64>) -> Result<RunConfig, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        RunConfig::from_json(&text, base, seed_override)
    }

    /// Parses and validates; relative log paths are resolved against `base`.
    pub fn from_json(text: &str, base: &Path, seed_override: Option<u64>) -> Result<RunConfig, ConfigError> {
        let raw: RawConfig = serde_json::from_str(text)?;
        let task = raw.task.ok_or(ConfigError::Missing("task"))?;
        let seed = seed_override.or(raw.seed).ok_or(ConfigError::Missing("seed"))?;
        if raw.datasets.is_empty() {
            return Err(ConfigError::Missing("datasets"));
        }
        let datasets = raw
            .datasets
            .into_iter()
            .enumerate()
            .map(|(i, v)| dataset(v, i, task, seed, base))
            .collect::<Result<Vec<_>, _>>()?;
        let grid = specs(raw.grid, default_grid(task), "grid")?;
        let assessors = specs(raw.assessors, default_assessors(), "assessors")?;
        for s in &grid {
            s.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
            if s.family.task() != task {
                return Err(ConfigError::Invalid(format!("subject family {} does not fit {task} data", s.family)));
            }
        }
        let bootstrap = raw.bootstrap.unwrap_or_default();
        bootstrap.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        Ok(RunConfig {
            task,
            seed,
            datasets,
            grid,
            assessors,
            targets: metrics(raw.targets, task)?,
            proxies: metrics(raw.proxies, task)?,
            holdout: fraction(raw.holdout, 0.3, "holdout")?,
            train_fraction: fraction(raw.train_fraction, 0.7, "train_fraction")?,
            bootstrap,
            output_dir: raw.output_dir,
        })
    }

    /// Target and proxy metrics, deduplicated, in canonical order.
    pub fn metric_set(&self) -> Vec<MetricKind> {
        MetricKind::all_for(self.task)
            .iter()
            .copied()
            .filter(|m| self.targets.contains(m) || self.proxies.contains(m))
            .collect()
    }
}

fn dataset(mut v: Value, index: usize, task: Task, seed: u64, base: &Path) -> Result<DatasetSource, ConfigError> {
    if let Some(synth) = v.get_mut("synth").and_then(Value::as_object_mut) {
        match synth.get("task") {
            None => {
                synth.insert("task".into(), serde_json::to_value(task)?);
            }
            Some(t) if *t != serde_json::to_value(task)? => {
                return Err(ConfigError::Invalid(format!("dataset {index} declares task {t}, config has {task}")));
            }
            Some(_) => {}
        }
        synth
            .entry("seed")
            .or_insert_with(|| derive_seed(seed, &[hash_str("dataset"), index as u64]).into());
    }
    let src: DatasetSource = serde_json::from_value(v)?;
    match src {
        DatasetSource::Synth(s) => {
            s.validate().map_err(|e| ConfigError::Invalid(format!("dataset {index}: {e}")))?;
            Ok(DatasetSource::Synth(s))
        }
        DatasetSource::Log(p) => {
            let p = if p.is_relative() { base.join(p) } else { p };
            if !p.is_file() {
                return Err(ConfigError::Invalid(format!("log {} does not exist", p.display())));
            }
            Ok(DatasetSource::Log(p))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<RunConfig, ConfigError> {
        RunConfig::from_json(text, Path::new("."), None)
    }

    #[test]
    fn minimal_config_fills_defaults() {
        let c = parse(r#"{"task":"regression","seed":7,"datasets":[{"synth":{"n":50,"d":2}}]}"#).unwrap();
        assert_eq!(c.grid.len(), 26);
        assert_eq!(c.assessors, default_assessors());
        assert_eq!(c.targets, MetricKind::REGRESSION.to_vec());
        assert_eq!((c.holdout, c.train_fraction), (0.3, 0.7));
        let DatasetSource::Synth(s) = &c.datasets[0] else { panic!() };
        assert_eq!(s.task, Task::Regression);
        assert_eq!(s.seed, derive_seed(7, &[hash_str("dataset"), 0]));
    }

    #[test]
    fn seed_is_mandatory_unless_overridden() {
        let text = r#"{"task":"classification","datasets":[{"synth":{"n":50,"d":2}}]}"#;
        let err = parse(text).unwrap_err();
        assert!(err.to_string().contains("seed"));
        let c = RunConfig::from_json(text, Path::new("."), Some(3)).unwrap();
        assert_eq!(c.seed, 3);
        let c = RunConfig::from_json(&text.replace("\"datasets\"", "\"seed\":1,\"datasets\""), Path::new("."), Some(3)).unwrap();
        assert_eq!(c.seed, 3);
    }

    #[test]
    fn metric_filters_accept_names_and_symbols() {
        let c = parse(r#"{"task":"regression","seed":1,"datasets":[{"synth":{"n":50,"d":2}}],"targets":["L_S","simple_signed"],"proxies":["L_L^±"]}"#).unwrap();
        assert_eq!(c.targets, vec![MetricKind::SquaredUnsigned, MetricKind::SimpleSigned]);
        assert_eq!(c.proxies, vec![MetricKind::LogisticSigned]);
        assert_eq!(
            c.metric_set(),
            vec![MetricKind::SimpleSigned, MetricKind::LogisticSigned, MetricKind::SquaredUnsigned]
        );
        let err = parse(r#"{"task":"regression","seed":1,"datasets":[{"synth":{"n":50,"d":2}}],"targets":["huber"]}"#).unwrap_err();
        assert!(matches!(err, ConfigError::UnknownMetric(ref m) if m == "huber"));
    }

    #[test]
    fn invalid_configs() {
        for bad in [
            r#"{"task":"regression","seed":1,"datasets":[]}"#,
            r#"{"task":"regression","seed":1,"datasets":[{"synth":{"n":50,"d":2,"task":"classification"}}]}"#,
            r#"{"task":"regression","seed":1,"datasets":[{"log":"/nonexistent/x.csv"}]}"#,
            r#"{"task":"regression","seed":1,"datasets":[{"synth":{"n":50,"d":2}}],"holdout":1.5}"#,
            r#"{"task":"regression","seed":1,"datasets":[{"synth":{"n":50,"d":2}}],"grid":"huge"}"#,
            r#"{"task":"regression","seed":1,"datasets":[{"synth":{"n":50,"d":2}}],"typo":1}"#,
            r#"{"task":"regression","seed":1,"datasets":[{"synth":{"n":50,"d":2}}],"targets":["log_score"]}"#,
            r#"{"task":"regression","seed":1,"datasets":[{"synth":{"n":50,"d":2}}],"grid":[{"family":"knn_classifier"}]}"#,
        ] {
            assert!(parse(bad).is_err(), "{bad}");
        }
    }
}
