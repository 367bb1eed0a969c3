//! Native supervised learners.
//!
//! The same learners play two roles: base subjects whose per-instance
//! predictions are logged, and assessors that regress a metric value from
//! instance features concatenated with the subject encoding.

mod boost;
mod knn;
mod linear;
mod tree;

use std::fmt;

use ndarray::{Array1, ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metrics::Task;
use boost::{BoostParams, Boosted};
use knn::Knn;
use linear::{predict_all, Logistic, Ridge};
use tree::{Criterion, Presorted, Tree, TreeParams};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LearnerError {
    #[error("feature width mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("no training rows")]
    EmptyData,
    #[error("invalid hyperparameter: {0}")]
    InvalidHyperparameter(String),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("classification targets must be 0 or 1, found {0}")]
    InvalidLabel(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    RegressionTree,
    RidgeLinear,
    KnnRegressor,
    GradientBoostedTrees,
    LogisticLinear,
    ClassificationTree,
    KnnClassifier,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::RegressionTree,
        Family::RidgeLinear,
        Family::KnnRegressor,
        Family::GradientBoostedTrees,
        Family::LogisticLinear,
        Family::ClassificationTree,
        Family::KnnClassifier,
    ];

    /// Task of the targets this family is fitted on.
    pub fn task(self) -> Task {
        match self {
            Family::LogisticLinear | Family::ClassificationTree | Family::KnnClassifier => {
                Task::Classification
            }
            _ => Task::Regression,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::RegressionTree => "regression_tree",
            Family::RidgeLinear => "ridge_linear",
            Family::KnnRegressor => "knn_regressor",
            Family::GradientBoostedTrees => "gradient_boosted_trees",
            Family::LogisticLinear => "logistic_linear",
            Family::ClassificationTree => "classification_tree",
            Family::KnnClassifier => "knn_classifier",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Hyperparameters {
    pub max_depth: usize,
    pub min_leaf: usize,
    pub lambda: f64,
    pub k: usize,
    pub n_rounds: usize,
    pub learning_rate: f64,
    /// Row fraction drawn per boosting round.
    pub subsample: f64,
}

impl Default for Hyperparameters {
    fn default() -> Self {
        Hyperparameters {
            max_depth: 4,
            min_leaf: 1,
            lambda: 1.0,
            k: 5,
            n_rounds: 50,
            learning_rate: 0.1,
            subsample: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LearnerSpec {
    pub family: Family,
    #[serde(default)]
    pub params: Hyperparameters,
    #[serde(default)]
    pub seed: u64,
}

impl LearnerSpec {
    pub fn new(family: Family) -> Self {
        LearnerSpec {
            family,
            params: Hyperparameters::default(),
            seed: 0,
        }
    }

    pub fn max_depth(mut self, v: usize) -> Self {
        self.params.max_depth = v;
        self
    }

    pub fn min_leaf(mut self, v: usize) -> Self {
        self.params.min_leaf = v;
        self
    }

    pub fn lambda(mut self, v: f64) -> Self {
        self.params.lambda = v;
        self
    }

    pub fn k(mut self, v: usize) -> Self {
        self.params.k = v;
        self
    }

    pub fn n_rounds(mut self, v: usize) -> Self {
        self.params.n_rounds = v;
        self
    }

    pub fn learning_rate(mut self, v: f64) -> Self {
        self.params.learning_rate = v;
        self
    }

    pub fn subsample(mut self, v: f64) -> Self {
        self.params.subsample = v;
        self
    }

    pub fn seed(mut self, v: u64) -> Self {
        self.seed = v;
        self
    }

    pub fn validate(&self) -> Result<(), LearnerError> {
        let p = &self.params;
        let bad = |m: &str| Err(LearnerError::InvalidHyperparameter(m.to_string()));
        if p.min_leaf < 1 {
            return bad("min_leaf must be at least 1");
        }
        if !(p.lambda >= 0.0 && p.lambda.is_finite()) {
            return bad("lambda must be finite and non-negative");
        }
        if p.k < 1 {
            return bad("k must be at least 1");
        }
        if p.n_rounds < 1 {
            return bad("n_rounds must be at least 1");
        }
        if !(p.learning_rate > 0.0 && p.learning_rate <= 1.0) {
            return bad("learning_rate must lie in (0, 1]");
        }
        if !(p.subsample > 0.0 && p.subsample <= 1.0) {
            return bad("subsample must lie in (0, 1]");
        }
        Ok(())
    }

    /// Short human-readable identifier.
    pub fn label(&self) -> String {
        let p = &self.params;
        match self.family {
            Family::RegressionTree | Family::ClassificationTree => {
                format!("{}_d{}_m{}", self.family, p.max_depth, p.min_leaf)
            }
            Family::GradientBoostedTrees => format!(
                "{}_d{}_r{}_lr{}",
                self.family, p.max_depth, p.n_rounds, p.learning_rate
            ),
            Family::RidgeLinear | Family::LogisticLinear => {
                format!("{}_l{}", self.family, p.lambda)
            }
            Family::KnnRegressor | Family::KnnClassifier => format!("{}_k{}", self.family, p.k),
        }
    }
}

/// Numeric encoding of a subject configuration: family one-hot followed by
/// every hyperparameter in declaration order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SubjectVector(pub Vec<f64>);

pub const SUBJECT_WIDTH: usize = Family::ALL.len() + 7;

/// Column names matching [`subject_vector`] output.
pub fn subject_columns() -> Vec<String> {
    Family::ALL
        .iter()
        .map(|f| format!("is_{f}"))
        .chain(
            [
                "max_depth",
                "min_leaf",
                "lambda",
                "k",
                "n_rounds",
                "learning_rate",
                "subsample",
            ]
            .map(String::from),
        )
        .collect()
}

pub fn subject_vector(spec: &LearnerSpec) -> SubjectVector {
    let mut v: Vec<f64> = Family::ALL
        .iter()
        .map(|&f| if f == spec.family { 1.0 } else { 0.0 })
        .collect();
    let p = &spec.params;
    v.extend([
        p.max_depth as f64,
        p.min_leaf as f64,
        p.lambda,
        p.k as f64,
        p.n_rounds as f64,
        p.learning_rate,
        p.subsample,
    ]);
    SubjectVector(v)
}

#[derive(Debug, Clone, PartialEq)]
enum Model {
    Tree(Tree),
    Boosted(Boosted),
    Ridge(Ridge),
    Logistic(Logistic),
    Knn(Knn),
}

/// A trained learner. Immutable; prediction is deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct FittedModel {
    spec: LearnerSpec,
    dim: usize,
    model: Model,
}

pub fn fit(
    spec: &LearnerSpec,
    features: ArrayView2<f64>,
    targets: ArrayView1<f64>,
) -> Result<FittedModel, LearnerError> {
    spec.validate()?;
    let (n, dim) = features.dim();
    if n == 0 {
        return Err(LearnerError::EmptyData);
    }
    if targets.len() != n {
        return Err(LearnerError::DimensionMismatch {
            expected: n,
            got: targets.len(),
        });
    }
    if features.iter().any(|v| !v.is_finite()) {
        return Err(LearnerError::NonFinite("features"));
    }
    if targets.iter().any(|v| !v.is_finite()) {
        return Err(LearnerError::NonFinite("targets"));
    }
    if spec.family.task() == Task::Classification {
        if let Some(&bad) = targets.iter().find(|&&t| t != 0.0 && t != 1.0) {
            return Err(LearnerError::InvalidLabel(bad));
        }
    }

    let p = &spec.params;
    let model = match spec.family {
        Family::RegressionTree | Family::ClassificationTree => {
            let criterion = if spec.family == Family::RegressionTree {
                Criterion::Variance
            } else {
                Criterion::Gini
            };
            let y: Vec<f64> = targets.to_vec();
            Model::Tree(Tree::fit(
                features,
                &y,
                &Presorted::new(features),
                None,
                TreeParams {
                    max_depth: p.max_depth,
                    min_leaf: p.min_leaf,
                    criterion,
                },
            ))
        }
        Family::GradientBoostedTrees => Model::Boosted(Boosted::fit(
            features,
            targets,
            &BoostParams {
                n_rounds: p.n_rounds,
                learning_rate: p.learning_rate,
                max_depth: p.max_depth,
                min_leaf: p.min_leaf,
                subsample: p.subsample,
                seed: spec.seed,
            },
        )),
        Family::RidgeLinear => Model::Ridge(Ridge::fit(features, targets, p.lambda)),
        Family::LogisticLinear => Model::Logistic(Logistic::fit(features, targets, p.lambda)),
        Family::KnnRegressor | Family::KnnClassifier => {
            Model::Knn(Knn::fit(features, targets, p.k))
        }
    };
    Ok(FittedModel {
        spec: *spec,
        dim,
        model,
    })
}

impl FittedModel {
    pub fn spec(&self) -> &LearnerSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Real predictions for regression families, class-1 probabilities for
    /// classification families.
    pub fn predict(&self, features: ArrayView2<f64>) -> Result<Array1<f64>, LearnerError> {
        if features.ncols() != self.dim {
            return Err(LearnerError::DimensionMismatch {
                expected: self.dim,
                got: features.ncols(),
            });
        }
        Ok(match &self.model {
            Model::Tree(t) => predict_all(features, |r| t.predict_row(r)),
            Model::Boosted(b) => predict_all(features, |r| b.predict_row(r)),
            Model::Ridge(m) => predict_all(features, |r| m.predict_row(r)),
            Model::Logistic(m) => predict_all(features, |r| m.predict_row(r)),
            Model::Knn(m) if self.spec.family == Family::KnnClassifier => {
                predict_all(features, |r| m.predict_proba(r))
            }
            Model::Knn(m) => predict_all(features, |r| m.predict_mean(r)),
        })
    }

    /// Intercept and slopes in raw feature units, for ridge models.
    pub fn linear_coefficients(&self) -> Option<(f64, Vec<f64>)> {
        match &self.model {
            Model::Ridge(m) => Some(m.coefficients()),
            _ => None,
        }
    }
}

/// Base-subject grid for regression datasets: trees and boosted trees over
/// depth × rounds × learning rate, plus two kNN regressors (26 configs).
pub fn default_regression_grid() -> Vec<LearnerSpec> {
    let mut grid = Vec::new();
    for family in [Family::RegressionTree, Family::GradientBoostedTrees] {
        for depth in [2, 4, 6] {
            for rounds in [20, 50] {
                for lr in [0.1, 0.3] {
                    grid.push(
                        LearnerSpec::new(family)
                            .max_depth(depth)
                            .n_rounds(rounds)
                            .learning_rate(lr),
                    );
                }
            }
        }
    }
    for k in [3, 10] {
        grid.push(LearnerSpec::new(Family::KnnRegressor).k(k));
    }
    grid
}

/// Base-subject grid for classification datasets (26 configs).
pub fn default_classification_grid() -> Vec<LearnerSpec> {
    let mut grid = Vec::new();
    for depth in [2, 3, 4, 6, 8] {
        for min_leaf in [1, 10, 40] {
            grid.push(
                LearnerSpec::new(Family::ClassificationTree)
                    .max_depth(depth)
                    .min_leaf(min_leaf),
            );
        }
    }
    for k in [3, 5, 10, 25, 50] {
        grid.push(LearnerSpec::new(Family::KnnClassifier).k(k));
    }
    for lambda in [0.001, 0.01, 0.1, 1.0, 10.0, 100.0] {
        grid.push(LearnerSpec::new(Family::LogisticLinear).lambda(lambda));
    }
    grid
}

pub fn default_grid(task: Task) -> Vec<LearnerSpec> {
    match task {
        Task::Regression => default_regression_grid(),
        Task::Classification => default_classification_grid(),
    }
}

/// Assessor families, with hyperparameters held fixed across every cell.
pub fn default_assessors() -> Vec<LearnerSpec> {
    vec![
        LearnerSpec::new(Family::GradientBoostedTrees)
            .max_depth(4)
            .min_leaf(10)
            .n_rounds(100)
            .learning_rate(0.1),
        LearnerSpec::new(Family::RidgeLinear).lambda(1.0),
    ]
}
