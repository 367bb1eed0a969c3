use ndarray::{Array1, Array2};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::DataError;
use crate::metrics::Task;
use crate::seed;

/// Difficulty profile of a synthetic benchmark.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    /// Right-skewed noise; mostly easy classification.
    Skewed,
    /// Two noise modes; an easy and a hard region for classification.
    Bimodal,
    /// Symmetric noise; weak classification signal, so most instances are
    /// close to the decision boundary.
    Symmetric,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthSpec {
    #[serde(default)]
    pub name: Option<String>,
    pub task: Task,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_d")]
    pub d: usize,
    #[serde(default = "one")]
    pub noise_sd: f64,
    #[serde(default)]
    pub outlier_rate: f64,
    #[serde(default = "one")]
    pub outlier_scale: f64,
    #[serde(default)]
    pub flip_prob: f64,
    #[serde(default = "symmetric")]
    pub shape: Shape,
    pub seed: u64,
}

fn default_n() -> usize {
    1000
}

fn default_d() -> usize {
    5
}

fn one() -> f64 {
    1.0
}

fn symmetric() -> Shape {
    Shape::Symmetric
}

impl SynthSpec {
    pub fn new(task: Task, seed: u64) -> Self {
        SynthSpec {
            name: None,
            task,
            n: default_n(),
            d: default_d(),
            noise_sd: 1.0,
            outlier_rate: 0.0,
            outlier_scale: 1.0,
            flip_prob: 0.0,
            shape: Shape::Symmetric,
            seed,
        }
    }

    /// Regression benchmark with a heavy aleatoric tail: a tenth of the
    /// targets are scaled up fivefold, on top of symmetric noise whose scale
    /// varies strongly with the first feature.
    pub fn outlier_heavy(seed: u64) -> Self {
        SynthSpec {
            name: Some(format!("outlier_heavy_{seed}")),
            n: 3000,
            outlier_rate: 0.1,
            outlier_scale: 5.0,
            shape: Shape::Symmetric,
            ..SynthSpec::new(Task::Regression, seed)
        }
    }

    pub fn validate(&self) -> Result<(), DataError> {
        let bad = |m: &str| Err(DataError::InvalidSpec(m.into()));
        if self.n < 2 {
            return bad("n must be at least 2");
        }
        if self.d < 1 {
            return bad("d must be at least 1");
        }
        if !(self.noise_sd >= 0.0 && self.noise_sd.is_finite()) {
            return bad("noise_sd must be finite and non-negative");
        }
        if !(0.0..=1.0).contains(&self.outlier_rate) {
            return bad("outlier_rate must lie in [0, 1]");
        }
        if !(self.outlier_scale >= 1.0 && self.outlier_scale.is_finite()) {
            return bad("outlier_scale must be finite and at least 1");
        }
        if !(0.0..=1.0).contains(&self.flip_prob) {
            return bad("flip_prob must lie in [0, 1]");
        }
        Ok(())
    }

    pub fn display_name(&self) -> String {
        self.name.clone().unwrap_or_else(|| {
            format!("synth_{}_{}", self.task, self.seed)
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub task: Task,
    pub features: Array2<f64>,
    /// Real targets for regression, 0/1 labels for classification.
    pub targets: Array1<f64>,
    /// Rows whose target was scaled (regression) or label flipped
    /// (classification).
    pub corrupted: Vec<bool>,
}

impl Dataset {
    pub fn n_corrupted(&self) -> usize {
        self.corrupted.iter().filter(|&&c| c).count()
    }
}

// Independent streams so that, e.g., changing noise_sd leaves features and
// the outlier mask untouched.
const FEATURES: u64 = 1;
const NOISE: u64 = 2;
const CORRUPTION: u64 = 3;

pub fn synth_dataset(spec: &SynthSpec) -> Result<Dataset, DataError> {
    spec.validate()?;
    let mut feat_rng = seed::rng(seed::derive_seed(spec.seed, &[FEATURES]));
    let mut noise_rng = seed::rng(seed::derive_seed(spec.seed, &[NOISE]));
    let mut corrupt_rng = seed::rng(seed::derive_seed(spec.seed, &[CORRUPTION]));

    let features = Array2::from_shape_simple_fn((spec.n, spec.d), || {
        feat_rng.sample::<f64, _>(StandardNormal)
    });
    let mut targets = Array1::zeros(spec.n);
    let mut corrupted = vec![false; spec.n];
    for (i, row) in features.outer_iter().enumerate() {
        let x = row.as_slice().expect("standard layout");
        let flip = corrupt_rng.random_bool(match spec.task {
            Task::Regression => spec.outlier_rate,
            Task::Classification => spec.flip_prob,
        });
        corrupted[i] = flip;
        targets[i] = match spec.task {
            Task::Regression => {
                let eps = regression_noise(spec.shape, &mut noise_rng);
                let y = regression_signal(x) + spec.noise_sd * heteroscedastic(x) * eps;
                if flip {
                    y * spec.outlier_scale
                } else {
                    y
                }
            }
            Task::Classification => {
                let u = noise_rng.random::<f64>().max(f64::MIN_POSITIVE);
                // standard logistic draw: thresholding w·x plus this noise is a logistic link
                let eps = (u / (1.0 - u)).ln();
                let z = difficulty(spec.shape, x) * linear_signal(x) + spec.noise_sd * eps;
                f64::from(u8::from((z > 0.0) != flip))
            }
        };
    }
    Ok(Dataset {
        name: spec.display_name(),
        task: spec.task,
        features,
        targets,
        corrupted,
    })
}

fn regression_signal(x: &[f64]) -> f64 {
    let mut f = 2.0 * x[0].sin();
    if let Some(&x1) = x.get(1) {
        f += 0.5 * x1 * x1;
    }
    if let Some(&x2) = x.get(2) {
        f += 0.5 * x[0] * x2;
    }
    for (j, &v) in x.iter().enumerate().skip(3) {
        f += if j % 2 == 0 { 0.5 } else { -0.5 } * v;
    }
    f
}

// Noise scale spans e^±2 over typical inputs.
fn heteroscedastic(x: &[f64]) -> f64 {
    x[0].exp()
}

fn regression_noise(shape: Shape, rng: &mut impl Rng) -> f64 {
    let z: f64 = rng.sample(StandardNormal);
    match shape {
        Shape::Symmetric => z,
        // centred lognormal
        Shape::Skewed => (0.75 * z).exp() - (0.75f64 * 0.75 / 2.0).exp(),
        Shape::Bimodal => {
            let side = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            side + 0.4 * z
        }
    }
}

fn linear_signal(x: &[f64]) -> f64 {
    x.iter()
        .enumerate()
        .map(|(j, &v)| v / (j as f64 + 1.0))
        .sum()
}

// Positive, so the sign of the noiseless latent (and thus separability) does
// not depend on the shape.
fn difficulty(shape: Shape, x: &[f64]) -> f64 {
    match shape {
        Shape::Skewed => 3.0,
        Shape::Symmetric => 0.25,
        Shape::Bimodal => {
            if x[0] > 0.0 {
                3.0
            } else {
                0.2
            }
        }
    }
}
