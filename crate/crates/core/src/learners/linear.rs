use nalgebra::{DMatrix, DVector};
use ndarray::{Array1, ArrayView1, ArrayView2};

const SVD_EPS: f64 = 1e-12;
const LOGISTIC_MAX_ITER: usize = 100;
const LOGISTIC_MAX_STEP: f64 = 10.0;

/// Column centring and scaling. Constant columns keep scale 1.
#[derive(Debug, Clone, PartialEq)]
struct Standardizer {
    mean: Vec<f64>,
    scale: Vec<f64>,
}

impl Standardizer {
    fn fit(x: ArrayView2<f64>) -> Self {
        let n = x.nrows() as f64;
        let (mut mean, mut scale) = (Vec::new(), Vec::new());
        for col in x.columns() {
            let m = col.sum() / n;
            let var = col.iter().map(|v| (v - m).powi(2)).sum::<f64>() / n;
            mean.push(m);
            scale.push(if var > 0.0 { var.sqrt() } else { 1.0 });
        }
        Standardizer { mean, scale }
    }

    fn apply(&self, x: ArrayView2<f64>) -> DMatrix<f64> {
        DMatrix::from_fn(x.nrows(), x.ncols(), |i, j| {
            (x[[i, j]] - self.mean[j]) / self.scale[j]
        })
    }
}

/// Ridge regression on standardised features with an unpenalised intercept.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Ridge {
    std: Standardizer,
    intercept: f64,
    weights: Vec<f64>,
}

impl Ridge {
    pub fn fit(x: ArrayView2<f64>, y: ArrayView1<f64>, lambda: f64) -> Ridge {
        let std = Standardizer::fit(x);
        let z = std.apply(x);
        let y_mean = y.sum() / y.len() as f64;
        let yc = DVector::from_iterator(y.len(), y.iter().map(|v| v - y_mean));

        let mut gram = z.tr_mul(&z);
        for j in 0..gram.ncols() {
            gram[(j, j)] += lambda;
        }
        let rhs = z.tr_mul(&yc);
        let w = gram
            .svd(true, true)
            .solve(&rhs, SVD_EPS)
            .expect("SVD computed with both factors");
        Ridge {
            std,
            intercept: y_mean,
            weights: w.iter().copied().collect(),
        }
    }

    pub fn predict_row(&self, row: ArrayView1<f64>) -> f64 {
        self.intercept
            + row
                .iter()
                .zip(&self.weights)
                .enumerate()
                .map(|(j, (v, w))| w * (v - self.std.mean[j]) / self.std.scale[j])
                .sum::<f64>()
    }

    /// Intercept and slopes in raw feature units.
    pub fn coefficients(&self) -> (f64, Vec<f64>) {
        let slopes: Vec<f64> = self
            .weights
            .iter()
            .zip(&self.std.scale)
            .map(|(w, s)| w / s)
            .collect();
        let shift: f64 = slopes.iter().zip(&self.std.mean).map(|(b, m)| b * m).sum();
        (self.intercept - shift, slopes)
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// L2-penalised logistic regression fitted by damped Newton iterations.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Logistic {
    std: Standardizer,
    intercept: f64,
    weights: Vec<f64>,
}

impl Logistic {
    pub fn fit(x: ArrayView2<f64>, y: ArrayView1<f64>, lambda: f64) -> Logistic {
        let std = Standardizer::fit(x);
        let z = std.apply(x);
        let (n, d) = (z.nrows(), z.ncols());
        // column 0 is the intercept
        let design = DMatrix::from_fn(n, d + 1, |i, j| if j == 0 { 1.0 } else { z[(i, j - 1)] });
        let mut w = DVector::<f64>::zeros(d + 1);

        for _ in 0..LOGISTIC_MAX_ITER {
            let eta = &design * &w;
            let p: Vec<f64> = eta.iter().map(|&v| sigmoid(v)).collect();
            let mut grad = DVector::from_fn(d + 1, |j, _| {
                (0..n).map(|i| design[(i, j)] * (y[i] - p[i])).sum::<f64>()
            });
            let mut hess = DMatrix::from_fn(d + 1, d + 1, |a, b| {
                (0..n)
                    .map(|i| design[(i, a)] * design[(i, b)] * p[i] * (1.0 - p[i]))
                    .sum::<f64>()
            });
            for j in 1..=d {
                grad[j] -= lambda * w[j];
                hess[(j, j)] += lambda;
            }
            for j in 0..=d {
                hess[(j, j)] += 1e-10;
            }
            let step = hess
                .svd(true, true)
                .solve(&grad, SVD_EPS)
                .expect("SVD computed with both factors");
            let size = step.amax();
            if !size.is_finite() {
                break;
            }
            let scale = if size > LOGISTIC_MAX_STEP {
                LOGISTIC_MAX_STEP / size
            } else {
                1.0
            };
            w += step * scale;
            if size < 1e-10 {
                break;
            }
        }

        Logistic {
            std,
            intercept: w[0],
            weights: w.iter().skip(1).copied().collect(),
        }
    }

    pub fn predict_row(&self, row: ArrayView1<f64>) -> f64 {
        let eta = self.intercept
            + row
                .iter()
                .zip(&self.weights)
                .enumerate()
                .map(|(j, (v, w))| w * (v - self.std.mean[j]) / self.std.scale[j])
                .sum::<f64>();
        sigmoid(eta)
    }
}

pub(crate) fn predict_all(
    x: ArrayView2<f64>,
    f: impl Fn(ArrayView1<f64>) -> f64,
) -> Array1<f64> {
    x.rows().into_iter().map(f).collect()
}
