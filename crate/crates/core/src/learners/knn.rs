use ndarray::{Array1, Array2, ArrayView1, ArrayView2};

/// Brute-force Euclidean nearest neighbours. Distance ties go to the lower
/// training index.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Knn {
    x: Array2<f64>,
    y: Array1<f64>,
    k: usize,
}

impl Knn {
    pub fn fit(x: ArrayView2<f64>, y: ArrayView1<f64>, k: usize) -> Knn {
        Knn {
            x: x.to_owned(),
            y: y.to_owned(),
            k: k.min(x.nrows()),
        }
    }

    fn neighbour_targets(&self, row: ArrayView1<f64>) -> impl Iterator<Item = f64> + '_ {
        let mut dist: Vec<(f64, usize)> = self
            .x
            .rows()
            .into_iter()
            .enumerate()
            .map(|(i, t)| {
                let d: f64 = t.iter().zip(row.iter()).map(|(a, b)| (a - b).powi(2)).sum();
                (d, i)
            })
            .collect();
        let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        if self.k < dist.len() {
            dist.select_nth_unstable_by(self.k - 1, cmp);
            dist.truncate(self.k);
        }
        dist.sort_by(cmp);
        dist.into_iter().map(|(_, i)| self.y[i])
    }

    /// Mean target of the k nearest rows.
    pub fn predict_mean(&self, row: ArrayView1<f64>) -> f64 {
        self.neighbour_targets(row).sum::<f64>() / self.k as f64
    }

    /// Laplace-smoothed positive fraction among the k nearest rows.
    pub fn predict_proba(&self, row: ArrayView1<f64>) -> f64 {
        let pos: f64 = self.neighbour_targets(row).sum();
        (pos + 1.0) / (self.k as f64 + 2.0)
    }
}
