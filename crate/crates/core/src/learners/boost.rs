use ndarray::{ArrayView1, ArrayView2};
use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::tree::{Criterion, Presorted, Tree, TreeParams};

/// Stagewise least-squares boosting of regression trees.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Boosted {
    base: f64,
    learning_rate: f64,
    trees: Vec<Tree>,
}

pub(crate) struct BoostParams {
    pub n_rounds: usize,
    pub learning_rate: f64,
    pub max_depth: usize,
    pub min_leaf: usize,
    pub subsample: f64,
    pub seed: u64,
}

impl Boosted {
    pub fn fit(x: ArrayView2<f64>, y: ArrayView1<f64>, p: &BoostParams) -> Boosted {
        let n = y.len();
        let base = y.sum() / n as f64;
        let presorted = Presorted::new(x);
        let tree_params = TreeParams {
            max_depth: p.max_depth,
            min_leaf: p.min_leaf,
            criterion: Criterion::Variance,
        };
        let mut pred = vec![base; n];
        let mut residual = vec![0.0; n];
        let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
        let sample_size = ((p.subsample * n as f64).round() as usize).clamp(1, n);
        let mut trees = Vec::with_capacity(p.n_rounds);

        for _ in 0..p.n_rounds {
            for i in 0..n {
                residual[i] = y[i] - pred[i];
            }
            let keep = (sample_size < n).then(|| {
                let mut mask = vec![false; n];
                for i in index::sample(&mut rng, n, sample_size) {
                    mask[i] = true;
                }
                mask
            });
            let tree = Tree::fit(x, &residual, &presorted, keep.as_deref(), tree_params);
            for (i, row) in x.rows().into_iter().enumerate() {
                pred[i] += p.learning_rate * tree.predict_row(row);
            }
            trees.push(tree);
        }
        Boosted {
            base,
            learning_rate: p.learning_rate,
            trees,
        }
    }

    pub fn predict_row(&self, row: ArrayView1<f64>) -> f64 {
        let mut v = self.base;
        for t in &self.trees {
            v += self.learning_rate * t.predict_row(row);
        }
        v
    }
}
