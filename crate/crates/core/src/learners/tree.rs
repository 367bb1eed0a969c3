use ndarray::{ArrayView1, ArrayView2};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Criterion {
    /// Variance reduction, leaves predict the mean.
    Variance,
    /// Gini impurity on 0/1 targets, leaves predict `(count + 1) / (total + 2)`.
    Gini,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct TreeParams {
    pub max_depth: usize,
    pub min_leaf: usize,
    pub criterion: Criterion,
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Leaf(f64),
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

/// Row indices sorted by each feature column, computed once per fit.
pub(crate) struct Presorted {
    per_feature: Vec<Vec<u32>>,
}

impl Presorted {
    pub fn new(x: ArrayView2<f64>) -> Self {
        let n = x.nrows();
        let per_feature = x
            .columns()
            .into_iter()
            .map(|col| {
                let mut idx: Vec<u32> = (0..n as u32).collect();
                idx.sort_by(|&a, &b| col[a as usize].total_cmp(&col[b as usize]));
                idx
            })
            .collect();
        Presorted { per_feature }
    }

    /// Per-feature sorted lists restricted to rows with `keep[row]`.
    fn restricted(&self, keep: Option<&[bool]>) -> Vec<Vec<u32>> {
        match keep {
            None => self.per_feature.clone(),
            Some(keep) => self
                .per_feature
                .iter()
                .map(|l| l.iter().copied().filter(|&r| keep[r as usize]).collect())
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Tree {
    nodes: Vec<Node>,
}

struct Builder<'a> {
    x: ArrayView2<'a, f64>,
    y: &'a [f64],
    params: TreeParams,
    nodes: Vec<Node>,
    goes_left: Vec<bool>,
}

struct BestSplit {
    gain: f64,
    feature: usize,
    threshold: f64,
    left_len: usize,
}

impl Tree {
    /// Fits on the rows flagged in `keep` (all rows when `None`).
    pub fn fit(
        x: ArrayView2<f64>,
        y: &[f64],
        presorted: &Presorted,
        keep: Option<&[bool]>,
        params: TreeParams,
    ) -> Tree {
        let mut b = Builder {
            x,
            y,
            params,
            nodes: Vec::new(),
            goes_left: vec![false; x.nrows()],
        };
        let lists = presorted.restricted(keep);
        if x.ncols() == 0 {
            let rows: Vec<u32> = match keep {
                None => (0..x.nrows() as u32).collect(),
                Some(k) => (0..x.nrows() as u32).filter(|&r| k[r as usize]).collect(),
            };
            let v = b.leaf_value(&rows);
            b.nodes.push(Node::Leaf(v));
        } else {
            b.build(lists, 0);
        }
        Tree { nodes: b.nodes }
    }

    pub fn predict_row(&self, row: ArrayView1<f64>) -> f64 {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Leaf(v) => return v,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => i = if row[feature] <= threshold { left } else { right },
            }
        }
    }

    #[cfg(test)]
    pub fn n_leaves(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, Node::Leaf(_)))
            .count()
    }
}

impl Builder<'_> {
    fn leaf_value(&self, rows: &[u32]) -> f64 {
        let n = rows.len() as f64;
        let sum: f64 = rows.iter().map(|&r| self.y[r as usize]).sum();
        match self.params.criterion {
            Criterion::Variance => {
                if rows.is_empty() {
                    0.0
                } else {
                    sum / n
                }
            }
            Criterion::Gini => (sum + 1.0) / (n + 2.0),
        }
    }

    // Node index of the subtree built from `lists` (one sorted list per feature).
    fn build(&mut self, lists: Vec<Vec<u32>>, depth: usize) -> usize {
        let id = self.nodes.len();
        let value = self.leaf_value(&lists[0]);
        self.nodes.push(Node::Leaf(value));

        let n = lists[0].len();
        if depth >= self.params.max_depth || n < 2 * self.params.min_leaf.max(1) {
            return id;
        }
        let Some(best) = self.best_split(&lists) else {
            return id;
        };

        for &r in &lists[best.feature][..best.left_len] {
            self.goes_left[r as usize] = true;
        }
        let (left_lists, right_lists): (Vec<_>, Vec<_>) = lists
            .into_iter()
            .map(|l| l.into_iter().partition(|&r| self.goes_left[r as usize]))
            .unzip();
        for &r in &left_lists[0] {
            self.goes_left[r as usize] = false;
        }

        let left = self.build(left_lists, depth + 1);
        let right = self.build(right_lists, depth + 1);
        self.nodes[id] = Node::Split {
            feature: best.feature,
            threshold: best.threshold,
            left,
            right,
        };
        id
    }

    fn best_split(&self, lists: &[Vec<u32>]) -> Option<BestSplit> {
        let rows = &lists[0];
        let n = rows.len();
        let min_leaf = self.params.min_leaf.max(1);
        let total: f64 = rows.iter().map(|&r| self.y[r as usize]).sum();
        let parent = self.impurity(total, n as f64, rows);
        if parent <= 0.0 {
            return None;
        }

        let mut best: Option<BestSplit> = None;
        for (feature, list) in lists.iter().enumerate() {
            let col = self.x.column(feature);
            let mut left_sum = 0.0;
            for i in 1..n {
                left_sum += self.y[list[i - 1] as usize];
                if i < min_leaf || n - i < min_leaf {
                    continue;
                }
                let (a, b) = (col[list[i - 1] as usize], col[list[i] as usize]);
                if a == b {
                    continue;
                }
                let gain = self.gain(parent, total, n, left_sum, i);
                if best.as_ref().is_none_or(|s| gain > s.gain) {
                    let mut threshold = a + (b - a) / 2.0;
                    if threshold >= b {
                        threshold = a;
                    }
                    best = Some(BestSplit {
                        gain,
                        feature,
                        threshold,
                        left_len: i,
                    });
                }
            }
        }
        best.filter(|s| s.gain > 1e-12 * parent)
    }

    fn impurity(&self, sum: f64, n: f64, rows: &[u32]) -> f64 {
        match self.params.criterion {
            Criterion::Variance => {
                let mean = sum / n;
                rows.iter()
                    .map(|&r| (self.y[r as usize] - mean).powi(2))
                    .sum()
            }
            Criterion::Gini => 2.0 * sum * (n - sum) / n,
        }
    }

    fn gain(&self, parent: f64, total: f64, n: usize, left_sum: f64, left_n: usize) -> f64 {
        let (nl, nr) = (left_n as f64, (n - left_n) as f64);
        let right_sum = total - left_sum;
        match self.params.criterion {
            // SSE drop = Σ_L²/n_L + Σ_R²/n_R − Σ²/n
            Criterion::Variance => {
                left_sum * left_sum / nl + right_sum * right_sum / nr - total * total / n as f64
            }
            Criterion::Gini => {
                let gl = 2.0 * left_sum * (nl - left_sum) / nl;
                let gr = 2.0 * right_sum * (nr - right_sum) / nr;
                parent - gl - gr
            }
        }
    }
}
