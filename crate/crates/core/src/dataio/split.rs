use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::DataError;
use crate::seed;

/// A partition of instance ids. Every row of an id falls on one side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupedSplit {
    pub train_ids: BTreeSet<u64>,
    pub test_ids: BTreeSet<u64>,
    pub fraction: f64,
}

impl GroupedSplit {
    pub fn is_train(&self, id: u64) -> bool {
        self.train_ids.contains(&id)
    }

    /// Ids present on both sides; always empty for a split built by
    /// [`grouped_split`].
    pub fn overlap(&self) -> usize {
        self.train_ids.intersection(&self.test_ids).count()
    }

    /// Row indices of `ids` on the (train, test) sides.
    pub fn partition_rows(&self, ids: &[u64]) -> (Vec<usize>, Vec<usize>) {
        (0..ids.len()).partition(|&i| self.is_train(ids[i]))
    }
}

/// Shuffles the distinct ids and puts the first `round(fraction · n)` in train.
/// Duplicates in `ids` are ignored.
pub fn grouped_split(ids: &[u64], fraction: f64, seed: u64) -> Result<GroupedSplit, DataError> {
    let mut unique: Vec<u64> = ids.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    let n = unique.len();
    let n_train = (fraction * n as f64).round();
    if !(fraction > 0.0 && fraction < 1.0) || n < 2 || n_train < 1.0 || n_train >= n as f64 {
        return Err(DataError::DegenerateSplit { ids: n, fraction });
    }
    unique.shuffle(&mut seed::rng(seed));
    let test = unique.split_off(n_train as usize);
    Ok(GroupedSplit {
        train_ids: unique.into_iter().collect(),
        test_ids: test.into_iter().collect(),
        fraction,
    })
}
