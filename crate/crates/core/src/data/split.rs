use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::Rng;

pub const DEFAULT_TRAIN_ROWS: usize = 400;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitSpec {
    pub n_train: usize,
    pub seed: u64,
    pub shuffle: bool,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            n_train: DEFAULT_TRAIN_ROWS,
            seed: 0,
            shuffle: true,
        }
    }
}

/// Train and test row indices for `t` rows.
///
/// With `shuffle` the rows are permuted by a Fisher–Yates shuffle driven by
/// the seeded generator and the first `n_train` entries of the permutation
/// form the training set; otherwise the split follows file order.
pub fn split_indices(t: usize, spec: &SplitSpec) -> Result<(Vec<usize>, Vec<usize>)> {
    if spec.n_train == 0 || spec.n_train >= t {
        return Err(Error::InvalidArgument(format!(
            "n_train must satisfy 0 < n_train < {t}, got {}",
            spec.n_train
        )));
    }
    let order = if spec.shuffle {
        Rng::seed_from_u64(spec.seed).permutation(t)
    } else {
        (0..t).collect()
    };
    let (train, test) = order.split_at(spec.n_train);
    Ok((train.to_vec(), test.to_vec()))
}
