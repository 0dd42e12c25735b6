use std::io::Write;

use serde::{Deserialize, Serialize};

use super::encode::{EncodedTable, Target, FEATURE_COLUMNS};
use super::scaler::{apply_scaler, fit_scaler, ScalerParams};
use super::split::{split_indices, SplitSpec};
use crate::error::Result;
use crate::format::fmt_sig;
use crate::numerics::Mat;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetScaler {
    pub features: ScalerParams,
    pub targets: ScalerParams,
}

/// Scaled inputs and outputs, every entry in `[0, 1]`.
///
/// Immutable once built; all views borrow it.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub features: Mat<f64>,
    pub targets: Mat<f64>,
    pub scaler: DatasetScaler,
    pub row_ids: Vec<usize>,
}

impl Dataset {
    /// Fits the scaler on `fit_rows` (indices into `encoded`) only and scales
    /// every row with it.
    pub fn from_encoded(encoded: &EncodedTable, fit_rows: &[usize]) -> Result<Self> {
        let scaler = DatasetScaler {
            features: fit_scaler(&encoded.features.select_rows(fit_rows))?,
            targets: fit_scaler(&encoded.targets.select_rows(fit_rows))?,
        };
        Ok(Self {
            features: apply_scaler(&encoded.features, &scaler.features)?,
            targets: apply_scaler(&encoded.targets, &scaler.targets)?,
            scaler,
            row_ids: encoded.row_ids.clone(),
        })
    }

    pub fn len(&self) -> usize {
        self.row_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.row_ids.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.features.cols()
    }

    pub fn view(&self, indices: Vec<usize>) -> DatasetView<'_> {
        debug_assert!(indices.iter().all(|&i| i < self.len()));
        DatasetView {
            dataset: self,
            indices,
        }
    }

    /// Writes the scaled table as CSV with 9 significant digits, for diffing
    /// against other implementations.
    pub fn write_canonical_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let mut header = vec!["row_id".to_string()];
        header.extend(FEATURE_COLUMNS.iter().map(|c| c.to_string()));
        header.extend(Target::ALL.iter().map(|t| t.column().to_string()));
        writeln!(out, "{}", header.join(","))?;
        for (i, &id) in self.row_ids.iter().enumerate() {
            let mut fields = vec![id.to_string()];
            fields.extend(self.features.row(i).iter().map(|&v| fmt_sig(v, 9)));
            fields.extend(self.targets.row(i).iter().map(|&v| fmt_sig(v, 9)));
            writeln!(out, "{}", fields.join(","))?;
        }
        Ok(())
    }
}

/// Ordered subset of a dataset's rows.
#[derive(Clone, Debug)]
pub struct DatasetView<'a> {
    dataset: &'a Dataset,
    indices: Vec<usize>,
}

impl<'a> DatasetView<'a> {
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn dataset(&self) -> &'a Dataset {
        self.dataset
    }

    pub fn features(&self) -> Mat<f64> {
        self.dataset.features.select_rows(&self.indices)
    }

    pub fn target(&self, t: Target) -> Vec<f64> {
        self.indices
            .iter()
            .map(|&i| self.dataset.targets[(i, t.index())])
            .collect()
    }
}

/// Train/test views of an already scaled dataset.
pub fn split<'a>(
    dataset: &'a Dataset,
    spec: &SplitSpec,
) -> Result<(DatasetView<'a>, DatasetView<'a>)> {
    let (train, test) = split_indices(dataset.len(), spec)?;
    Ok((dataset.view(train), dataset.view(test)))
}

/// Splits the encoded rows, fits the scaler on the training rows and returns
/// the scaled dataset with its train and test index sets.
pub fn prepare(
    encoded: &EncodedTable,
    spec: &SplitSpec,
) -> Result<(Dataset, Vec<usize>, Vec<usize>)> {
    let (train, test) = split_indices(encoded.len(), spec)?;
    let dataset = Dataset::from_encoded(encoded, &train)?;
    Ok((dataset, train, test))
}
