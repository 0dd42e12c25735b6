use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::Mat;

/// Per-column min–max scaling onto `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalerParams {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl ScalerParams {
    pub fn len(&self) -> usize {
        self.min.len()
    }

    pub fn is_empty(&self) -> bool {
        self.min.is_empty()
    }

    pub fn is_constant(&self, j: usize) -> bool {
        self.max[j] == self.min[j]
    }

    pub fn constant_columns(&self) -> Vec<usize> {
        (0..self.len()).filter(|&j| self.is_constant(j)).collect()
    }

    #[inline]
    pub fn scale_value(&self, j: usize, v: f64) -> f64 {
        if self.is_constant(j) {
            return 0.0;
        }
        ((v - self.min[j]) / (self.max[j] - self.min[j])).clamp(0.0, 1.0)
    }

    #[inline]
    pub fn unscale_value(&self, j: usize, s: f64) -> f64 {
        s * (self.max[j] - self.min[j]) + self.min[j]
    }

    fn check(&self, m: &Mat<f64>) -> Result<()> {
        if m.cols() != self.len() {
            return Err(Error::Dimension(format!(
                "scaler fitted on {} columns applied to {}",
                self.len(),
                m.cols()
            )));
        }
        Ok(())
    }
}

/// Records per-column extremes. Constant columns are kept and flagged
/// through [`ScalerParams::is_constant`].
pub fn fit_scaler(m: &Mat<f64>) -> Result<ScalerParams> {
    if m.rows() == 0 || m.cols() == 0 {
        return Err(Error::InvalidArgument(
            "cannot fit a scaler on an empty matrix".into(),
        ));
    }
    let mut min = m.row(0).to_vec();
    let mut max = min.clone();
    for r in m.iter_rows().skip(1) {
        for (j, &v) in r.iter().enumerate() {
            min[j] = min[j].min(v);
            max[j] = max[j].max(v);
        }
    }
    Ok(ScalerParams { min, max })
}

/// `(v − min)/(max − min)` per column, clipped to `[0, 1]`; constant columns map to 0.
pub fn apply_scaler(m: &Mat<f64>, params: &ScalerParams) -> Result<Mat<f64>> {
    params.check(m)?;
    Ok(Mat::from_fn(m.rows(), m.cols(), |i, j| {
        params.scale_value(j, m[(i, j)])
    }))
}

pub fn invert_scaler(m: &Mat<f64>, params: &ScalerParams) -> Result<Mat<f64>> {
    params.check(m)?;
    Ok(Mat::from_fn(m.rows(), m.cols(), |i, j| {
        params.unscale_value(j, m[(i, j)])
    }))
}
