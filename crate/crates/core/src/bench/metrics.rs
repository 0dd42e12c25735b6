use crate::error::{Error, Result};
use crate::scalar::Real;

/// Mean squared error `(1/T) Σ (ŷ(t) − y(t))²`.
pub fn mse<T: Real>(predictions: &[T], targets: &[T]) -> Result<T> {
    if predictions.len() != targets.len() {
        return Err(Error::Dimension(format!(
            "{} predictions for {} targets",
            predictions.len(),
            targets.len()
        )));
    }
    if targets.is_empty() {
        return Err(Error::InvalidArgument("MSE of an empty sequence".into()));
    }
    let sum: T = predictions
        .iter()
        .zip(targets)
        .map(|(&p, &y)| (p - y) * (p - y))
        .sum();
    Ok(sum / T::from_usize_lossy(targets.len()))
}

/// Median of a non-empty slice; the mean of the two middle values for even
/// lengths.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    })
}
