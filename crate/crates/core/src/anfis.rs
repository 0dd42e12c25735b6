//! Zero-order Sugeno ANFIS on a full grid partition.
//!
//! Layers: Gaussian memberships per input (1), product firing strength per
//! rule (2), normalisation (3), constant consequents weighted by the
//! normalised strengths (4) and their sum (5). Rules enumerate every
//! combination of membership indices in lexicographic order, first input
//! most significant, and are never stored explicitly.
//!
//! Training is hybrid: consequents by batch ridge least squares with the
//! premises fixed, then one full-batch gradient step on the membership
//! centres and widths.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::esn::{clip01, rounded};
use crate::format::round_sig;
use crate::numerics::{ridge_solve, Mat};
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnfisConfig<T> {
    /// Membership functions per input.
    pub n_mfs: usize,
    /// Premise learning rate.
    pub lr: T,
    pub lse_lambda: T,
    pub epochs: usize,
    pub sigma_min: T,
    /// Width multiplier applied to half the centre spacing.
    pub overlap: T,
}

impl<T: Real> Default for AnfisConfig<T> {
    fn default() -> Self {
        Self {
            n_mfs: 3,
            lr: T::of(0.01),
            lse_lambda: T::of(1e-6),
            epochs: 2,
            sigma_min: T::of(1e-3),
            overlap: T::one(),
        }
    }
}

impl<T: Real> AnfisConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if self.n_mfs == 0 {
            return Err(Error::InvalidArgument("n_mfs must be >= 1".into()));
        }
        if !(self.lr >= T::zero()) {
            return Err(Error::InvalidArgument(format!("lr must be >= 0, got {}", self.lr)));
        }
        if !(self.lse_lambda >= T::zero()) {
            return Err(Error::InvalidArgument(format!(
                "lse_lambda must be >= 0, got {}",
                self.lse_lambda
            )));
        }
        if !(self.sigma_min > T::zero()) || !(self.overlap > T::zero()) {
            return Err(Error::InvalidArgument(
                "sigma_min and overlap must be > 0".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianMf<T> {
    pub center: T,
    pub width: T,
}

impl<T: Real> GaussianMf<T> {
    /// `exp(−(x − c)² / (2σ²))`
    #[inline]
    pub fn eval(&self, x: T) -> T {
        let z = (x - self.center) / self.width;
        (-(z * z) / T::of(2.0)).exp()
    }
}

pub fn gaussian_mf<T: Real>(x: T, mf: &GaussianMf<T>) -> T {
    mf.eval(x)
}

/// Per-layer values of one forward pass.
#[derive(Clone, Debug, PartialEq)]
pub struct ForwardTrace<T> {
    /// `memberships[i][m]`: input `i`, membership function `m`.
    pub memberships: Vec<Vec<T>>,
    pub firing: Vec<T>,
    pub normalized: Vec<T>,
    pub rule_outputs: Vec<T>,
    pub output: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnfisModel<T> {
    /// `mfs[i][m]`
    pub mfs: Vec<Vec<GaussianMf<T>>>,
    pub consequents: Vec<T>,
    pub config: AnfisConfig<T>,
}

/// Gradient of the batch mean squared error with respect to every premise
/// parameter, laid out like [`AnfisModel::mfs`].
#[derive(Clone, Debug, PartialEq)]
pub struct PremiseGradient<T> {
    pub d_center: Vec<Vec<T>>,
    pub d_width: Vec<Vec<T>>,
    pub mse: T,
}

impl<T: Real> AnfisModel<T> {
    /// Evenly spaced centres at `lo + k(hi − lo)/(M − 1)` with width
    /// `(hi − lo)/(2(M − 1))·overlap`; a single function per input sits at the
    /// midpoint with width `(hi − lo)/2·overlap`. Consequents start at zero.
    pub fn new(input_ranges: &[(T, T)], config: AnfisConfig<T>) -> Result<Self> {
        config.validate()?;
        if input_ranges.is_empty() {
            return Err(Error::InvalidArgument("ANFIS needs at least one input".into()));
        }
        let m = config.n_mfs;
        let mut mfs = Vec::with_capacity(input_ranges.len());
        for (i, &(lo, hi)) in input_ranges.iter().enumerate() {
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "input {i}: invalid range [{lo}, {hi}]"
                )));
            }
            let span = hi - lo;
            let row = if m == 1 {
                vec![GaussianMf {
                    center: (lo + hi) / T::of(2.0),
                    width: (span / T::of(2.0) * config.overlap).max(config.sigma_min),
                }]
            } else {
                let gaps = T::from_usize_lossy(m - 1);
                let width = (span / (T::of(2.0) * gaps) * config.overlap).max(config.sigma_min);
                (0..m)
                    .map(|k| GaussianMf {
                        center: if k == m - 1 {
                            hi
                        } else {
                            lo + span * T::from_usize_lossy(k) / gaps
                        },
                        width,
                    })
                    .collect()
            };
            mfs.push(row);
        }
        let n_rules = rule_count(input_ranges.len(), m)?;
        Ok(Self {
            mfs,
            consequents: vec![T::zero(); n_rules],
            config,
        })
    }

    pub fn n_inputs(&self) -> usize {
        self.mfs.len()
    }

    pub fn n_mfs(&self) -> usize {
        self.config.n_mfs
    }

    pub fn n_rules(&self) -> usize {
        self.consequents.len()
    }

    /// Membership indices of rule `r`, one per input.
    pub fn rule(&self, r: usize) -> Vec<usize> {
        let m = self.n_mfs();
        let mut digits = vec![0; self.n_inputs()];
        let mut rest = r;
        for d in digits.iter_mut().rev() {
            *d = rest % m;
            rest /= m;
        }
        digits
    }

    fn check_input(&self, x: &[T]) -> Result<()> {
        if x.len() != self.n_inputs() {
            return Err(Error::Dimension(format!(
                "ANFIS expects {} inputs, got {}",
                self.n_inputs(),
                x.len()
            )));
        }
        Ok(())
    }

    pub fn memberships(&self, x: &[T]) -> Vec<Vec<T>> {
        self.mfs
            .iter()
            .zip(x)
            .map(|(row, &xi)| row.iter().map(|mf| mf.eval(xi)).collect())
            .collect()
    }

    /// Layer-2 strengths in rule order.
    fn firing(&self, mu: &[Vec<T>]) -> Vec<T> {
        let mut w = Vec::with_capacity(self.n_rules());
        w.push(T::one());
        for row in mu {
            let prev = std::mem::take(&mut w);
            w.reserve(prev.len() * row.len());
            for p in prev {
                for &v in row {
                    w.push(p * v);
                }
            }
        }
        w
    }

    /// Normalised firing strengths (one design-matrix row).
    pub fn normalized_firing(&self, x: &[T]) -> Result<Vec<T>> {
        self.check_input(x)?;
        let mut w = self.firing(&self.memberships(x));
        let total: T = w.iter().copied().sum();
        if !(total > T::zero()) {
            return Err(Error::ZeroFiring);
        }
        for v in w.iter_mut() {
            *v /= total;
        }
        Ok(w)
    }

    pub fn forward(&self, x: &[T]) -> Result<ForwardTrace<T>> {
        self.check_input(x)?;
        let memberships = self.memberships(x);
        let firing = self.firing(&memberships);
        let total: T = firing.iter().copied().sum();
        if !(total > T::zero()) {
            return Err(Error::ZeroFiring);
        }
        let normalized: Vec<T> = firing.iter().map(|&w| w / total).collect();
        let rule_outputs: Vec<T> = normalized
            .iter()
            .zip(&self.consequents)
            .map(|(&wn, &f)| wn * f)
            .collect();
        let output = rule_outputs.iter().copied().sum();
        Ok(ForwardTrace {
            memberships,
            firing,
            normalized,
            rule_outputs,
            output,
        })
    }

    /// Layer-5 output without clipping.
    pub fn output(&self, x: &[T]) -> Result<T> {
        let wn = self.normalized_firing(x)?;
        Ok(wn
            .iter()
            .zip(&self.consequents)
            .map(|(&w, &f)| w * f)
            .sum())
    }

    /// Layer-5 output clipped to `[0, 1]`.
    pub fn predict(&self, x: &[T]) -> Result<T> {
        Ok(clip01(self.output(x)?))
    }

    pub fn predict_rows(&self, x: &Mat<T>) -> Result<Vec<T>> {
        x.iter_rows().map(|r| self.predict(r)).collect()
    }

    /// Batch mean squared error of the unclipped output.
    pub fn mse(&self, x: &Mat<T>, y: &[T]) -> Result<T> {
        check_batch(x, y)?;
        let mut sum = T::zero();
        for (r, &t) in x.iter_rows().zip(y) {
            let e = self.output(r)? - t;
            sum += e * e;
        }
        Ok(sum / T::from_usize_lossy(y.len()))
    }

    /// `n × rules` matrix of normalised firing strengths.
    pub fn design_matrix(&self, x: &Mat<T>) -> Result<Mat<T>> {
        let mut phi = Mat::zeros(x.rows(), self.n_rules());
        for (i, r) in x.iter_rows().enumerate() {
            phi.row_mut(i).copy_from_slice(&self.normalized_firing(r)?);
        }
        Ok(phi)
    }

    /// Replaces the consequents with the ridge solution for the current
    /// premises.
    pub fn lse_consequents(&mut self, x: &Mat<T>, y: &[T]) -> Result<()> {
        check_batch(x, y)?;
        let phi = self.design_matrix(x)?;
        self.consequents = ridge_solve(&phi, y, self.config.lse_lambda)?;
        Ok(())
    }

    /// Analytic gradient of the batch MSE (unclipped outputs) with respect to
    /// every centre and width.
    pub fn premise_gradient(&self, x: &Mat<T>, y: &[T]) -> Result<PremiseGradient<T>> {
        check_batch(x, y)?;
        let (n_in, m) = (self.n_inputs(), self.n_mfs());
        let mut d_center = vec![vec![T::zero(); m]; n_in];
        let mut d_width = vec![vec![T::zero(); m]; n_in];
        let scale = T::of(2.0) / T::from_usize_lossy(y.len());
        let mut sse = T::zero();

        // ∂ŷ/∂μ[i][m] per sample
        let mut dmu = vec![vec![T::zero(); m]; n_in];
        let mut digits = vec![0usize; n_in];
        let mut prefix = vec![T::one(); n_in + 1];
        let mut suffix = vec![T::one(); n_in + 1];
        for (xr, &target) in x.iter_rows().zip(y) {
            self.check_input(xr)?;
            let mu = self.memberships(xr);
            let w = self.firing(&mu);
            let total: T = w.iter().copied().sum();
            if !(total > T::zero()) {
                return Err(Error::ZeroFiring);
            }
            let yhat: T = w
                .iter()
                .zip(&self.consequents)
                .map(|(&wr, &f)| wr * f)
                .sum::<T>()
                / total;
            let err = yhat - target;
            sse += err * err;

            for row in dmu.iter_mut() {
                row.iter_mut().for_each(|v| *v = T::zero());
            }
            digits.iter_mut().for_each(|d| *d = 0);
            for &f in &self.consequents {
                // ∂ŷ/∂w_r = (f_r − ŷ)/Σw; ∂w_r/∂μ[i][d_i] = Π_{k≠i} μ[k][d_k]
                let coef = (f - yhat) / total;
                for k in 0..n_in {
                    prefix[k + 1] = prefix[k] * mu[k][digits[k]];
                }
                for k in (0..n_in).rev() {
                    suffix[k] = suffix[k + 1] * mu[k][digits[k]];
                }
                for k in 0..n_in {
                    dmu[k][digits[k]] += coef * prefix[k] * suffix[k + 1];
                }
                // next rule: increment the last digit with carry
                for d in digits.iter_mut().rev() {
                    *d += 1;
                    if *d < m {
                        break;
                    }
                    *d = 0;
                }
            }

            let g = scale * err;
            for (k, (&xk, mfs)) in xr.iter().zip(&self.mfs).enumerate() {
                for (j, mf) in mfs.iter().enumerate() {
                    let diff = xk - mf.center;
                    let s2 = mf.width * mf.width;
                    let base = g * dmu[k][j] * mu[k][j];
                    d_center[k][j] += base * diff / s2;
                    d_width[k][j] += base * diff * diff / (s2 * mf.width);
                }
            }
        }

        for (k, (dc, dw)) in d_center.iter().zip(&d_width).enumerate() {
            for j in 0..m {
                if !dc[j].is_finite() {
                    return Err(Error::NonFiniteGradient(format!("center[{k}][{j}]")));
                }
                if !dw[j].is_finite() {
                    return Err(Error::NonFiniteGradient(format!("width[{k}][{j}]")));
                }
            }
        }
        Ok(PremiseGradient {
            d_center,
            d_width,
            mse: sse / T::from_usize_lossy(y.len()),
        })
    }

    /// One full-batch gradient-descent step on the premises; widths are
    /// floored at `sigma_min` afterwards.
    pub fn premise_gradient_step(&mut self, x: &Mat<T>, y: &[T], lr: T) -> Result<()> {
        let grad = self.premise_gradient(x, y)?;
        let floor = self.config.sigma_min;
        for (k, row) in self.mfs.iter_mut().enumerate() {
            for (j, mf) in row.iter_mut().enumerate() {
                mf.center -= lr * grad.d_center[k][j];
                mf.width = (mf.width - lr * grad.d_width[k][j]).max(floor);
            }
        }
        Ok(())
    }

    /// `epochs` rounds of least-squares consequents followed by a premise
    /// step. Returns the training MSE measured right after each
    /// least-squares fit.
    pub fn train_hybrid(&mut self, x: &Mat<T>, y: &[T]) -> Result<Vec<T>> {
        check_batch(x, y)?;
        let mut log = Vec::with_capacity(self.config.epochs);
        for _ in 0..self.config.epochs {
            self.lse_consequents(x, y)?;
            log.push(self.mse(x, y)?);
            let lr = self.config.lr;
            self.premise_gradient_step(x, y, lr)?;
        }
        Ok(log)
    }

    pub fn dump(&self) -> AnfisDump {
        AnfisDump {
            config: AnfisConfig {
                n_mfs: self.config.n_mfs,
                lr: round_sig(self.config.lr.as_f64(), 9),
                lse_lambda: round_sig(self.config.lse_lambda.as_f64(), 9),
                epochs: self.config.epochs,
                sigma_min: round_sig(self.config.sigma_min.as_f64(), 9),
                overlap: round_sig(self.config.overlap.as_f64(), 9),
            },
            mfs: self
                .mfs
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|mf| GaussianMf {
                            center: round_sig(mf.center.as_f64(), 9),
                            width: round_sig(mf.width.as_f64(), 9),
                        })
                        .collect()
                })
                .collect(),
            consequents: rounded(&self.consequents),
        }
    }
}

fn rule_count(n_inputs: usize, n_mfs: usize) -> Result<usize> {
    u32::try_from(n_inputs)
        .ok()
        .and_then(|e| n_mfs.checked_pow(e))
        .ok_or_else(|| {
            Error::InvalidArgument(format!("{n_mfs}^{n_inputs} rules overflow"))
        })
}

fn check_batch<T: Real>(x: &Mat<T>, y: &[T]) -> Result<()> {
    if x.rows() == 0 {
        return Err(Error::InvalidArgument("empty training batch".into()));
    }
    if x.rows() != y.len() {
        return Err(Error::Dimension(format!(
            "{} input rows but {} targets",
            x.rows(),
            y.len()
        )));
    }
    Ok(())
}

/// JSON form: membership grid, consequents and settings. Rules are implicit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnfisDump {
    pub config: AnfisConfig<f64>,
    pub mfs: Vec<Vec<GaussianMf<f64>>>,
    pub consequents: Vec<f64>,
}
