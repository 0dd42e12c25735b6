//! Echo state network with a fixed random reservoir and a ridge-trained
//! linear readout on `[1, s(t)]`.
//!
//! The reservoir recursion is `s(t) = tanh(W_r s(t−1) + W_in x(t))` with no
//! leak rate, no output feedback and no direct input-to-readout connection.
//! Rows are fed in the order given, and prediction continues the state
//! reached at the end of training.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::round_sig;
use crate::numerics::{dot, ridge_solve, spectral_radius_with_rng, Mat, Rng, DEFAULT_MAX_ITER, DEFAULT_TOL};
use crate::scalar::Real;

/// Redraws allowed when the raw reservoir is degenerate.
const MAX_REDRAWS: usize = 8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EsnConfig<T> {
    pub reservoir_size: usize,
    pub spectral_radius: T,
    pub input_scale: T,
    pub washout: usize,
    pub ridge_lambda: T,
    pub seed: u64,
}

impl<T: Real> Default for EsnConfig<T> {
    fn default() -> Self {
        Self {
            reservoir_size: 25,
            spectral_radius: T::of(0.5),
            input_scale: T::one(),
            washout: 10,
            ridge_lambda: T::of(1e-6),
            seed: 0,
        }
    }
}

impl<T: Real> EsnConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if self.reservoir_size == 0 {
            return Err(Error::InvalidArgument("reservoir_size must be >= 1".into()));
        }
        if !(self.spectral_radius > T::zero()) {
            return Err(Error::InvalidArgument(format!(
                "spectral_radius must be > 0, got {}",
                self.spectral_radius
            )));
        }
        if !(self.input_scale > T::zero()) {
            return Err(Error::InvalidArgument(format!(
                "input_scale must be > 0, got {}",
                self.input_scale
            )));
        }
        if !(self.ridge_lambda >= T::zero()) {
            return Err(Error::InvalidArgument(format!(
                "ridge_lambda must be >= 0, got {}",
                self.ridge_lambda
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EsnModel<T> {
    /// d × p
    pub w_in: Mat<T>,
    /// d × d, rescaled to the configured spectral radius.
    pub w_r: Mat<T>,
    /// Bias first, then one weight per reservoir unit.
    pub w_out: Vec<T>,
    pub config: EsnConfig<T>,
    pub final_train_state: Vec<T>,
    trained: bool,
}

impl<T: Real> EsnModel<T> {
    /// Draws `W_in` uniformly in `[−input_scale, input_scale)` and `W_r`
    /// uniformly in `[−1, 1)`, then rescales `W_r` to the target spectral
    /// radius. The readout starts at zero.
    pub fn new(n_inputs: usize, config: EsnConfig<T>) -> Result<Self> {
        config.validate()?;
        if n_inputs == 0 {
            return Err(Error::InvalidArgument("ESN needs at least one input".into()));
        }
        let d = config.reservoir_size;
        let mut rng = Rng::seed_from_u64(config.seed);
        let s = config.input_scale;
        let w_in = Mat::from_fn(d, n_inputs, |_, _| rng.uniform(-s, s));

        let mut last = 0.0;
        for _ in 0..MAX_REDRAWS {
            let raw = Mat::from_fn(d, d, |_, _| rng.uniform(-T::one(), T::one()));
            let radius = match spectral_radius_with_rng(
                &raw,
                T::of(DEFAULT_TOL),
                DEFAULT_MAX_ITER,
                &mut rng,
            ) {
                Ok(r) => r,
                Err(Error::NoConvergence { estimate, .. }) => {
                    last = estimate;
                    continue;
                }
                Err(e) => return Err(e),
            };
            last = radius.as_f64();
            if radius < T::of(1e-12) {
                continue;
            }
            let w_r = raw.scale(config.spectral_radius / radius);
            return Ok(Self {
                w_in,
                w_r,
                w_out: vec![T::zero(); d + 1],
                final_train_state: vec![T::zero(); d],
                config,
                trained: false,
            });
        }
        Err(Error::InvalidArgument(format!(
            "no usable reservoir after {MAX_REDRAWS} draws (last spectral radius {last})"
        )))
    }

    pub fn reservoir_size(&self) -> usize {
        self.w_r.rows()
    }

    pub fn n_inputs(&self) -> usize {
        self.w_in.cols()
    }

    pub fn is_trained(&self) -> bool {
        self.trained
    }

    /// One reservoir update.
    pub fn step(&self, state: &[T], x: &[T]) -> Vec<T> {
        self.w_r
            .iter_rows()
            .zip(self.w_in.iter_rows())
            .map(|(wr, wi)| (dot(wr, state) + dot(wi, x)).tanh())
            .collect()
    }

    /// States for every input row, starting from `s0` (`T × d`).
    pub fn run_reservoir(&self, inputs: &Mat<T>, s0: &[T]) -> Result<Mat<T>> {
        let d = self.reservoir_size();
        if inputs.rows() == 0 {
            return Err(Error::InvalidArgument("empty input sequence".into()));
        }
        if inputs.cols() != self.n_inputs() {
            return Err(Error::Dimension(format!(
                "reservoir expects {} inputs per step, got {}",
                self.n_inputs(),
                inputs.cols()
            )));
        }
        if s0.len() != d {
            return Err(Error::Dimension(format!(
                "initial state of length {} for a reservoir of size {d}",
                s0.len()
            )));
        }
        let mut states = Mat::zeros(inputs.rows(), d);
        let mut s = s0.to_vec();
        for (t, x) in inputs.iter_rows().enumerate() {
            s = self.step(&s, x);
            states.row_mut(t).copy_from_slice(&s);
        }
        Ok(states)
    }

    /// Readout design matrix: one row `[1, s(t)]` per state after `washout`.
    pub fn design_matrix(states: &Mat<T>, washout: usize) -> Mat<T> {
        let d = states.cols();
        let rows = states.rows().saturating_sub(washout);
        Mat::from_fn(rows, d + 1, |i, j| {
            if j == 0 {
                T::one()
            } else {
                states[(i + washout, j - 1)]
            }
        })
    }

    /// Runs the reservoir from the zero state over the training rows, drops
    /// the first `washout` states and fits the readout by ridge regression.
    pub fn train_readout(mut self, inputs: &Mat<T>, targets: &[T]) -> Result<Self> {
        let washout = self.config.washout;
        if inputs.rows() <= washout {
            return Err(Error::InvalidArgument(format!(
                "{} training rows do not exceed washout {washout}",
                inputs.rows()
            )));
        }
        if targets.len() != inputs.rows() {
            return Err(Error::Dimension(format!(
                "{} input rows but {} targets",
                inputs.rows(),
                targets.len()
            )));
        }
        let states = self.run_reservoir(inputs, &vec![T::zero(); self.reservoir_size()])?;
        let design = Self::design_matrix(&states, washout);
        self.w_out = ridge_solve(&design, &targets[washout..], self.config.ridge_lambda)?;
        self.final_train_state = states.row(states.rows() - 1).to_vec();
        self.trained = true;
        Ok(self)
    }

    /// `w_out · [1, s]` without clipping.
    pub fn readout_raw(&self, state: &[T]) -> T {
        self.w_out[0] + dot(&self.w_out[1..], state)
    }

    /// Clipped readout for each row of a state matrix.
    pub fn readout(&self, states: &Mat<T>) -> Vec<T> {
        states
            .iter_rows()
            .map(|s| clip01(self.readout_raw(s)))
            .collect()
    }

    /// Continues from the final training state over `inputs`; predictions are
    /// clipped to `[0, 1]`.
    pub fn predict(&self, inputs: &Mat<T>) -> Result<Vec<T>> {
        if !self.trained {
            return Err(Error::Untrained);
        }
        let states = self.run_reservoir(inputs, &self.final_train_state)?;
        Ok(self.readout(&states))
    }

    /// Installs a readout directly (tests and model loading).
    pub fn with_readout(mut self, w_out: Vec<T>, final_state: Vec<T>) -> Result<Self> {
        let d = self.reservoir_size();
        if w_out.len() != d + 1 || final_state.len() != d {
            return Err(Error::Dimension(format!(
                "readout of length {} / state of length {} for reservoir size {d}",
                w_out.len(),
                final_state.len()
            )));
        }
        self.w_out = w_out;
        self.final_train_state = final_state;
        self.trained = true;
        Ok(self)
    }

    pub fn dump(&self) -> EsnDump {
        EsnDump {
            config: EsnConfig {
                reservoir_size: self.config.reservoir_size,
                spectral_radius: round_sig(self.config.spectral_radius.as_f64(), 9),
                input_scale: round_sig(self.config.input_scale.as_f64(), 9),
                washout: self.config.washout,
                ridge_lambda: round_sig(self.config.ridge_lambda.as_f64(), 9),
                seed: self.config.seed,
            },
            w_in: rounded_rows(&self.w_in),
            w_r: rounded_rows(&self.w_r),
            w_out: rounded(&self.w_out),
            final_train_state: rounded(&self.final_train_state),
        }
    }
}

#[inline]
pub(crate) fn clip01<T: Real>(v: T) -> T {
    v.max(T::zero()).min(T::one())
}

pub(crate) fn rounded<T: Real>(v: &[T]) -> Vec<f64> {
    v.iter().map(|x| round_sig(x.as_f64(), 9)).collect()
}

pub(crate) fn rounded_rows<T: Real>(m: &Mat<T>) -> Vec<Vec<f64>> {
    m.iter_rows().map(rounded).collect()
}

/// JSON form of a model, reals rounded to 9 significant digits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EsnDump {
    pub config: EsnConfig<f64>,
    pub w_in: Vec<Vec<f64>>,
    pub w_r: Vec<Vec<f64>>,
    pub w_out: Vec<f64>,
    pub final_train_state: Vec<f64>,
}
