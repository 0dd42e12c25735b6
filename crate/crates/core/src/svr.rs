//! ε-support vector regression with a Gaussian RBF kernel.
//!
//! The dual is solved in the reduced form with one coefficient per point,
//! `β_i = α_i − α_i*`:
//!
//! ```text
//! maximise   −½ βᵀKβ − ε Σ|β_i| + Σ y_i β_i
//! subject to Σ β_i = 0,  −C ≤ β_i ≤ C
//! ```
//!
//! Each iteration picks the maximal violating pair `(i, j)` and moves
//! `β_i += t`, `β_j −= t` with `t` maximising the (piecewise quadratic,
//! concave) objective exactly along that direction, so the objective never
//! decreases.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::esn::{clip01, rounded, rounded_rows};
use crate::format::round_sig;
use crate::numerics::Mat;
use crate::scalar::Real;

/// Coefficients at or below this magnitude are treated as zero.
pub const ZERO_BETA: f64 = 1e-12;

/// Relative distance to ±C at which a coefficient counts as bounded.
const BOUND_RTOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SvrConfig<T> {
    /// Box constraint.
    pub c: T,
    /// Half-width of the insensitive tube.
    pub epsilon: T,
    /// RBF width in `exp(−γ‖x−z‖²)`.
    pub gamma: T,
    pub kkt_tol: T,
    /// Cap on solver passes; one pass is as many pair updates as there are
    /// training rows.
    pub max_passes: usize,
}

impl<T: Real> Default for SvrConfig<T> {
    fn default() -> Self {
        Self {
            c: T::of(1000.0),
            epsilon: T::of(0.1),
            gamma: T::of(0.1),
            kkt_tol: T::of(1e-3),
            max_passes: 10_000,
        }
    }
}

impl<T: Real> SvrConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.c > T::zero()) {
            return Err(Error::InvalidArgument(format!("C must be > 0, got {}", self.c)));
        }
        if !(self.epsilon >= T::zero()) {
            return Err(Error::InvalidArgument(format!(
                "epsilon must be >= 0, got {}",
                self.epsilon
            )));
        }
        if !(self.gamma > T::zero()) {
            return Err(Error::InvalidArgument(format!(
                "gamma must be > 0, got {}",
                self.gamma
            )));
        }
        if !(self.kkt_tol > T::zero()) {
            return Err(Error::InvalidArgument(format!(
                "kkt_tol must be > 0, got {}",
                self.kkt_tol
            )));
        }
        Ok(())
    }
}

/// `exp(−γ‖x − z‖²)`.
pub fn rbf_kernel<T: Real>(x: &[T], z: &[T], gamma: T) -> Result<T> {
    if x.len() != z.len() {
        return Err(Error::Dimension(format!(
            "kernel between vectors of length {} and {}",
            x.len(),
            z.len()
        )));
    }
    Ok(rbf(x, z, gamma))
}

#[inline]
fn rbf<T: Real>(x: &[T], z: &[T], gamma: T) -> T {
    let d2: T = x.iter().zip(z).map(|(&a, &b)| (a - b) * (a - b)).sum();
    (-gamma * d2).exp()
}

pub fn kernel_matrix<T: Real>(x: &Mat<T>, gamma: T) -> Mat<T> {
    let n = x.rows();
    let mut k = Mat::zeros(n, n);
    for i in 0..n {
        k[(i, i)] = T::one();
        for j in 0..i {
            let v = rbf(x.row(i), x.row(j), gamma);
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
    }
    k
}

/// Dual objective for coefficients `beta` on kernel matrix `k`.
pub fn dual_objective<T: Real>(k: &Mat<T>, y: &[T], beta: &[T], epsilon: T) -> T {
    let kb = k.mul_vec(beta).expect("square kernel matrix");
    let quad: T = beta.iter().zip(&kb).map(|(&b, &v)| b * v).sum();
    let l1: T = beta.iter().map(|b| b.abs()).sum();
    let lin: T = beta.iter().zip(y).map(|(&b, &v)| b * v).sum();
    -quad / T::of(2.0) - epsilon * l1 + lin
}

/// Solver diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct FitInfo<T> {
    pub converged: bool,
    /// Pair updates performed.
    pub iterations: usize,
    /// Passes started, the last one possibly partial.
    pub passes: usize,
    /// `max u − min l` at exit; the first-order optimality gap.
    pub kkt_gap: T,
    /// Dual objective at β = 0 and at the end of every pass.
    pub objective_history: Vec<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SvrModel<T> {
    pub support_inputs: Mat<T>,
    /// Row index in the training set of each support vector.
    pub support_indices: Vec<usize>,
    pub beta: Vec<T>,
    pub beta0: T,
    pub config: SvrConfig<T>,
    pub fit: FitInfo<T>,
}

/// Index and slope of the extreme candidate, if any.
type Extreme<T> = Option<(usize, T)>;

struct Solver<'a, T> {
    k: &'a Mat<T>,
    beta: Vec<T>,
    /// `y − Kβ`
    grad: Vec<T>,
    c: T,
    eps: T,
}

impl<'a, T: Real> Solver<'a, T> {
    fn at_upper(&self, b: T) -> bool {
        b >= self.c * (T::one() - T::of(BOUND_RTOL))
    }

    fn at_lower(&self, b: T) -> bool {
        b <= -self.c * (T::one() - T::of(BOUND_RTOL))
    }

    /// Slope of the objective when β_i increases.
    fn up_slope(&self, i: usize) -> T {
        if self.beta[i] >= T::zero() {
            self.grad[i] - self.eps
        } else {
            self.grad[i] + self.eps
        }
    }

    /// `l_j` such that lowering β_j by `t` changes the objective by `−l_j·t`.
    fn down_slope(&self, j: usize) -> T {
        if self.beta[j] > T::zero() {
            self.grad[j] - self.eps
        } else {
            self.grad[j] + self.eps
        }
    }

    /// Maximal violating pair `(i, max u, j, min l)`.
    fn select(&self) -> (Extreme<T>, Extreme<T>) {
        let mut up: Option<(usize, T)> = None;
        let mut low: Option<(usize, T)> = None;
        for k in 0..self.beta.len() {
            let b = self.beta[k];
            if !self.at_upper(b) {
                let u = self.up_slope(k);
                if up.is_none_or(|(_, m)| u > m) {
                    up = Some((k, u));
                }
            }
            if !self.at_lower(b) {
                let l = self.down_slope(k);
                if low.is_none_or(|(_, m)| l < m) {
                    low = Some((k, l));
                }
            }
        }
        (up, low)
    }

    /// Exact line maximisation of the objective along `β_i += t, β_j −= t`.
    fn step(&mut self, i: usize, j: usize) -> T {
        let (bi, bj) = (self.beta[i], self.beta[j]);
        let c = self.c;
        let eta = (self.k[(i, i)] + self.k[(j, j)] - T::of(2.0) * self.k[(i, j)]).max(T::zero());
        let g = self.grad[i] - self.grad[j];
        let t_max = (c - bi).min(bj + c);
        if !(t_max > T::zero()) {
            return T::zero();
        }

        // breakpoints where |β_i + t| or |β_j − t| changes slope
        let mut knots: Vec<T> = Vec::with_capacity(3);
        if bi < T::zero() && -bi < t_max {
            knots.push(-bi);
        }
        if bj > T::zero() && bj < t_max {
            knots.push(bj);
        }
        knots.sort_by(|a, b| a.partial_cmp(b).expect("finite knots"));
        knots.push(t_max);

        let mut lo = T::zero();
        let mut t = T::zero();
        for &hi in &knots {
            let mid = (lo + hi) / T::of(2.0);
            let si = (bi + mid).signum();
            let sj = (bj - mid).signum();
            let slope0 = g - self.eps * si + self.eps * sj;
            let cand = if eta > T::zero() {
                (slope0 / eta).max(lo).min(hi)
            } else if slope0 > T::zero() {
                hi
            } else {
                lo
            };
            t = cand;
            if cand < hi {
                break;
            }
            lo = hi;
        }

        let mut new_i = bi + t;
        let mut new_j = bj - t;
        if t == t_max {
            if c - bi <= bj + c {
                new_i = c;
            } else {
                new_j = -c;
            }
        }
        if bi < T::zero() && t == -bi {
            new_i = T::zero();
        }
        if bj > T::zero() && t == bj {
            new_j = T::zero();
        }
        let di = new_i - bi;
        let dj = new_j - bj;
        self.beta[i] = new_i;
        self.beta[j] = new_j;
        let (ki, kj) = (self.k.row(i), self.k.row(j));
        for (idx, g) in self.grad.iter_mut().enumerate() {
            *g -= di * ki[idx] + dj * kj[idx];
        }
        t
    }

    fn objective(&self, y: &[T]) -> T {
        // Kβ = y − grad, so βᵀKβ = βᵀ(y − grad)
        let half = T::of(0.5);
        self.beta
            .iter()
            .zip(y.iter().zip(&self.grad))
            .map(|(&b, (&yi, &gi))| half * b * (yi + gi) - self.eps * b.abs())
            .sum()
    }

    fn bias(&self, up: Extreme<T>, low: Extreme<T>) -> T {
        let mut sum = T::zero();
        let mut count = 0usize;
        for (k, &b) in self.beta.iter().enumerate() {
            if b.abs() > T::of(ZERO_BETA) && !self.at_upper(b) && !self.at_lower(b) {
                sum += self.grad[k] - self.eps * b.signum();
                count += 1;
            }
        }
        if count > 0 {
            return sum / T::from_usize_lossy(count);
        }
        match (up, low) {
            (Some((_, u)), Some((_, l))) => (u + l) / T::of(2.0),
            (Some((_, u)), None) => u,
            (None, Some((_, l))) => l,
            (None, None) => T::zero(),
        }
    }
}

fn push_checked<T: Real>(history: &mut Vec<T>, obj: T, pass: usize) {
    let prev = *history.last().expect("history starts non-empty");
    debug_assert!(
        obj >= prev - T::of(1e-10) * prev.abs().max(T::one()),
        "dual objective decreased from {prev} to {obj} in pass {pass}"
    );
    history.push(obj);
}

impl<T: Real> SvrModel<T> {
    /// Trains on the rows of `x` against `y`. Hitting `max_passes` is not an
    /// error: the model is returned with `fit.converged == false`.
    pub fn train(x: &Mat<T>, y: &[T], config: SvrConfig<T>) -> Result<Self> {
        config.validate()?;
        let n = x.rows();
        if n < 2 {
            return Err(Error::InvalidArgument(format!(
                "SVR needs at least 2 training rows, got {n}"
            )));
        }
        if y.len() != n {
            return Err(Error::Dimension(format!("{n} input rows but {} targets", y.len())));
        }
        let k = kernel_matrix(x, config.gamma);
        let mut s = Solver {
            k: &k,
            beta: vec![T::zero(); n],
            grad: y.to_vec(),
            c: config.c,
            eps: config.epsilon,
        };

        let mut history = vec![s.objective(y)];
        let mut iterations = 0;
        let mut passes = 0;
        let mut converged = false;
        let (mut up, mut low) = s.select();
        let mut gap = T::zero();
        'passes: while passes < config.max_passes {
            passes += 1;
            for _ in 0..n {
                let (Some((i, u)), Some((j, l))) = (up, low) else {
                    converged = true;
                    break 'passes;
                };
                gap = u - l;
                if gap <= config.kkt_tol {
                    converged = true;
                    break 'passes;
                }
                let t = s.step(i, j);
                iterations += 1;
                (up, low) = s.select();
                if t == T::zero() {
                    // numerically stuck: report the current gap rather than spin
                    break 'passes;
                }
            }
            push_checked(&mut history, s.objective(y), passes);
        }
        if history.len() <= passes {
            push_checked(&mut history, s.objective(y), passes);
        }
        if let (Some((_, u)), Some((_, l))) = (up, low) {
            gap = u - l;
            converged = converged || gap <= config.kkt_tol;
        }
        let beta0 = s.bias(up, low);

        let support_indices: Vec<usize> = (0..n)
            .filter(|&k| s.beta[k].abs() > T::of(ZERO_BETA))
            .collect();
        Ok(Self {
            support_inputs: x.select_rows(&support_indices),
            beta: support_indices.iter().map(|&k| s.beta[k]).collect(),
            support_indices,
            beta0,
            config,
            fit: FitInfo {
                converged,
                iterations,
                passes,
                kkt_gap: gap.max(T::zero()),
                objective_history: history,
            },
        })
    }

    pub fn n_support(&self) -> usize {
        self.beta.len()
    }

    /// `β₀ + Σ β_i K(x_i, x)` without clipping.
    pub fn decision(&self, x: &[T]) -> Result<T> {
        if x.len() != self.support_inputs.cols() && self.n_support() > 0 {
            return Err(Error::Dimension(format!(
                "model expects {} inputs, got {}",
                self.support_inputs.cols(),
                x.len()
            )));
        }
        let mut f = self.beta0;
        for (sv, &b) in self.support_inputs.iter_rows().zip(&self.beta) {
            f += b * rbf(sv, x, self.config.gamma);
        }
        Ok(f)
    }

    /// Decision value clipped to `[0, 1]`.
    pub fn predict(&self, x: &[T]) -> Result<T> {
        Ok(clip01(self.decision(x)?))
    }

    pub fn predict_rows(&self, x: &Mat<T>) -> Result<Vec<T>> {
        x.iter_rows().map(|r| self.predict(r)).collect()
    }

    /// Full-length coefficient vector over `n` training rows.
    pub fn dense_beta(&self, n: usize) -> Vec<T> {
        let mut beta = vec![T::zero(); n];
        for (&k, &b) in self.support_indices.iter().zip(&self.beta) {
            beta[k] = b;
        }
        beta
    }

    pub fn dump(&self) -> SvrDump {
        SvrDump {
            config: SvrConfig {
                c: round_sig(self.config.c.as_f64(), 9),
                epsilon: round_sig(self.config.epsilon.as_f64(), 9),
                gamma: round_sig(self.config.gamma.as_f64(), 9),
                kkt_tol: round_sig(self.config.kkt_tol.as_f64(), 9),
                max_passes: self.config.max_passes,
            },
            support_vectors: rounded_rows(&self.support_inputs),
            beta: rounded(&self.beta),
            beta0: round_sig(self.beta0.as_f64(), 9),
            converged: self.fit.converged,
            iterations: self.fit.iterations,
            passes: self.fit.passes,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SvrDump {
    pub config: SvrConfig<f64>,
    pub support_vectors: Vec<Vec<f64>>,
    pub beta: Vec<f64>,
    pub beta0: f64,
    pub converged: bool,
    pub iterations: usize,
    pub passes: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct KktReport<T> {
    pub max_violation: T,
    pub worst_index: Option<usize>,
    /// Points whose violation exceeds the model's `kkt_tol`.
    pub violating: usize,
}

/// Checks the ε-insensitive optimality conditions of `model` on its own
/// training data, with residual `r = y − f(x)`:
///
/// * `β = 0`: `|r| ≤ ε`
/// * `0 < β < C`: `r = ε`; `−C < β < 0`: `r = −ε`
/// * `β = C`: `r ≥ ε`; `β = −C`: `r ≤ −ε`
pub fn check_kkt<T: Real>(model: &SvrModel<T>, x: &Mat<T>, y: &[T]) -> Result<KktReport<T>> {
    let beta = model.dense_beta(x.rows());
    kkt_violations(model, x, y, &beta)
}

/// Same as [`check_kkt`] with an explicit dense coefficient vector, which
/// lets callers check a modified solution against the model's kernel and bias.
pub fn kkt_violations<T: Real>(
    model: &SvrModel<T>,
    x: &Mat<T>,
    y: &[T],
    beta: &[T],
) -> Result<KktReport<T>> {
    if y.len() != x.rows() || beta.len() != x.rows() {
        return Err(Error::Dimension(format!(
            "{} rows, {} targets, {} coefficients",
            x.rows(),
            y.len(),
            beta.len()
        )));
    }
    let cfg = &model.config;
    let (c, eps) = (cfg.c, cfg.epsilon);
    let near_c = c * (T::one() - T::of(1e-9));
    let mut report = KktReport {
        max_violation: T::zero(),
        worst_index: None,
        violating: 0,
    };
    for i in 0..x.rows() {
        let mut f = model.beta0;
        for (j, &b) in beta.iter().enumerate() {
            if b != T::zero() {
                f += b * rbf(x.row(j), x.row(i), cfg.gamma);
            }
        }
        let r = y[i] - f;
        let b = beta[i];
        let v = if b.abs() <= T::of(ZERO_BETA) {
            (r.abs() - eps).max(T::zero())
        } else if b >= near_c {
            (eps - r).max(T::zero())
        } else if b <= -near_c {
            (r + eps).max(T::zero())
        } else if b > T::zero() {
            (r - eps).abs()
        } else {
            (r + eps).abs()
        };
        if v > cfg.kkt_tol {
            report.violating += 1;
        }
        if report.worst_index.is_none() || v > report.max_violation {
            report.max_violation = v;
            report.worst_index = Some(i);
        }
    }
    Ok(report)
}
