use rayon::prelude::*;

use super::mat::{dot, Mat};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Lower-triangular Cholesky factor `L` with `A = L·Lᵀ`, stored row-major.
#[derive(Clone, Debug)]
pub struct Cholesky<T> {
    l: Mat<T>,
}

/// Relative pivot threshold below which a system is reported singular.
const PIVOT_RTOL: f64 = 1e-13;

/// Column count above which the Gram matrix is built in parallel.
const PAR_THRESHOLD: usize = 256;

impl<T: Real> Cholesky<T> {
    /// Factorises a symmetric positive-definite matrix. Only the lower
    /// triangle of `a` is read.
    pub fn factor(a: &Mat<T>) -> Result<Self> {
        let n = a.rows();
        if a.cols() != n {
            return Err(Error::Dimension(format!(
                "cholesky of non-square {}x{} matrix",
                n,
                a.cols()
            )));
        }
        let scale = (0..n).fold(T::zero(), |m, i| m.max(a[(i, i)].abs()));
        let threshold = T::of(PIVOT_RTOL) * scale.max(T::min_positive_value());

        // Left-looking, row by row: row i of L only needs rows < i.
        let mut l = Mat::zeros(n, n);
        for i in 0..n {
            let (done, rest) = l.as_mut_slice().split_at_mut(i * n);
            let done = &*done;
            let row_i = &mut rest[..n];
            let a_row = a.row(i);
            let compute = |j: usize, lij_prev: &[T]| -> T {
                let lj = &done[j * n..j * n + j];
                a_row[j] - dot(&lij_prev[..j], lj)
            };
            // Off-diagonal entries depend on earlier entries of the same row,
            // so they are filled sequentially.
            for j in 0..i {
                let s = compute(j, row_i);
                row_i[j] = s / done[j * n + j];
            }
            let d = a_row[i] - dot(&row_i[..i], &row_i[..i]);
            if !(d > threshold) {
                return Err(Error::Singular {
                    column: i,
                    pivot: d.as_f64(),
                });
            }
            row_i[i] = d.sqrt();
        }
        Ok(Self { l })
    }

    pub fn factor_matrix(&self) -> &Mat<T> {
        &self.l
    }

    pub fn solve(&self, b: &[T]) -> Result<Vec<T>> {
        let n = self.l.rows();
        if b.len() != n {
            return Err(Error::Dimension(format!(
                "right-hand side of length {} for an {n}x{n} system",
                b.len()
            )));
        }
        // L z = b
        let mut z = vec![T::zero(); n];
        for i in 0..n {
            let row = self.l.row(i);
            z[i] = (b[i] - dot(&row[..i], &z[..i])) / row[i];
        }
        // Lᵀ w = z, column sweep so that L is read along rows
        let mut w = z;
        for i in (0..n).rev() {
            let row = self.l.row(i);
            w[i] /= row[i];
            let wi = w[i];
            for (k, &lik) in row[..i].iter().enumerate() {
                w[k] -= lik * wi;
            }
        }
        Ok(w)
    }
}

/// Solves `min ‖A w − b‖² + λ‖w‖²` through the normal equations
/// `(AᵀA + λI) w = Aᵀb` and a Cholesky factorisation. When `A` has more
/// columns than rows and `λ > 0` the smaller `n × n` system is factored
/// instead.
pub fn ridge_solve<T: Real>(a: &Mat<T>, b: &[T], lambda: T) -> Result<Vec<T>> {
    let (n, m) = (a.rows(), a.cols());
    if n == 0 || m == 0 {
        return Err(Error::Dimension(format!("empty design matrix {n}x{m}")));
    }
    if b.len() != n {
        return Err(Error::Dimension(format!(
            "design matrix has {n} rows but target has {}",
            b.len()
        )));
    }
    if !(lambda >= T::zero()) || !lambda.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "ridge lambda must be finite and >= 0, got {lambda}"
        )));
    }
    if m > n && lambda > T::zero() {
        // wide system: w = Aᵀ(AAᵀ + λI)⁻¹ b is the same minimiser
        let mut k = if n >= PAR_THRESHOLD {
            par_gram(&a.transpose())
        } else {
            a.transpose().gram()
        };
        for i in 0..n {
            k[(i, i)] += lambda;
        }
        let alpha = Cholesky::factor(&k)?.solve(b)?;
        return a.tr_mul_vec(&alpha);
    }
    let mut g = if m >= PAR_THRESHOLD {
        par_gram(a)
    } else {
        a.gram()
    };
    for i in 0..m {
        g[(i, i)] += lambda;
    }
    let rhs = a.tr_mul_vec(b)?;
    Cholesky::factor(&g)?.solve(&rhs)
}

/// `AᵀA` with output rows computed in parallel. Each entry is a single
/// fixed-order dot product, so the result does not depend on the thread count.
fn par_gram<T: Real>(a: &Mat<T>) -> Mat<T> {
    let m = a.cols();
    let at = a.transpose();
    let mut out = vec![T::zero(); m * m];
    out.par_chunks_mut(m).enumerate().for_each(|(i, row)| {
        let ci = at.row(i);
        for j in i..m {
            row[j] = dot(ci, at.row(j));
        }
    });
    let mut g = Mat::from_vec(m, m, out).expect("m*m entries");
    for i in 0..m {
        for j in 0..i {
            g[(i, j)] = g[(j, i)];
        }
    }
    g
}

/// Normal-equations residual `‖Aᵀ(Aw − b) + λw‖∞`.
pub fn ridge_residual<T: Real>(a: &Mat<T>, b: &[T], lambda: T, w: &[T]) -> Result<T> {
    let mut r = a.mul_vec(w)?;
    for (ri, &bi) in r.iter_mut().zip(b) {
        *ri -= bi;
    }
    let g = a.tr_mul_vec(&r)?;
    Ok(g
        .iter()
        .zip(w)
        .fold(T::zero(), |m, (&gi, &wi)| m.max((gi + lambda * wi).abs())))
}
