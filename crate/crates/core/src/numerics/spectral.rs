use super::hqr::hessenberg_eigenvalues;
use super::mat::{dot, norm2, Mat};
use super::rng::Rng;
use crate::error::{Error, Result};
use crate::scalar::Real;

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_ITER: usize = 10_000;

/// Seed for the start vector when the caller does not supply a generator.
const START_SEED: u64 = 0x0005_EED0_F5EC_72A1;

/// Krylov dimension of the Ritz estimate.
const KRYLOV_DIM: usize = 8;

/// Largest eigenvalue modulus of a square matrix by power iteration.
///
/// Each iteration estimates the dominant modulus from the Ritz values of a
/// small Arnoldi basis built on the current iterate, then advances the
/// iterate by that many power steps. With a one-dimensional basis the Ritz
/// value is the Rayleigh quotient; the wider basis also resolves dominant
/// complex-conjugate or `±λ` pairs and clusters of nearly equal modulus,
/// where the plain quotient oscillates or stalls.
pub fn spectral_radius<T: Real>(m: &Mat<T>, tol: T, max_iter: usize) -> Result<T> {
    let mut rng = Rng::seed_from_u64(START_SEED);
    spectral_radius_with_rng(m, tol, max_iter, &mut rng)
}

pub fn spectral_radius_with_rng<T: Real>(
    m: &Mat<T>,
    tol: T,
    max_iter: usize,
    rng: &mut Rng,
) -> Result<T> {
    let d = m.rows();
    if d == 0 || m.cols() != d {
        return Err(Error::Dimension(format!(
            "spectral radius of a {}x{} matrix",
            d,
            m.cols()
        )));
    }
    if !m.is_finite() {
        return Err(Error::InvalidArgument(
            "spectral radius of a matrix with non-finite entries".into(),
        ));
    }
    if d == 1 {
        return Ok(m[(0, 0)].abs());
    }

    let k = d.min(KRYLOV_DIM);
    let mut v: Vec<T> = (0..d).map(|_| rng.uniform(-T::one(), T::one())).collect();
    if !normalize(&mut v) {
        return Ok(T::zero());
    }
    let mut prev = T::nan();
    let mut est = T::zero();
    for _ in 0..max_iter {
        let (ritz, exact) = ritz_radius(m, &v, k)?;
        est = ritz;
        if exact || (est - prev).abs() <= tol * est.max(T::one()) {
            return Ok(est);
        }
        prev = est;
        for _ in 0..k {
            v = m.mul_vec(&v)?;
            if !normalize(&mut v) {
                // M^j v vanished: nilpotent on the start vector
                return Ok(T::zero());
            }
        }
    }
    Err(Error::NoConvergence {
        iterations: max_iter,
        estimate: est.as_f64(),
    })
}

fn normalize<T: Real>(v: &mut [T]) -> bool {
    let n = norm2(v);
    if n == T::zero() || !n.is_finite() {
        return false;
    }
    for x in v.iter_mut() {
        *x /= n;
    }
    true
}

/// Largest Ritz value modulus on the Krylov space of `v` (unit norm) of
/// dimension up to `k`. The flag is set when the space is invariant, in which
/// case the Ritz values are eigenvalues.
fn ritz_radius<T: Real>(m: &Mat<T>, v: &[T], k: usize) -> Result<(T, bool)> {
    let d = v.len();
    let mut basis: Vec<Vec<T>> = vec![v.to_vec()];
    let mut h = vec![T::zero(); k * k];
    let mut dim = k;
    let mut invariant = false;
    let scale = m.max_abs().max(T::min_positive_value());
    for j in 0..k {
        let mut w = m.mul_vec(&basis[j])?;
        // modified Gram–Schmidt, applied twice
        for _ in 0..2 {
            for (i, q) in basis.iter().enumerate() {
                let c = dot(q, &w);
                if i < k {
                    h[i * k + j] += c;
                }
                for (wv, &qv) in w.iter_mut().zip(q) {
                    *wv -= c * qv;
                }
            }
        }
        let beta = norm2(&w);
        if j + 1 == k {
            invariant = j + 1 == d || beta <= T::of(1e-12) * scale;
            break;
        }
        if beta <= T::of(1e-12) * scale {
            dim = j + 1;
            invariant = true;
            break;
        }
        h[(j + 1) * k + j] = beta;
        for x in w.iter_mut() {
            *x /= beta;
        }
        basis.push(w);
    }
    let mut hk = vec![T::zero(); dim * dim];
    for i in 0..dim {
        hk[i * dim..(i + 1) * dim].copy_from_slice(&h[i * k..i * k + dim]);
    }
    let eig = hessenberg_eigenvalues(&mut hk, dim)?;
    let radius = eig
        .into_iter()
        .map(|(re, im)| re.hypot(im))
        .fold(T::zero(), T::max);
    Ok((radius, invariant))
}
