//! Dense linear algebra, ridge regression, spectral radius and the seeded
//! generator shared by every model.

mod hqr;
mod linalg;
mod mat;
mod rng;
mod spectral;

pub use linalg::{ridge_residual, ridge_solve, Cholesky};
pub use mat::{axpy, dot, max_abs, norm2, Mat};
pub use rng::{derive_seed, Rng};
pub use spectral::{spectral_radius, spectral_radius_with_rng, DEFAULT_MAX_ITER, DEFAULT_TOL};
