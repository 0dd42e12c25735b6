//! Eigenvalues of a small real upper Hessenberg matrix by the shifted
//! double-step QR iteration (Francis).

use crate::error::{Error, Result};
use crate::scalar::Real;

const MAX_SWEEPS: usize = 60;

#[inline]
fn sign<T: Real>(a: T, b: T) -> T {
    if b >= T::zero() {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Returns `(re, im)` for every eigenvalue of the `n × n` upper Hessenberg
/// matrix `a` (row-major, overwritten). Entries below the subdiagonal are
/// ignored.
pub(crate) fn hessenberg_eigenvalues<T: Real>(a: &mut [T], n: usize) -> Result<Vec<(T, T)>> {
    debug_assert_eq!(a.len(), n * n);
    let idx = |i: usize, j: usize| i * n + j;
    let mut wr = vec![T::zero(); n];
    let mut wi = vec![T::zero(); n];
    if n == 0 {
        return Ok(vec![]);
    }

    let mut anorm = T::zero();
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += a[idx(i, j)].abs();
        }
    }

    let mut nn = n as isize - 1;
    let mut t = T::zero();
    let (half, quarter3) = (T::of(0.5), T::of(0.75));
    while nn >= 0 {
        let mut its = 0;
        loop {
            let nu = nn as usize;
            // smallest l with a negligible subdiagonal entry at l
            let mut l = nu;
            while l >= 1 {
                let mut s = a[idx(l - 1, l - 1)].abs() + a[idx(l, l)].abs();
                if s == T::zero() {
                    s = anorm;
                }
                if a[idx(l, l - 1)].abs() + s == s {
                    a[idx(l, l - 1)] = T::zero();
                    break;
                }
                l -= 1;
            }
            let mut x = a[idx(nu, nu)];
            if l == nu {
                wr[nu] = x + t;
                wi[nu] = T::zero();
                nn -= 1;
                break;
            }
            let mut y = a[idx(nu - 1, nu - 1)];
            let mut w = a[idx(nu, nu - 1)] * a[idx(nu - 1, nu)];
            if l == nu - 1 {
                let p = half * (y - x);
                let q = p * p + w;
                let z = q.abs().sqrt();
                x += t;
                if q >= T::zero() {
                    let z = p + sign(z, p);
                    wr[nu - 1] = x + z;
                    wr[nu] = if z != T::zero() { x - w / z } else { x + z };
                    wi[nu - 1] = T::zero();
                    wi[nu] = T::zero();
                } else {
                    wr[nu - 1] = x + p;
                    wr[nu] = x + p;
                    wi[nu - 1] = -z;
                    wi[nu] = z;
                }
                nn -= 2;
                break;
            }

            if its == MAX_SWEEPS {
                return Err(Error::NoConvergence {
                    iterations: its,
                    estimate: f64::NAN,
                });
            }
            if its > 0 && its % 10 == 0 {
                // exceptional shift
                t += x;
                for i in 0..=nu {
                    a[idx(i, i)] -= x;
                }
                let s = a[idx(nu, nu - 1)].abs() + a[idx(nu - 1, nu - 2)].abs();
                x = quarter3 * s;
                y = x;
                w = T::of(-0.4375) * s * s;
            }
            its += 1;

            // two consecutive small subdiagonal entries
            let mut m = nu - 2;
            let (mut p, mut q, mut r);
            loop {
                let z = a[idx(m, m)];
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - w) / a[idx(m + 1, m)] + a[idx(m, m + 1)];
                q = a[idx(m + 1, m + 1)] - z - rr - ss;
                r = a[idx(m + 2, m + 1)];
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = a[idx(m, m - 1)].abs() * (q.abs() + r.abs());
                let v = p.abs() * (a[idx(m - 1, m - 1)].abs() + z.abs() + a[idx(m + 1, m + 1)].abs());
                if u + v == v {
                    break;
                }
                m -= 1;
            }
            for i in (m + 2)..=nu {
                a[idx(i, i - 2)] = T::zero();
                if i != m + 2 {
                    a[idx(i, i - 3)] = T::zero();
                }
            }

            let mut k = m;
            while k < nu {
                let mut xk = T::zero();
                if k != m {
                    p = a[idx(k, k - 1)];
                    q = a[idx(k + 1, k - 1)];
                    r = if k != nu - 1 {
                        a[idx(k + 2, k - 1)]
                    } else {
                        T::zero()
                    };
                    xk = p.abs() + q.abs() + r.abs();
                    if xk != T::zero() {
                        p /= xk;
                        q /= xk;
                        r /= xk;
                    }
                }
                let s = sign((p * p + q * q + r * r).sqrt(), p);
                if s != T::zero() {
                    if k == m {
                        if l != m {
                            a[idx(k, k - 1)] = -a[idx(k, k - 1)];
                        }
                    } else {
                        a[idx(k, k - 1)] = -s * xk;
                    }
                    p += s;
                    let xs = p / s;
                    let ys = q / s;
                    let zs = r / s;
                    q /= p;
                    r /= p;
                    for j in k..=nu {
                        let mut pp = a[idx(k, j)] + q * a[idx(k + 1, j)];
                        if k != nu - 1 {
                            pp += r * a[idx(k + 2, j)];
                            a[idx(k + 2, j)] -= pp * zs;
                        }
                        a[idx(k + 1, j)] -= pp * ys;
                        a[idx(k, j)] -= pp * xs;
                    }
                    let mmin = nu.min(k + 3);
                    for i in l..=mmin {
                        let mut pp = xs * a[idx(i, k)] + ys * a[idx(i, k + 1)];
                        if k != nu - 1 {
                            pp += zs * a[idx(i, k + 2)];
                            a[idx(i, k + 2)] -= pp * r;
                        }
                        a[idx(i, k + 1)] -= pp * q;
                        a[idx(i, k)] -= pp;
                    }
                }
                k += 1;
            }
        }
    }
    Ok(wr.into_iter().zip(wi).collect())
}
