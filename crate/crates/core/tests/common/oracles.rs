//! Independent reference computations: nalgebra for dense linear algebra and
//! eigenvalues, exhaustive active-set enumeration for the SVR dual, central
//! differences for the ANFIS gradient. Each check returns the first
//! disagreement as `Err`.

use nalgebra::{DMatrix, DVector};
use postbench::anfis::{AnfisConfig, AnfisModel, GaussianMf};
use postbench::esn::{EsnConfig, EsnModel};
use postbench::numerics::{ridge_solve, spectral_radius, Mat, Rng};
use postbench::svr::{
    check_kkt, dual_objective, kernel_matrix, kkt_violations, FitInfo, SvrConfig, SvrModel,
};

use super::invariants::Check;

fn random_mat(rows: usize, cols: usize, seed: u64) -> Mat<f64> {
    let mut rng = Rng::seed_from_u64(seed);
    Mat::from_fn(rows, cols, |_, _| rng.uniform(-1.0, 1.0))
}

fn to_na(m: &Mat<f64>) -> DMatrix<f64> {
    DMatrix::from_row_slice(m.rows(), m.cols(), m.as_slice())
}

/// `(AᵀA + λI)⁻¹ Aᵀb` by LU in nalgebra.
pub fn ridge_oracle(a: &Mat<f64>, b: &[f64], lambda: f64) -> Vec<f64> {
    let a = to_na(a);
    let n = a.ncols();
    let lhs = a.transpose() * &a + DMatrix::identity(n, n) * lambda;
    let rhs = a.transpose() * DVector::from_column_slice(b);
    lhs.lu().solve(&rhs).unwrap().iter().copied().collect()
}

pub fn eig_radius(m: &Mat<f64>) -> f64 {
    to_na(m)
        .complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

pub fn ridge_matches_reference() -> Check {
    let a = random_mat(20, 5, 1);
    let b: Vec<f64> = (0..20).map(|i| (i as f64 * 0.7).sin()).collect();
    for lambda in [0.0, 1e-6, 0.1, 10.0] {
        let w = ridge_solve(&a, &b, lambda).map_err(|e| e.to_string())?;
        for (x, y) in w.iter().zip(&ridge_oracle(&a, &b, lambda)) {
            ensure!((x - y).abs() < 1e-10, "lambda {lambda}: {x} vs {y}");
        }
    }
    let a = random_mat(12, 40, 2);
    let b: Vec<f64> = (0..12).map(|i| i as f64 / 12.0).collect();
    for lambda in [1e-3, 1.0] {
        let w = ridge_solve(&a, &b, lambda).map_err(|e| e.to_string())?;
        for (x, y) in w.iter().zip(&ridge_oracle(&a, &b, lambda)) {
            ensure!((x - y).abs() < 1e-9, "wide, lambda {lambda}: {x} vs {y}");
        }
    }
    Ok(())
}

pub fn power_iteration_matches_eigenvalues() -> Check {
    for seed in 0..20 {
        let m = random_mat(25, 25, 100 + seed);
        let r = spectral_radius(&m, 1e-9, 10_000).map_err(|e| e.to_string())?;
        let o = eig_radius(&m);
        ensure!((r - o).abs() <= 1e-6 * o.max(1.0), "seed {seed}: {r} vs {o}");
    }
    Ok(())
}

pub fn reservoir_radius() -> Check {
    for seed in 0..10 {
        let config = EsnConfig {
            seed,
            ..EsnConfig::default()
        };
        let esn = EsnModel::new(7, config).map_err(|e| e.to_string())?;
        let o = eig_radius(&esn.w_r);
        ensure!((o - 0.5).abs() <= 1e-6, "seed {seed}: radius {o}");
    }
    Ok(())
}

pub fn esn_readout_closed_form() -> Check {
    let mut rng = Rng::seed_from_u64(9);
    let x = Mat::from_fn(120, 7, |_, _| rng.next_f64());
    let y: Vec<f64> = (0..120)
        .map(|t| 0.5 + 0.3 * (x[(t, 0)] - x[(t, 3)]) * x[(t, 5)])
        .collect();
    for lambda in [1e-6, 1e-2] {
        let config = EsnConfig {
            ridge_lambda: lambda,
            seed: 4,
            ..EsnConfig::default()
        };
        let model = EsnModel::new(7, config)
            .and_then(|m| m.train_readout(&x, &y))
            .map_err(|e| e.to_string())?;

        // states recomputed directly from the recursion
        let d = model.reservoir_size();
        let mut s = vec![0.0; d];
        let mut rows = Vec::new();
        for t in 0..120 {
            s = (0..d)
                .map(|i| {
                    let mut a = 0.0;
                    for j in 0..d {
                        a += model.w_r[(i, j)] * s[j];
                    }
                    for j in 0..7 {
                        a += model.w_in[(i, j)] * x[(t, j)];
                    }
                    a.tanh()
                })
                .collect();
            if t >= 10 {
                let mut r = vec![1.0];
                r.extend_from_slice(&s);
                rows.push(r);
            }
        }
        let design = Mat::from_rows(&rows).unwrap();
        for (a, b) in model.w_out.iter().zip(&ridge_oracle(&design, &y[10..], lambda)) {
            ensure!((a - b).abs() < 1e-8, "lambda {lambda}: {a} vs {b}");
        }
    }
    Ok(())
}

/// Exact optimum of the ε-SVR dual on a tiny instance: every coefficient is
/// assigned one of five states (−C, free negative, 0, free positive, +C); the
/// free coefficients and the bias solve the equality conditions, and the best
/// feasible assignment wins.
pub struct DualOracle {
    pub beta: Vec<f64>,
    pub bias: f64,
    pub objective: f64,
}

pub fn svr_oracle(x: &Mat<f64>, y: &[f64], c: f64, eps: f64, gamma: f64) -> DualOracle {
    let n = y.len();
    let k = kernel_matrix(x, gamma);
    let tol = 1e-9;
    let mut best: Option<DualOracle> = None;
    for code in 0..5usize.pow(n as u32) {
        let mut states = vec![0u8; n];
        let mut rest = code;
        for s in states.iter_mut() {
            *s = (rest % 5) as u8;
            rest /= 5;
        }
        let free: Vec<usize> = (0..n).filter(|&i| states[i] == 1 || states[i] == 3).collect();
        let mut beta: Vec<f64> = states
            .iter()
            .map(|s| match s {
                0 => -c,
                4 => c,
                _ => 0.0,
            })
            .collect();

        // unknowns: free β then b
        let m = free.len();
        let bias;
        if m > 0 {
            let mut lhs = DMatrix::<f64>::zeros(m + 1, m + 1);
            let mut rhs = DVector::<f64>::zeros(m + 1);
            for (r, &i) in free.iter().enumerate() {
                let sign = if states[i] == 3 { 1.0 } else { -1.0 };
                let fixed: f64 = (0..n)
                    .filter(|j| !free.contains(j))
                    .map(|j| k[(i, j)] * beta[j])
                    .sum();
                for (cidx, &j) in free.iter().enumerate() {
                    lhs[(r, cidx)] = k[(i, j)];
                }
                lhs[(r, m)] = 1.0;
                rhs[r] = y[i] - sign * eps - fixed;
            }
            for cidx in 0..m {
                lhs[(m, cidx)] = 1.0;
            }
            rhs[m] = -(0..n).filter(|j| !free.contains(j)).map(|j| beta[j]).sum::<f64>();
            let Some(sol) = lhs.lu().solve(&rhs) else {
                continue;
            };
            for (cidx, &i) in free.iter().enumerate() {
                beta[i] = sol[cidx];
            }
            bias = sol[m];
        } else {
            if beta.iter().sum::<f64>().abs() > tol {
                continue;
            }
            // bias interval from the inactive and bounded conditions
            let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
            for i in 0..n {
                let g: f64 = (0..n).map(|j| k[(i, j)] * beta[j]).sum();
                let r = y[i] - g;
                match states[i] {
                    2 => {
                        lo = lo.max(r - eps);
                        hi = hi.min(r + eps);
                    }
                    4 => hi = hi.min(r - eps),
                    0 => lo = lo.max(r + eps),
                    _ => unreachable!(),
                }
            }
            if lo > hi + tol {
                continue;
            }
            bias = if lo.is_finite() && hi.is_finite() {
                (lo + hi) / 2.0
            } else if lo.is_finite() {
                lo
            } else {
                hi
            };
        }

        // sign pattern and complementary conditions
        let mut ok = (beta.iter().sum::<f64>()).abs() <= 1e-9 * c;
        for i in 0..n {
            let f: f64 = bias + (0..n).map(|j| k[(i, j)] * beta[j]).sum::<f64>();
            let r = y[i] - f;
            ok &= match states[i] {
                1 => beta[i] < -tol && beta[i] > -c + tol,
                3 => beta[i] > tol && beta[i] < c - tol,
                2 => r.abs() <= eps + tol,
                4 => r >= eps - tol,
                0 => r <= -eps + tol,
                _ => unreachable!(),
            };
        }
        if !ok {
            continue;
        }
        let objective = dual_objective(&k, y, &beta, eps);
        if best.as_ref().is_none_or(|b| objective > b.objective) {
            best = Some(DualOracle {
                beta,
                bias,
                objective,
            });
        }
    }
    best.expect("the KKT system always has a solution")
}

pub fn five_point_instance(seed: u64) -> (Mat<f64>, Vec<f64>) {
    let mut rng = Rng::seed_from_u64(seed);
    let x = Mat::from_fn(5, 2, |_, _| rng.next_f64());
    let y = (0..5).map(|_| rng.next_f64()).collect();
    (x, y)
}

fn oracle_model(x: &Mat<f64>, o: &DualOracle, config: SvrConfig<f64>) -> SvrModel<f64> {
    let idx: Vec<usize> = (0..5).filter(|&i| o.beta[i].abs() > 1e-12).collect();
    SvrModel {
        support_inputs: x.select_rows(&idx),
        beta: idx.iter().map(|&i| o.beta[i]).collect(),
        support_indices: idx,
        beta0: o.bias,
        config,
        fit: FitInfo {
            converged: true,
            iterations: 0,
            passes: 0,
            kkt_gap: 0.0,
            objective_history: vec![],
        },
    }
}

const SVR_SETTINGS: [(f64, f64, f64); 4] = [
    (10.0, 0.05, 1.0),
    (1.0, 0.1, 2.0),
    (0.2, 0.01, 5.0),
    (1000.0, 0.1, 0.1),
];

pub fn smo_matches_brute_force() -> Check {
    let mut rng = Rng::seed_from_u64(77);
    let queries: Vec<Vec<f64>> = (0..8).map(|_| vec![rng.next_f64(), rng.next_f64()]).collect();
    for seed in 0..6 {
        let (x, y) = five_point_instance(seed);
        for &(c, eps, gamma) in &SVR_SETTINGS {
            // A gradient gap of 1e-3 bounds the objective error only up to
            // the distance β can travel, which is large for C = 1000 on a
            // nearly constant kernel; the exact comparison therefore runs the
            // solver to a tight gap.
            let config = SvrConfig {
                c,
                epsilon: eps,
                gamma,
                kkt_tol: 1e-8,
                ..SvrConfig::default()
            };
            let o = svr_oracle(&x, &y, c, eps, gamma);
            let m = SvrModel::train(&x, &y, config.clone()).map_err(|e| e.to_string())?;
            ensure!(m.fit.converged, "seed {seed} C {c}: not converged");
            let k = kernel_matrix(&x, gamma);
            let obj = dual_objective(&k, &y, &m.dense_beta(5), eps);
            ensure!(
                (obj - o.objective).abs() <= 1e-4,
                "seed {seed} C {c}: SMO {obj} vs oracle {}",
                o.objective
            );

            // the oracle solution itself is exactly optimal
            let om = oracle_model(&x, &o, config.clone());
            let rep = kkt_violations(&om, &x, &y, &o.beta).map_err(|e| e.to_string())?;
            ensure!(rep.max_violation <= 1e-6, "seed {seed} C {c}: oracle {rep:?}");

            // predictions agree wherever the oracle bias is pinned by a free
            // support vector
            let pinned = o.beta.iter().any(|b| b.abs() > 1e-9 && b.abs() < c - 1e-9);
            if pinned {
                for q in &queries {
                    let a = m.decision(q).unwrap();
                    let b = om.decision(q).unwrap();
                    ensure!((a - b).abs() <= 1e-3, "seed {seed} C {c}: {a} vs {b}");
                    let (pa, pb) = (m.predict(q).unwrap(), om.predict(q).unwrap());
                    ensure!((pa - pb).abs() <= 1e-3, "seed {seed} C {c}: clipped {pa} vs {pb}");
                }
            }
        }
    }
    Ok(())
}

pub fn smo_default_tolerance_well_conditioned() -> Check {
    for seed in 10..20 {
        let (x, y) = five_point_instance(seed);
        for &(c, eps, gamma) in &SVR_SETTINGS[..2] {
            let config = SvrConfig {
                c,
                epsilon: eps,
                gamma,
                ..SvrConfig::default()
            };
            let o = svr_oracle(&x, &y, c, eps, gamma);
            let m = SvrModel::train(&x, &y, config).map_err(|e| e.to_string())?;
            let obj = dual_objective(&kernel_matrix(&x, gamma), &y, &m.dense_beta(5), eps);
            ensure!(
                (obj - o.objective).abs() <= 1e-4,
                "seed {seed} C {c}: SMO {obj} vs oracle {}",
                o.objective
            );
        }
    }
    Ok(())
}

/// Trained models at default tolerance: feasibility and KKT gap.
pub fn smo_solutions_feasible() -> Check {
    for seed in 0..6 {
        let (x, y) = five_point_instance(seed);
        for &(c, eps, gamma) in &SVR_SETTINGS {
            let config = SvrConfig {
                c,
                epsilon: eps,
                gamma,
                ..SvrConfig::default()
            };
            let m = SvrModel::train(&x, &y, config).map_err(|e| e.to_string())?;
            let sum: f64 = m.beta.iter().sum();
            ensure!(sum.abs() <= 1e-9 * c, "seed {seed} C {c}: Σβ = {sum}");
            ensure!(m.beta.iter().all(|b| b.abs() <= c), "seed {seed} C {c}: |β| > C");
            ensure!(m.fit.converged, "seed {seed} C {c}: not converged");
            let rep = check_kkt(&m, &x, &y).map_err(|e| e.to_string())?;
            ensure!(
                rep.max_violation <= m.config.kkt_tol,
                "seed {seed} C {c}: KKT violation {} > {}",
                rep.max_violation,
                m.config.kkt_tol
            );
        }
    }
    Ok(())
}

fn toy_model(rng: &mut Rng, n_inputs: usize, n_mfs: usize) -> AnfisModel<f64> {
    let config = AnfisConfig {
        n_mfs,
        ..AnfisConfig::default()
    };
    let mut m = AnfisModel::new(&vec![(0.0, 1.0); n_inputs], config).unwrap();
    for row in m.mfs.iter_mut() {
        for mf in row.iter_mut() {
            *mf = GaussianMf {
                center: rng.uniform(-0.2, 1.2),
                width: rng.uniform(0.15, 0.8),
            };
        }
    }
    for c in m.consequents.iter_mut() {
        *c = rng.uniform(-1.0, 2.0);
    }
    m
}

/// The 2-input, 2-MF toy model and smaller ones, componentwise.
pub fn premise_gradient_central_differences() -> Check {
    let h = 1e-6;
    let mut rng = Rng::seed_from_u64(2024);
    for trial in 0..40 {
        let n_inputs = 1 + trial % 2;
        let n_mfs = 1 + (trial / 2) % 2;
        let model = toy_model(&mut rng, n_inputs, n_mfs);
        let rows = 3 + rng.below(10);
        let x = Mat::from_fn(rows, n_inputs, |_, _| rng.next_f64());
        let y: Vec<f64> = (0..rows).map(|_| rng.next_f64()).collect();
        let g = model.premise_gradient(&x, &y).map_err(|e| e.to_string())?;
        for i in 0..n_inputs {
            for j in 0..n_mfs {
                for (which, analytic) in [("center", g.d_center[i][j]), ("width", g.d_width[i][j])] {
                    let eval = |delta: f64| {
                        let mut m = model.clone();
                        if which == "center" {
                            m.mfs[i][j].center += delta;
                        } else {
                            m.mfs[i][j].width += delta;
                        }
                        m.mse(&x, &y).unwrap()
                    };
                    let numeric = (eval(h) - eval(-h)) / (2.0 * h);
                    let scale = analytic.abs().max(numeric.abs()).max(1e-6);
                    let rel = (analytic - numeric).abs() / scale;
                    ensure!(
                        rel <= 1e-4,
                        "trial {trial} {which}[{i}][{j}]: analytic {analytic}, numeric {numeric}"
                    );
                }
            }
        }
    }
    Ok(())
}
