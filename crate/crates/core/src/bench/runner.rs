use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::config::{Method, RunConfig};
use super::metrics::mse;
use super::report::{Cell, CellTiming, EvalReport, ReportMeta, SeedResult};
use crate::anfis::AnfisModel;
use crate::data::{encode_features, load_raw, prepare, Dataset, EncodedTable, SplitSpec, Target};
use crate::error::{Error, Result};
use crate::esn::{EsnConfig, EsnModel};
use crate::numerics::derive_seed;
use crate::svr::SvrModel;

/// Train and test MSE of one fitted model, plus its JSON dump.
#[derive(Clone, Debug, PartialEq)]
pub struct Scored {
    pub train_mse: f64,
    pub test_mse: f64,
    pub dump: serde_json::Value,
}

/// Reservoir seed for one (run seed, target) job.
pub fn esn_seed(base: u64, run_seed: u64, target: Target) -> u64 {
    derive_seed(base, derive_seed(run_seed, target.index() as u64))
}

fn to_json<T: Serialize>(v: &T) -> Result<serde_json::Value> {
    Ok(serde_json::to_value(v)?)
}

/// Fits `method` on the training rows of `data` for `target` and scores it on
/// both sides of the split. All MSEs are on the scaled `[0, 1]` targets.
pub fn fit_and_score(
    method: Method,
    target: Target,
    config: &RunConfig,
    run_seed: u64,
    data: &Dataset,
    train: &[usize],
    test: &[usize],
) -> Result<Scored> {
    let (train_v, test_v) = (data.view(train.to_vec()), data.view(test.to_vec()));
    let (x_train, y_train) = (train_v.features(), train_v.target(target));
    let (x_test, y_test) = (test_v.features(), test_v.target(target));
    match method {
        Method::Baseline => {
            let mean = y_train.iter().sum::<f64>() / y_train.len() as f64;
            Ok(Scored {
                train_mse: mse(&vec![mean; y_train.len()], &y_train)?,
                test_mse: mse(&vec![mean; y_test.len()], &y_test)?,
                dump: serde_json::json!({ "mean": mean }),
            })
        }
        Method::Esn => {
            let cfg = EsnConfig {
                seed: esn_seed(config.esn.seed, run_seed, target),
                ..config.esn.clone()
            };
            let model = EsnModel::new(x_train.cols(), cfg)?.train_readout(&x_train, &y_train)?;
            let states = model.run_reservoir(&x_train, &vec![0.0; model.reservoir_size()])?;
            // the readout is fitted on the post-washout rows only
            let w = model.config.washout;
            let fitted = model.readout(&states);
            Ok(Scored {
                train_mse: mse(&fitted[w..], &y_train[w..])?,
                test_mse: mse(&model.predict(&x_test)?, &y_test)?,
                dump: to_json(&model.dump())?,
            })
        }
        Method::Svr => {
            let model = SvrModel::train(&x_train, &y_train, config.svr.clone())?;
            Ok(Scored {
                train_mse: mse(&model.predict_rows(&x_train)?, &y_train)?,
                test_mse: mse(&model.predict_rows(&x_test)?, &y_test)?,
                dump: to_json(&model.dump())?,
            })
        }
        Method::Anfis => {
            let ranges = vec![(0.0, 1.0); x_train.cols()];
            let mut model = AnfisModel::new(&ranges, config.anfis.clone())?;
            model.train_hybrid(&x_train, &y_train)?;
            Ok(Scored {
                train_mse: mse(&model.predict_rows(&x_train)?, &y_train)?,
                test_mse: mse(&model.predict_rows(&x_test)?, &y_test)?,
                dump: to_json(&model.dump())?,
            })
        }
    }
}

/// Loads the configured file and runs every requested cell.
pub fn run_experiment(config: &RunConfig) -> Result<EvalReport> {
    let raw = load_raw(&config.data_path)?;
    let encoded = encode_features(&raw)?;
    run_on_table(config, &encoded)
}

/// Runs every (seed, method, target) job in parallel on an encoded table.
///
/// A failing job marks its cell failed; the other cells still complete.
pub fn run_on_table(config: &RunConfig, encoded: &EncodedTable) -> Result<EvalReport> {
    config.validate()?;
    let methods = config.methods();
    let targets = config.requested_targets();
    let prepared: Vec<(Dataset, Vec<usize>, Vec<usize>)> = config
        .seeds
        .iter()
        .map(|&seed| {
            prepare(
                encoded,
                &SplitSpec {
                    seed,
                    ..config.split
                },
            )
        })
        .collect::<Result<_>>()?;

    let mut jobs: Vec<(usize, Method, Target)> = Vec::new();
    for s in 0..config.seeds.len() {
        for &m in &methods {
            for &t in &targets {
                jobs.push((s, m, t));
            }
        }
    }
    let outcomes: Vec<(Result<Scored>, f64)> = jobs
        .par_iter()
        .map(|&(s, m, t)| {
            let (data, train, test) = &prepared[s];
            let start = Instant::now();
            let r = fit_and_score(m, t, config, config.seeds[s], data, train, test);
            (r, start.elapsed().as_secs_f64())
        })
        .collect();

    let mut cells: Vec<Cell> = methods
        .iter()
        .flat_map(|&m| targets.iter().map(move |&t| Cell::new(m, t)))
        .collect();
    let mut timings = Vec::with_capacity(jobs.len());
    let mut dumps = Vec::new();
    for (&(s, m, t), (outcome, seconds)) in jobs.iter().zip(outcomes) {
        let seed = config.seeds[s];
        let cell = cells
            .iter_mut()
            .find(|c| c.method == m && c.target == t)
            .expect("cell for every job");
        timings.push(CellTiming {
            method: m,
            target: t,
            seed,
            seconds,
        });
        match outcome {
            Ok(scored) => {
                cell.runs.push(SeedResult {
                    seed,
                    train_mse: scored.train_mse,
                    test_mse: scored.test_mse,
                });
                if config.dump_models && m != Method::Baseline {
                    dumps.push((format!("{m}_{t}_seed{seed}.json"), scored.dump));
                }
            }
            Err(e) => {
                if cell.error.is_none() {
                    cell.error = Some(format!("seed {seed}: {e}"));
                }
            }
        }
    }
    for cell in cells.iter_mut() {
        if cell.error.is_some() {
            cell.runs.clear();
        }
    }

    Ok(EvalReport {
        meta: ReportMeta {
            seeds: config.seeds.clone(),
            n_train: config.split.n_train,
            shuffle: config.split.shuffle,
            rows: encoded.len(),
            dropped_rows: encoded.dropped_rows.len(),
            config_digest: config.digest(),
        },
        cells,
        timings,
        dumps,
    })
}

/// Trains one model on the split of `seed` and returns its scores and dump.
pub fn train_single(
    config: &RunConfig,
    encoded: &EncodedTable,
    method: Method,
    target: Target,
    seed: u64,
) -> Result<Scored> {
    if encoded.is_empty() {
        return Err(Error::InvalidArgument("no usable rows".into()));
    }
    let (data, train, test) = prepare(
        encoded,
        &SplitSpec {
            seed,
            ..config.split
        },
    )?;
    fit_and_score(method, target, config, seed, &data, &train, &test)
}
