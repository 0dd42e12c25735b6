//! Echo state network, ε-support vector regression and zero-order Sugeno
//! ANFIS regressors, written from scratch, together with the ingestion,
//! evaluation and reporting harness used to compare them on the UCI
//! "Facebook metrics" post-performance dataset.
//!
//! All model code is generic over the floating point type through
//! [`Real`]; the aliases at the crate root fix it to `f64`, which is what the
//! benchmark harness uses.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod anfis;
pub mod bench;
pub mod data;
pub mod error;
pub mod esn;
pub mod format;
pub mod numerics;
pub mod scalar;
pub mod svr;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Mat64 = numerics::Mat<f64>;
pub type Mat32 = numerics::Mat<f32>;

pub type EsnConfig = esn::EsnConfig<f64>;
pub type EsnModel = esn::EsnModel<f64>;
pub type EsnModel32 = esn::EsnModel<f32>;

pub type SvrConfig = svr::SvrConfig<f64>;
pub type SvrModel = svr::SvrModel<f64>;
pub type SvrModel32 = svr::SvrModel<f32>;

pub type AnfisConfig = anfis::AnfisConfig<f64>;
pub type AnfisModel = anfis::AnfisModel<f64>;
pub type AnfisModel32 = anfis::AnfisModel<f32>;
