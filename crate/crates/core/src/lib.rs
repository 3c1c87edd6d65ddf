//! Credit valuation adjustment of a European call under wrong-way risk.
//!
//! The underlying follows a geometric Brownian motion, the counterparty's
//! default intensity a CIR process, and the two drivers are correlated.
//! Four estimators are provided:
//!
//! * [`corr_expansion`]: first-order expansion of the defaultable price in the
//!   correlation, `g0 + ρ·g1`;
//! * [`vol_expansion`]: first-order expansion in the volatility of the intensity;
//! * [`drift_adjustment`]: wrong-way measure with a deterministic intensity proxy;
//! * [`montecarlo`]: Euler simulation with a control variate, used as the benchmark.
//!
//! All numerics are generic over [`Real`] (`f32` or `f64`); the aliases at
//! the crate root fix the scalar to `f64`.

// Negated comparisons reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod config;
pub mod corr_expansion;
pub mod drift_adjustment;
pub mod error;
pub mod model;
pub mod montecarlo;
pub mod numerics;
pub mod scalar;
pub mod vol_expansion;

pub use error::{CvaError, Result};
pub use model::Method;
pub use scalar::Real;

pub type EquityParams = model::EquityParams<f64>;
pub type CirParams = model::CirParams<f64>;
pub type RateParams = model::RateParams<f64>;
pub type Contract = model::Contract<f64>;
pub type Correlation = model::Correlation<f64>;
pub type ModelParams = model::ModelParams<f64>;
pub type CvaResult = model::CvaResult<f64>;
pub type QuadratureSpec = numerics::QuadratureSpec<f64>;
pub type SeriesSpec = numerics::SeriesSpec<f64>;
pub type NumericsConfig = config::NumericsConfig<f64>;
pub type CirBondFactors = analytic::CirBondFactors<f64>;
pub type G1Breakdown = corr_expansion::G1Breakdown<f64>;
pub type DriftAdjustedTerm = drift_adjustment::DriftAdjustedTerm<f64>;
pub type VolExpTerms = vol_expansion::VolExpTerms<f64>;
pub use config::RunConfig;
pub use montecarlo::{McConfig, McEstimate};
