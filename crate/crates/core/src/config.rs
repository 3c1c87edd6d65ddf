//! TOML run configuration and numerical settings.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::analytic::MixedRoute;
use crate::error::{CvaError, Result};
use crate::model::{self, CirParams, Contract, Correlation, EquityParams, ModelParams, RateParams};
use crate::montecarlo::McConfig;
use crate::numerics::{QuadratureSpec, SeriesSpec};
use crate::scalar::Real;

/// How the outer `α`-integral of `g1` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum G1Mode {
    /// Adaptive Gauss–Kronrod directly on `[t, T]`.
    #[default]
    Adaptive,
    /// Integrand sampled on a fixed grid, spline-interpolated, then integrated.
    Grid,
}

/// Nesting of the double integral in the volatility expansion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LambdaOrder {
    /// `∫ₜᵀ du ∫ᵤᵀ ds e^{−γ(s−u)} √λ(u)`.
    #[default]
    OuterU,
    /// `∫ₜᵀ ds ∫ₛᵀ du e^{−γ(s−u)} √λ(u)`.
    OuterS,
}

/// Tolerances and algorithm switches shared by the analytic methods.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NumericsConfig<T> {
    pub abs_tol: T,
    pub rel_tol: T,
    pub max_subdivisions: usize,
    pub max_order: usize,
    pub tail_tol: T,
    /// Number of nodes used by [`G1Mode::Grid`].
    pub alpha_grid_points: usize,
    pub g1_mode: G1Mode,
    pub mixed_route: MixedRoute,
    pub lambda_order: LambdaOrder,
}

impl<T: Real> Default for NumericsConfig<T> {
    fn default() -> Self {
        let quad = QuadratureSpec::<T>::default();
        let series = SeriesSpec::<T>::default();
        Self {
            abs_tol: quad.abs_tol,
            rel_tol: quad.rel_tol,
            max_subdivisions: quad.max_subdivisions,
            max_order: series.max_order,
            tail_tol: series.tail_tol,
            alpha_grid_points: 64,
            g1_mode: G1Mode::default(),
            mixed_route: MixedRoute::default(),
            lambda_order: LambdaOrder::default(),
        }
    }
}

impl<T: Real> NumericsConfig<T> {
    pub fn quad(&self) -> QuadratureSpec<T> {
        QuadratureSpec {
            abs_tol: self.abs_tol,
            rel_tol: self.rel_tol,
            max_subdivisions: self.max_subdivisions,
        }
    }

    pub fn series(&self) -> SeriesSpec<T> {
        SeriesSpec {
            max_order: self.max_order,
            tail_tol: self.tail_tol,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        for r in [self.quad().validate(), self.series().validate()] {
            if let Err(CvaError::Validation(e)) = r {
                errs.extend(e);
            }
        }
        if self.alpha_grid_points < 4 {
            errs.push("alpha_grid_points must be at least 4".into());
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(CvaError::Validation(errs))
        }
    }
}

/// A complete run description as read from TOML.
///
/// ```toml
/// [equity]
/// s0 = 100.0
/// sigma = 0.1
/// [rate]
/// r = 0.0
/// [cir]
/// lambda0 = 0.04
/// gamma = 0.2
/// theta = 0.05
/// eta = 0.1
/// [contract]
/// strike = 100.0
/// maturity = 1.0
/// recovery = 0.0
/// ```
///
/// `[correlation]`, `[numerics]` and `[mc]` are optional.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub equity: EquityParams<f64>,
    pub rate: RateParams<f64>,
    pub cir: CirParams<f64>,
    pub contract: Contract<f64>,
    #[serde(default)]
    pub correlation: Correlation<f64>,
    #[serde(default)]
    pub numerics: NumericsConfig<f64>,
    #[serde(default)]
    pub mc: McConfig,
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CvaError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| CvaError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn params(&self) -> ModelParams<f64> {
        ModelParams {
            equity: self.equity,
            rate: self.rate,
            cir: self.cir,
            corr: self.correlation,
        }
    }

    /// Validates model, contract, numerics and simulation settings together.
    pub fn validate(&self) -> Result<model::Validation> {
        let mut errs = Vec::new();
        let validation = match model::validate(&self.params(), &self.contract) {
            Ok(v) => Some(v),
            Err(CvaError::Validation(e)) => {
                errs.extend(e);
                None
            }
            Err(e) => return Err(e),
        };
        for r in [self.numerics.validate(), self.mc.validate()] {
            if let Err(CvaError::Validation(e)) = r {
                errs.extend(e);
            }
        }
        match validation {
            Some(v) if errs.is_empty() => Ok(v),
            _ => Err(CvaError::Validation(errs)),
        }
    }
}
