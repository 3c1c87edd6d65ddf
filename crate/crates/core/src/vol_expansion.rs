//! First-order expansion of the defaultable price in the intensity volatility.
//!
//! With `λ(s)` the deterministic path started at `λ` at time `t`,
//!
//! ```text
//! u ≈ e^{−∫ₜᵀ λ(s) ds} [c_BS − ρση e^{x − σ²(T−t)/2} N(d₁) Λ]
//! Λ = ∫ₜᵀ ∫ᵤᵀ e^{−γ(s−u)} √λ(u) ds du
//! ```

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::analytic::{bs_call, d1_d2, integrated_mean_path, mean_path};
use crate::config::{LambdaOrder, NumericsConfig};
use crate::error::{CvaError, Result};
use crate::model::{CirParams, Contract, CvaResult, Method, ModelParams};
use crate::numerics::{normal_cdf, try_integrate, QuadratureSpec};
use crate::scalar::Real;

/// Terms of the expansion at a fixed state; the correction is linear in `ρ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolExpTerms<T> {
    /// `e^{−∫ₜᵀ λ(s) ds}`.
    pub det_survival: T,
    pub bs: T,
    pub lambda_capital: T,
    /// `ση e^{x − σ²(T−t)/2} N(d₁) Λ`, the correction per unit correlation.
    pub correction_slope: T,
}

impl<T: Real> VolExpTerms<T> {
    pub fn correction(&self, rho: T) -> T {
        rho * self.correction_slope
    }

    pub fn price(&self, rho: T) -> T {
        self.det_survival * (self.bs - self.correction(rho))
    }
}

/// `λ(s) = λ e^{−γ(s−t)} + θ(1 − e^{−γ(s−t)})`.
pub fn deterministic_intensity<T: Real>(s: T, lambda0: T, t: T, cir: &CirParams<T>) -> T {
    mean_path(s - t, &cir.with_lambda0(lambda0))
}

/// `Λ(λ, t, T)` in the default nesting.
pub fn lambda_capital<T: Real>(lambda0: T, t: T, maturity: T, cir: &CirParams<T>, quad: &QuadratureSpec<T>) -> Result<T> {
    lambda_capital_with(lambda0, t, maturity, cir, LambdaOrder::OuterU, quad)
}

/// `Λ` by nested quadrature in the requested order.
pub fn lambda_capital_with<T: Real>(
    lambda0: T,
    t: T,
    maturity: T,
    cir: &CirParams<T>,
    order: LambdaOrder,
    quad: &QuadratureSpec<T>,
) -> Result<T> {
    if !(t < maturity) {
        return Err(CvaError::domain("lambda_capital", format!("t = {t} must precede T = {maturity}")));
    }
    let kernel = |s: T, u: T| (-cir.gamma * (s - u)).exp() * deterministic_intensity(u, lambda0, t, cir).sqrt();
    match order {
        LambdaOrder::OuterU => try_integrate(
            |u| try_integrate(|s| Ok(kernel(s, u)), u, maturity, quad),
            t,
            maturity,
            quad,
        ),
        LambdaOrder::OuterS => try_integrate(
            |s| try_integrate(|u| Ok(kernel(s, u)), s, maturity, quad),
            t,
            maturity,
            quad,
        ),
    }
}

/// Expansion terms at `(x, λ, t)`.
#[allow(clippy::too_many_arguments)]
pub fn vol_expansion_terms<T: Real>(
    x: T,
    lambda0: T,
    t: T,
    maturity: T,
    params: &ModelParams<T>,
    strike: T,
    order: LambdaOrder,
    quad: &QuadratureSpec<T>,
) -> Result<VolExpTerms<T>> {
    let sigma = params.equity.sigma;
    let r = params.rate.r;
    let cir = &params.cir;
    let remaining = maturity - t;
    let bs = bs_call(x, t, maturity, sigma, r, strike)?;
    let det_survival = (-integrated_mean_path(remaining, &cir.with_lambda0(lambda0))).exp();
    let lambda_capital = lambda_capital_with(lambda0, t, maturity, cir, order, quad)?;
    let (d1, _) = d1_d2(x, remaining, sigma, r, strike.ln());
    let correction_slope =
        sigma * cir.eta * (x - sigma * sigma * remaining / T::lit(2.0)).exp() * normal_cdf(d1) * lambda_capital;
    Ok(VolExpTerms {
        det_survival,
        bs,
        lambda_capital,
        correction_slope,
    })
}

/// Defaultable price from the volatility expansion.
#[allow(clippy::too_many_arguments)]
pub fn price_vol_expansion<T: Real>(
    x: T,
    lambda0: T,
    t: T,
    maturity: T,
    rho: T,
    params: &ModelParams<T>,
    strike: T,
    quad: &QuadratureSpec<T>,
) -> Result<T> {
    Ok(vol_expansion_terms(x, lambda0, t, maturity, params, strike, LambdaOrder::OuterU, quad)?.price(rho))
}

/// Time-zero expansion terms reusable across correlations.
#[derive(Debug, Clone, Copy)]
pub struct VolatilityExpansion<T> {
    pub terms: VolExpTerms<T>,
    pub loss_given_default: T,
    pub setup_s: f64,
}

impl<T: Real> VolatilityExpansion<T> {
    pub fn new(params: &ModelParams<T>, contract: &Contract<T>, numerics: &NumericsConfig<T>) -> Result<Self> {
        let start = Instant::now();
        let terms = vol_expansion_terms(
            params.equity.log_spot(),
            params.cir.lambda0,
            T::zero(),
            contract.maturity,
            params,
            contract.strike,
            numerics.lambda_order,
            &numerics.quad(),
        )?;
        Ok(Self {
            terms,
            loss_given_default: contract.loss_given_default(),
            setup_s: start.elapsed().as_secs_f64(),
        })
    }

    /// `(1 − R)(c_BS − u(ρ))`.
    pub fn cva(&self, rho: T) -> T {
        self.loss_given_default * (self.terms.bs - self.terms.price(rho))
    }

    pub fn result(&self, rho: T) -> CvaResult<T> {
        CvaResult {
            method: Method::VolExp,
            value: self.cva(rho),
            ci_halfwidth: None,
            runtime_s: self.setup_s,
        }
    }
}

/// CVA from the volatility expansion.
pub fn cva_vol_expansion<T: Real>(
    params: &ModelParams<T>,
    contract: &Contract<T>,
    rho: T,
    numerics: &NumericsConfig<T>,
) -> Result<CvaResult<T>> {
    Ok(VolatilityExpansion::new(params, contract, numerics)?.result(rho))
}
