//! CVA under the wrong-way measure with a deterministic intensity proxy.
//!
//! Under the measure associated with the numéraire `B(0,·)·E[λ_t S_t | F_·]`
//! the log-price picks up the drift `σθ(u, t)`, and the expected exposure of
//! the call at `t` becomes a Black–Scholes value with the spot shifted by
//! `σΘ(t)`, `Θ(t) = ∫₀ᵗ θ(u, t) du`.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::analytic::{cir_bond_derivatives, cir_bond_factors, default_density, mean_path};
use crate::config::NumericsConfig;
use crate::error::{CvaError, Result};
use crate::model::{CirParams, Contract, CvaResult, Method, ModelParams};
use crate::numerics::{normal_cdf, try_integrate, QuadratureSpec};
use crate::scalar::Real;

/// Deterministic stand-in for the intensity inside the drift.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProxyChoice {
    /// `λ(t) = E[λ_t]`.
    #[default]
    MeanPath,
}

impl ProxyChoice {
    pub fn intensity<T: Real>(self, t: T, cir: &CirParams<T>) -> T {
        match self {
            ProxyChoice::MeanPath => mean_path(t, cir),
        }
    }
}

/// One point of the exposure profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriftAdjustedTerm<T> {
    pub t: T,
    pub theta_big: T,
    /// Discounted expected exposure under the wrong-way measure.
    pub epe: T,
    /// Default density `−G′(t)`.
    pub dg: T,
}

/// Drift `θ_u^s(λ) = ρη√λ·(B₂′/(B₂′λ + B₁′) − B₂)`, factors at `τ = s − u`.
pub fn theta_drift<T: Real>(u: T, s: T, lambda_proxy: T, rho: T, cir: &CirParams<T>) -> Result<T> {
    if !(u <= s) {
        return Err(CvaError::domain("theta_drift", format!("u = {u} must not exceed s = {s}")));
    }
    if !(lambda_proxy > T::zero()) {
        return Err(CvaError::domain("theta_drift", format!("proxy intensity {lambda_proxy} must be positive")));
    }
    let tau = s - u;
    let bond = cir_bond_factors(tau, cir);
    let d = cir_bond_derivatives(tau, cir);
    let den = d.db2 * lambda_proxy + d.db1;
    if den.abs() < T::lit(1e-14) {
        return Err(CvaError::domain(
            "theta_drift",
            format!("vanishing denominator {den} (B2' = {}, B1' = {}, lambda = {lambda_proxy}, tau = {tau})", d.db2, d.db1),
        ));
    }
    Ok(rho * cir.eta * lambda_proxy.sqrt() * (d.db2 / den - bond.b2))
}

/// `Θ(t) = ∫₀ᵗ θ(u, t) du` with `θ(u, t) = θ_u^t(λ(u))`.
pub fn big_theta<T: Real>(t: T, rho: T, cir: &CirParams<T>, proxy: ProxyChoice, quad: &QuadratureSpec<T>) -> Result<T> {
    if !(t >= T::zero()) {
        return Err(CvaError::domain("big_theta", format!("t = {t} must be nonnegative")));
    }
    if t == T::zero() || rho == T::zero() {
        return Ok(T::zero());
    }
    try_integrate(
        |u| theta_drift(u, t, proxy.intensity(u, cir), rho, cir),
        T::zero(),
        t,
        quad,
    )
}

/// `E^{wwm}[c(t,T)/B(0,t)]`:
///
/// ```text
/// e^{x₀+σΘ} N((α̂ + βσ√t)/√(1+β²)) − e^{κ−rT} N((α̂ − σ√(T−t))/√(1+β²))
/// α(t) = (x₀ − κ + (r + σ²/2)T − σ²t)/(σ√(T−t)),  β(t) = √(t/(T−t)),
/// α̂(t) = α(t) + Θ/√(T−t)
/// ```
pub fn epe_closed_form<T: Real>(t: T, params: &ModelParams<T>, contract: &Contract<T>, theta_big: T) -> Result<T> {
    let maturity = contract.maturity;
    if !(t >= T::zero() && t < maturity) {
        return Err(CvaError::domain("epe_closed_form", format!("need 0 <= t < T, got t = {t}, T = {maturity}")));
    }
    let half = T::lit(0.5);
    let sigma = params.equity.sigma;
    let r = params.rate.r;
    let x0 = params.equity.log_spot();
    let kappa = contract.log_strike();
    let remaining = maturity - t;
    let root_remaining = remaining.sqrt();
    let alpha = (x0 - kappa + (r + half * sigma * sigma) * maturity - sigma * sigma * t) / (sigma * root_remaining);
    let beta = (t / remaining).sqrt();
    let alpha_hat = alpha + theta_big / root_remaining;
    let scale = (T::one() + beta * beta).sqrt();
    let long = (x0 + sigma * theta_big).exp() * normal_cdf((alpha_hat + beta * sigma * t.sqrt()) / scale);
    let short = (kappa - r * maturity).exp() * normal_cdf((alpha_hat - sigma * root_remaining) / scale);
    Ok((long - short).max(T::zero()))
}

/// Exposure profile point at `t`.
pub fn drift_adjusted_term<T: Real>(
    t: T,
    params: &ModelParams<T>,
    contract: &Contract<T>,
    proxy: ProxyChoice,
    quad: &QuadratureSpec<T>,
) -> Result<DriftAdjustedTerm<T>> {
    let theta_big = big_theta(t, params.corr.rho, &params.cir, proxy, quad)?;
    Ok(DriftAdjustedTerm {
        t,
        theta_big,
        epe: epe_closed_form(t, params, contract, theta_big)?,
        dg: default_density(t, &params.cir),
    })
}

/// `(1 − R)∫₀ᵀ EPE(t)·(−G′(t)) dt` at correlation `rho`.
pub fn cva_drift_adjust<T: Real>(
    params: &ModelParams<T>,
    contract: &Contract<T>,
    rho: T,
    numerics: &NumericsConfig<T>,
) -> Result<CvaResult<T>> {
    let start = Instant::now();
    let params = params.with_rho(rho);
    let quad = numerics.quad();
    let integral = try_integrate(
        |t| {
            let term = drift_adjusted_term(t, &params, contract, ProxyChoice::MeanPath, &quad)
                .map_err(CvaError::at_point("drift-adjusted exposure", t.as_f64()))?;
            Ok(term.epe * term.dg)
        },
        T::zero(),
        contract.maturity,
        &quad,
    )?;
    Ok(CvaResult {
        method: Method::DriftAdj,
        value: contract.loss_given_default() * integral,
        ci_halfwidth: None,
        runtime_s: start.elapsed().as_secs_f64(),
    })
}
