//! First-order expansion of the defaultable price in the correlation.
//!
//! `ū(ρ) = g0 + ρ·g1` where `g0` is the independence price and
//!
//! ```text
//! g1 = −ησ ∫ₜᵀ e^{−r(α−t)} B₂(T−α) e^{−B₁(T−α)}
//!          · E[√λ_α e^{−B₂(T−α)λ_α − ∫ₜ^α λ}] · E[e^{X_α} N(d₁(X_α, T−α))] dα
//! ```
//!
//! with both expectations taken under independence.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{bs_call, cir_bond_factors, d1_d2, g0, mixed_cir_expectation_with, StateWeight, MIN_HORIZON};
use crate::config::{G1Mode, NumericsConfig};
use crate::error::{CvaError, Result};
use crate::model::{Contract, CvaResult, Method, ModelParams};
use crate::numerics::{normal_cdf, normal_pdf, try_integrate, try_integrate_detailed, QuadratureSpec};
use crate::scalar::Real;

/// Number of standard deviations covered by the Gaussian window of
/// [`equity_factor`].
pub const EQUITY_WINDOW_SD: f64 = 12.0;

/// `g1` together with its integrand sampled on `[t, T]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct G1Breakdown<T> {
    pub g1: T,
    pub alpha_grid: Vec<T>,
    /// Nonnegative integrand `Γ(t,α,T)·E₁(α)·E₂(α)`; `g1` is minus its integral.
    pub integrand_values: Vec<T>,
}

/// `E[e^{X_α} N(d₁(X_α, T−α))]` for `X_α ~ N(x + (r−σ²/2)(α−t), σ²(α−t))`.
///
/// After completing the square this is `e^{m+v/2}·E[N(d₁(m + v + √v·Z))]`,
/// integrated over `|Z| ≤ 12`.
#[allow(clippy::too_many_arguments)]
pub fn equity_factor<T: Real>(
    x: T,
    t: T,
    alpha: T,
    maturity: T,
    sigma: T,
    r: T,
    strike: T,
    quad: &QuadratureSpec<T>,
) -> Result<T> {
    if !(t <= alpha && alpha <= maturity) {
        return Err(CvaError::domain(
            "equity_factor",
            format!("need t <= alpha <= T, got t = {t}, alpha = {alpha}, T = {maturity}"),
        ));
    }
    let half = T::lit(0.5);
    let log_strike = strike.ln();
    let elapsed = alpha - t;
    let remaining = maturity - alpha;
    if elapsed <= T::lit(MIN_HORIZON) {
        if remaining <= T::zero() {
            return Ok(if x > log_strike { x.exp() } else { T::zero() });
        }
        return Ok(x.exp() * normal_cdf(d1_d2(x, remaining, sigma, r, log_strike).0));
    }
    let var = sigma * sigma * elapsed;
    let sd = var.sqrt();
    let mean = x + (r - half * sigma * sigma) * elapsed;
    let shifted = mean + var;
    let weight = (mean + half * var).exp();
    let inner = |z: T| {
        let y = shifted + sd * z;
        let cdf = if remaining <= T::zero() {
            if y > log_strike {
                T::one()
            } else {
                T::zero()
            }
        } else {
            normal_cdf(d1_d2(y, remaining, sigma, r, log_strike).0)
        };
        Ok(normal_pdf(z) * cdf)
    };
    let width = T::lit(EQUITY_WINDOW_SD);
    // Split at the point where N(d₁) switches so short residual maturities
    // do not hide the step from the Kronrod nodes.
    let switch = (log_strike - (r + half * sigma * sigma) * remaining - shifted) / sd;
    let integral = if switch > -width && switch < width {
        try_integrate(inner, -width, switch, quad)? + try_integrate(inner, switch, width, quad)?
    } else {
        try_integrate(inner, -width, width, quad)?
    };
    Ok(weight * integral)
}

/// Integrand of `−g1` at `alpha`, with the `α → t` and `α → T` limits.
#[allow(clippy::too_many_arguments)]
fn g1_integrand<T: Real>(
    alpha: T,
    x: T,
    lambda0: T,
    t: T,
    maturity: T,
    params: &ModelParams<T>,
    strike: T,
    numerics: &NumericsConfig<T>,
) -> Result<T> {
    let remaining = maturity - alpha;
    if remaining <= T::zero() {
        return Ok(T::zero());
    }
    let cir = &params.cir;
    let sigma = params.equity.sigma;
    let r = params.rate.r;
    let quad = numerics.quad();
    let series = numerics.series();
    let bond = cir_bond_factors(remaining, cir);
    let prefactor = cir.eta * sigma * (-r * (alpha - t)).exp() * bond.b2 * (-bond.b1).exp();
    let intensity = mixed_cir_expectation_with(
        bond.b2,
        lambda0,
        t,
        alpha,
        cir,
        StateWeight::Sqrt,
        numerics.mixed_route,
        &series,
        &quad,
    )?;
    let equity = equity_factor(x, t, alpha, maturity, sigma, r, strike, &quad)?;
    Ok(prefactor * intensity * equity)
}

/// First-order correlation coefficient `g1 ≤ 0` at `(x, λ0, t)`.
#[allow(clippy::too_many_arguments)]
pub fn g1<T: Real>(
    x: T,
    lambda0: T,
    t: T,
    maturity: T,
    params: &ModelParams<T>,
    strike: T,
    numerics: &NumericsConfig<T>,
) -> Result<G1Breakdown<T>> {
    if !(t < maturity) {
        return Err(CvaError::domain("g1", format!("t = {t} must precede T = {maturity}")));
    }
    let eval = |alpha: T| {
        g1_integrand(alpha, x, lambda0, t, maturity, params, strike, numerics)
            .map_err(CvaError::at_point("g1 integrand", alpha.as_f64()))
    };
    match numerics.g1_mode {
        G1Mode::Adaptive => {
            let mut samples = vec![(t, eval(t)?), (maturity, T::zero())];
            let integral = try_integrate_detailed(
                |alpha| {
                    let v = eval(alpha)?;
                    samples.push((alpha, v));
                    Ok(v)
                },
                t,
                maturity,
                &numerics.quad(),
            )?;
            samples.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
            samples.dedup_by(|a, b| a.0 == b.0);
            let (alpha_grid, integrand_values) = samples.into_iter().unzip();
            Ok(G1Breakdown {
                g1: -integral.value,
                alpha_grid,
                integrand_values,
            })
        }
        G1Mode::Grid => {
            let n = numerics.alpha_grid_points;
            let step = (maturity - t) / T::from_usize(n - 1).unwrap_or_else(T::one);
            let alpha_grid: Vec<T> = (0..n)
                .map(|i| if i + 1 == n { maturity } else { t + step * T::from_usize(i).unwrap_or_else(T::zero) })
                .collect();
            let integrand_values = alpha_grid.par_iter().map(|&a| eval(a)).collect::<Result<Vec<T>>>()?;
            let integral = natural_spline_integral(step, &integrand_values);
            Ok(G1Breakdown {
                g1: -integral,
                alpha_grid,
                integrand_values,
            })
        }
    }
}

/// Exact integral of the natural cubic spline through equally spaced samples.
fn natural_spline_integral<T: Real>(step: T, ys: &[T]) -> T {
    let n = ys.len();
    let two = T::lit(2.0);
    let trapezoid = ys.windows(2).fold(T::zero(), |acc, w| acc + (w[0] + w[1]) * step / two);
    if n < 3 {
        return trapezoid;
    }
    // Second derivatives from the tridiagonal system, Thomas algorithm.
    let m = n - 2;
    let six = T::lit(6.0);
    let mut diag = vec![T::lit(4.0); m];
    let mut rhs: Vec<T> = (1..n - 1)
        .map(|i| six * (ys[i + 1] - two * ys[i] + ys[i - 1]) / (step * step))
        .collect();
    for i in 1..m {
        let w = T::one() / diag[i - 1];
        diag[i] = diag[i] - w;
        rhs[i] = rhs[i] - w * rhs[i - 1];
    }
    let mut curv = vec![T::zero(); n];
    for i in (0..m).rev() {
        let next = if i + 1 < m { curv[i + 2] } else { T::zero() };
        curv[i + 1] = (rhs[i] - next) / diag[i];
    }
    let correction = curv.windows(2).fold(T::zero(), |acc, w| acc + w[0] + w[1]);
    trapezoid - correction * step * step * step / T::lit(24.0)
}

/// `ū = g0 + ρ·g1`.
#[allow(clippy::too_many_arguments)]
pub fn price_first_order<T: Real>(
    x: T,
    lambda0: T,
    t: T,
    maturity: T,
    rho: T,
    params: &ModelParams<T>,
    strike: T,
    numerics: &NumericsConfig<T>,
) -> Result<T> {
    let zeroth = g0(x, lambda0, t, maturity, params, strike)?;
    if rho == T::zero() {
        return Ok(zeroth);
    }
    Ok(zeroth + rho * g1(x, lambda0, t, maturity, params, strike, numerics)?.g1)
}

/// `g0` and `g1` at time zero, reusable across any number of correlations.
#[derive(Debug, Clone)]
pub struct CorrelationExpansion<T> {
    pub call: T,
    pub g0: T,
    pub g1: G1Breakdown<T>,
    pub loss_given_default: T,
    /// Seconds spent computing `g0` and `g1`.
    pub setup_s: f64,
}

impl<T: Real> CorrelationExpansion<T> {
    pub fn new(params: &ModelParams<T>, contract: &Contract<T>, numerics: &NumericsConfig<T>) -> Result<Self> {
        let start = Instant::now();
        let x = params.equity.log_spot();
        let lambda0 = params.cir.lambda0;
        let (maturity, strike) = (contract.maturity, contract.strike);
        let call = bs_call(x, T::zero(), maturity, params.equity.sigma, params.rate.r, strike)?;
        let zeroth = g0(x, lambda0, T::zero(), maturity, params, strike)?;
        let first = g1(x, lambda0, T::zero(), maturity, params, strike, numerics)?;
        Ok(Self {
            call,
            g0: zeroth,
            g1: first,
            loss_given_default: contract.loss_given_default(),
            setup_s: start.elapsed().as_secs_f64(),
        })
    }

    pub fn price(&self, rho: T) -> T {
        self.g0 + rho * self.g1.g1
    }

    /// `(1 − R)(c_BS − g0 − ρ·g1)`.
    pub fn cva(&self, rho: T) -> T {
        self.loss_given_default * (self.call - self.price(rho))
    }

    pub fn result(&self, rho: T) -> CvaResult<T> {
        CvaResult {
            method: Method::CorrExp,
            value: self.cva(rho),
            ci_halfwidth: None,
            runtime_s: self.setup_s,
        }
    }
}

/// CVA from the first-order correlation expansion.
pub fn cva_corr_expansion<T: Real>(
    params: &ModelParams<T>,
    contract: &Contract<T>,
    rho: T,
    numerics: &NumericsConfig<T>,
) -> Result<CvaResult<T>> {
    Ok(CorrelationExpansion::new(params, contract, numerics)?.result(rho))
}
