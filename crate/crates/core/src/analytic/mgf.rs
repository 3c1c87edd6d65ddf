//! Joint transform of the CIR intensity and its time integral.
//!
//! For `τ = α − t` the product of the conditional Laplace transform
//! `E[e^{−∫ₜ^α λ} | λ_α = ζ]` and the transition density of `λ_α` is
//!
//! ```text
//! M(λ, ζ)·I_ν(z),   z = 2γ̄√(λζ) / (η² sinh(γ̄τ/2))
//! ln M = ln(2γ̄/η²) + (ν/2)ln(ζ/λ) − γ̄τ/2 − ln(1 − e^{−γ̄τ})
//!        − [γ̄(λ+ζ)coth(γ̄τ/2) − γ(λ−ζ) − θγ²τ]/η²
//! ```
//!
//! with `ν = 2γθ/η² − 1` and `γ̄ = √(γ² + 2η²)`. The transition density
//! itself is never formed.

use serde::{Deserialize, Serialize};

use crate::error::{CvaError, Result};
use crate::model::CirParams;
use crate::numerics::{ln_bessel_i, ln_sum_unimodal, try_integrate_semi_infinite, QuadratureSpec, SeriesSpec};
use crate::scalar::Real;

use super::cir::{integrated_mean_path, mean_path};

/// Horizons below this are treated as `α = t`.
pub const MIN_HORIZON: f64 = 1e-9;

/// Beyond this order the Bessel representation loses more accuracy to
/// rounding (about `ν·ε`) than the deterministic-intensity limit does
/// (about `1/ν`), and the mixed expectation switches to the latter.
pub const DETERMINISTIC_NU: f64 = 1e8;

/// Order `ν` and frequency `γ̄` of the kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MgfKernelParams<T> {
    pub nu: T,
    pub gamma_bar: T,
}

impl<T: Real> MgfKernelParams<T> {
    pub fn new(cir: &CirParams<T>) -> Result<Self> {
        if !(cir.eta > T::zero()) {
            return Err(CvaError::domain("mgf_kernel", "eta must be positive"));
        }
        let eta2 = cir.eta * cir.eta;
        let nu = T::lit(2.0) * cir.gamma * cir.theta / eta2 - T::one();
        if !(nu > -T::one()) {
            return Err(CvaError::domain("mgf_kernel", format!("order nu = {nu} must exceed -1")));
        }
        let gamma_bar = (cir.gamma * cir.gamma + T::lit(2.0) * eta2).sqrt();
        Ok(Self { nu, gamma_bar })
    }
}

/// Pieces of `ln M` that do not depend on `ζ`, plus the `ζ`-coefficients.
///
/// `ln M·I_ν = ln_k0 + (ν/2)ln ζ − decay·ζ + ln I_ν(coupling·√ζ)`.
#[derive(Debug, Clone, Copy)]
struct KernelShape<T> {
    nu: T,
    ln_k0: T,
    decay: T,
    coupling: T,
}

impl<T: Real> KernelShape<T> {
    fn new(lambda: T, tau: T, cir: &CirParams<T>) -> Result<Self> {
        let MgfKernelParams { nu, gamma_bar } = MgfKernelParams::new(cir)?;
        if !(lambda > T::zero()) {
            return Err(CvaError::domain("mgf_kernel", format!("starting intensity {lambda} must be positive")));
        }
        if !(tau > T::zero()) {
            return Err(CvaError::domain("mgf_kernel", format!("horizon {tau} must be positive")));
        }
        let two = T::lit(2.0);
        let eta2 = cir.eta * cir.eta;
        let half = gamma_bar * tau / two;
        let coth = half.tanh().recip();
        let ln_k0 = (two * gamma_bar / eta2).ln() - nu / two * lambda.ln() - half
            - (gamma_bar * lambda * coth - cir.gamma * lambda - cir.theta * cir.gamma * cir.gamma * tau) / eta2
            - (-(-gamma_bar * tau).exp_m1()).ln();
        let decay = (gamma_bar * coth + cir.gamma) / eta2;
        let coupling = two * gamma_bar * lambda.sqrt() / (eta2 * half.sinh());
        if !ln_k0.is_finite() || !decay.is_finite() || !coupling.is_finite() {
            return Err(CvaError::overflow(
                "mgf_kernel",
                format!("non-finite kernel coefficients (ln K0 = {ln_k0}, decay = {decay}, coupling = {coupling}) at horizon {tau}"),
            ));
        }
        Ok(Self {
            nu,
            ln_k0,
            decay,
            coupling,
        })
    }

    fn ln_value(&self, zeta: T, series: &SeriesSpec<T>) -> Result<T> {
        let z = self.coupling * zeta.sqrt();
        let ln_i = ln_bessel_i(self.nu, z, series)?;
        Ok(self.ln_k0 + self.nu / T::lit(2.0) * zeta.ln() - self.decay * zeta + ln_i)
    }
}

fn horizon<T: Real>(t: T, alpha: T) -> Result<T> {
    let tau = alpha - t;
    if tau > T::zero() {
        Ok(tau)
    } else {
        Err(CvaError::domain("mgf_kernel", format!("alpha = {alpha} must exceed t = {t}")))
    }
}

/// `ln(M·I_ν)` at terminal intensity `zeta`.
pub fn ln_mgf_kernel<T: Real>(
    lambda0: T,
    zeta: T,
    t: T,
    alpha: T,
    cir: &CirParams<T>,
    series: &SeriesSpec<T>,
) -> Result<T> {
    if !(zeta > T::zero()) {
        return Err(CvaError::domain("mgf_kernel", format!("terminal intensity {zeta} must be positive")));
    }
    KernelShape::new(lambda0, horizon(t, alpha)?, cir)?.ln_value(zeta, series)
}

/// `M·I_ν` at terminal intensity `zeta`; integrates over `ζ` to the CIR bond.
pub fn mgf_kernel<T: Real>(
    lambda0: T,
    zeta: T,
    t: T,
    alpha: T,
    cir: &CirParams<T>,
    series: &SeriesSpec<T>,
) -> Result<T> {
    let ln_value = ln_mgf_kernel(lambda0, zeta, t, alpha, cir, series)?;
    if ln_value > T::max_value().ln() {
        return Err(CvaError::overflow(
            "mgf_kernel",
            format!("ln(M·I_nu) = {ln_value} at zeta = {zeta}, horizon {}", alpha - t),
        ));
    }
    Ok(ln_value.exp())
}

/// Power of the terminal intensity weighting the mixed expectation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateWeight {
    /// `√λ_α`
    Sqrt,
    /// `1`; the result is then the two-date transform `E[e^{−bλ_α − ∫λ}]`.
    Unit,
}

impl StateWeight {
    fn power<T: Real>(self) -> T {
        match self {
            StateWeight::Sqrt => T::lit(0.5),
            StateWeight::Unit => T::zero(),
        }
    }
}

/// How the `ζ`-integral of the mixed expectation is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MixedRoute {
    /// Term-by-term integration of the Bessel series (closed-form Gamma moments).
    #[default]
    Series,
    /// Adaptive quadrature of the kernel over `(0, ∞)`.
    Quadrature,
}

/// `E[√λ_α e^{−bλ_α − ∫ₜ^α λ} | λ_t = λ0]`.
pub fn mixed_cir_expectation<T: Real>(
    b: T,
    lambda0: T,
    t: T,
    alpha: T,
    cir: &CirParams<T>,
    series: &SeriesSpec<T>,
    quad: &QuadratureSpec<T>,
) -> Result<T> {
    mixed_cir_expectation_with(b, lambda0, t, alpha, cir, StateWeight::Sqrt, MixedRoute::Series, series, quad)
}

/// [`mixed_cir_expectation`] with an explicit weight and evaluation route.
#[allow(clippy::too_many_arguments)]
pub fn mixed_cir_expectation_with<T: Real>(
    b: T,
    lambda0: T,
    t: T,
    alpha: T,
    cir: &CirParams<T>,
    weight: StateWeight,
    route: MixedRoute,
    series: &SeriesSpec<T>,
    quad: &QuadratureSpec<T>,
) -> Result<T> {
    if !(b >= T::zero()) {
        return Err(CvaError::domain("mixed_cir_expectation", format!("b = {b} must be nonnegative")));
    }
    let tau = alpha - t;
    if !(tau >= T::zero()) {
        return Err(CvaError::domain(
            "mixed_cir_expectation",
            format!("alpha = {alpha} must not precede t = {t}"),
        ));
    }
    let p = weight.power::<T>();
    if tau <= T::lit(MIN_HORIZON) {
        return Ok(lambda0.powf(p) * (-b * lambda0).exp());
    }
    let shape = KernelShape::new(lambda0, tau, cir)?;
    if shape.nu > T::lit(DETERMINISTIC_NU) {
        let from = CirParams { lambda0, ..*cir };
        let level = mean_path(tau, &from);
        return Ok(level.powf(p) * (-b * level - integrated_mean_path(tau, &from)).exp());
    }
    match route {
        MixedRoute::Series => series_route(&shape, b, p, series),
        MixedRoute::Quadrature => {
            // Near zero the integrand behaves like ζ^{ν+p}; for ν + p < 0 the
            // change of variable ζ = w^k, k = 1/(1+ν+p), removes the singularity.
            let exponent = shape.nu + p;
            let k = if exponent < T::zero() {
                (T::one() + exponent).recip()
            } else {
                T::one()
            };
            let scale = mean_path(tau, cir).max(T::lit(1e-8)).powf(k.recip());
            try_integrate_semi_infinite(
                |w| {
                    if w <= T::zero() {
                        return Ok(T::zero());
                    }
                    let zeta = w.powf(k);
                    if zeta <= T::zero() {
                        return Ok(T::zero());
                    }
                    let ln_v = shape.ln_value(zeta, series)? + p * zeta.ln() - b * zeta
                        + k.ln()
                        + (k - T::one()) * w.ln();
                    Ok(ln_v.exp())
                },
                T::zero(),
                scale,
                quad,
            )
        }
    }
}

/// Stirling series remainder `1/(12x) − 1/(360x³)` of `ln Γ(x)`.
fn stirling_tail<T: Real>(x: T) -> T {
    let inv = x.recip();
    inv / T::lit(12.0) - inv * inv * inv / T::lit(360.0)
}

/// Spread (in terms) beyond which the series is replaced by an integral over `n`.
const WIDE_SERIES_WIDTH: f64 = 2000.0;

/// Sums `Σₙ K0 (D/2)^{ν+2n} Γ(p+ν+n+1) / (n! Γ(ν+n+1) (A+b)^{p+ν+n+1})`.
///
/// The terms are unimodal in `n`, peaking near `D²/(4(A+b))`.
fn series_route<T: Real>(
    shape: &KernelShape<T>,
    b: T,
    p: T,
    series: &SeriesSpec<T>,
) -> Result<T> {
    let one = T::one();
    let nu = shape.nu;
    let rate = shape.decay + b;
    let half_d = shape.coupling / T::lit(2.0);
    let ln_half_d = half_d.ln();
    let ln_rate = rate.ln();
    let q = half_d * half_d / rate;

    let ln_term = |n: T| {
        shape.ln_k0 + (nu + T::lit(2.0) * n) * ln_half_d + (p + nu + n + one).ln_gamma()
            - (n + one).ln_gamma()
            - (nu + n + one).ln_gamma()
            - (p + nu + n + one) * ln_rate
    };
    let ratio = |n: usize| {
        let n = T::from_usize(n).unwrap_or_else(T::max_value);
        q * (p + nu + n + one) / ((n + one) * (nu + n + one))
    };

    // Positive root of (m)(m + ν) = q(m + ν + p) with m = n + 1.
    let shift = q - nu;
    let m = (shift + (shift * shift + T::lit(4.0) * q * (nu + p)).sqrt()) / T::lit(2.0);
    let peak = (m - one).floor().max(T::zero()).to_usize().unwrap_or(0);
    let ln_peak = ln_term(T::from_usize(peak).unwrap_or_else(T::zero));

    // Curvature of ln(term) at the mode gives the spread of the terms in n.
    let curvature = one / (p + nu + m) - one / m - one / (nu + m);
    let width = (-curvature).recip().sqrt();
    let ln_sum = if width > T::lit(WIDE_SERIES_WIDTH) && m > T::lit(80.0) * width {
        // Very small η pushes ν and the spread of the terms into the
        // millions; the sum of a smooth, wide unimodal sequence equals its
        // integral over n to exponentially small error. Relative accuracy
        // is then limited to about ν·ε by the mode's log term.
        let centre = T::from_usize(peak).unwrap_or_else(T::zero);
        let slope = T::lit(2.0) * ln_half_d - ln_rate;
        let (z1, z2, z3) = (p + nu + centre + one, centre + one, nu + centre + one);
        let ln_rel = |h: T| {
            let logs = slope + (z1 + h).ln() - (z2 + h).ln() - (z3 + h).ln() + one;
            h * logs + (z1 - T::lit(0.5)) * (h / z1).ln_1p()
                - (z2 - T::lit(0.5)) * (h / z2).ln_1p()
                - (z3 - T::lit(0.5)) * (h / z3).ln_1p()
                + stirling_tail(z1 + h) - stirling_tail(z1)
                - stirling_tail(z2 + h) + stirling_tail(z2)
                - stirling_tail(z3 + h) + stirling_tail(z3)
        };
        // Trapezoid with step width/4 is spectrally accurate here.
        let step = width / T::lit(4.0);
        let mut mass = T::one();
        for j in 1..=160 {
            let h = step * T::lit(j as f64);
            mass = mass + ln_rel(h).exp() + ln_rel(-h).exp();
        }
        let mass = mass * step;
        ln_peak + mass.ln()
    } else {
        ln_sum_unimodal(peak, ln_peak, ratio, series, "mixed_cir_expectation")?
    };
    if ln_sum > T::max_value().ln() {
        return Err(CvaError::overflow("mixed_cir_expectation", format!("log of the sum is {ln_sum}")));
    }
    Ok(ln_sum.exp())
}
