//! Exponential-affine transforms of the CIR intensity.

use serde::{Deserialize, Serialize};

use crate::model::CirParams;
use crate::scalar::Real;

/// Coefficients of `E[e^{−∫₀^τ λ}] = e^{−B₁(τ) − B₂(τ)λ₀}`.
///
/// `beta = √(γ² + 2η²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CirBondFactors<T> {
    pub b1: T,
    pub b2: T,
    pub beta: T,
}

impl<T: Real> CirBondFactors<T> {
    /// `e^{−B₁ − B₂λ}`.
    pub fn bond(&self, lambda: T) -> T {
        (-self.b1 - self.b2 * lambda).exp()
    }
}

/// Time derivatives `B₁′(τ)`, `B₂′(τ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CirBondDerivatives<T> {
    pub db1: T,
    pub db2: T,
}

fn beta<T: Real>(cir: &CirParams<T>) -> T {
    (cir.gamma * cir.gamma + T::lit(2.0) * cir.eta * cir.eta).sqrt()
}

/// `B₁(τ)`, `B₂(τ)` of the CIR bond.
///
/// Written in terms of `e^{−βτ}` and `β − γ = 2η²/(β + γ)` so the
/// small-`η` limit and long maturities stay accurate:
///
/// ```text
/// B₂ = 2(1 − e^{−βτ}) / ((β−γ)e^{−βτ} + β + γ)
/// B₁ = 2γθτ/(β+γ) + (2γθ/η²)·ln(1 − (β−γ)(1 − e^{−βτ})/(2β))
/// ```
pub fn cir_bond_factors<T: Real>(tau: T, cir: &CirParams<T>) -> CirBondFactors<T> {
    let two = T::lit(2.0);
    let beta = beta(cir);
    let gap = two * cir.eta * cir.eta / (beta + cir.gamma);
    let decay = (-beta * tau).exp();
    let one_minus = -(-beta * tau).exp_m1();
    let b2 = two * one_minus / (gap * decay + beta + cir.gamma);
    let b1 = two * cir.gamma * cir.theta * tau / (beta + cir.gamma)
        + two * cir.gamma * cir.theta / (cir.eta * cir.eta) * (-gap * one_minus / (two * beta)).ln_1p();
    CirBondFactors { b1, b2, beta }
}

/// Closed-form derivatives: `B₂′ = 4β²e^{−βτ}/((β−γ)e^{−βτ} + β + γ)²`, `B₁′ = γθB₂`.
pub fn cir_bond_derivatives<T: Real>(tau: T, cir: &CirParams<T>) -> CirBondDerivatives<T> {
    let two = T::lit(2.0);
    let beta = beta(cir);
    let gap = two * cir.eta * cir.eta / (beta + cir.gamma);
    let decay = (-beta * tau).exp();
    let den = gap * decay + beta + cir.gamma;
    let db2 = T::lit(4.0) * beta * beta * decay / (den * den);
    let b2 = cir_bond_factors(tau, cir).b2;
    CirBondDerivatives {
        db1: cir.gamma * cir.theta * b2,
        db2,
    }
}

/// Survival function `G(t) = E[e^{−∫₀ᵗ λ}] = e^{−B₁(t) − B₂(t)λ₀}`.
pub fn survival<T: Real>(t: T, cir: &CirParams<T>) -> T {
    cir_bond_factors(t, cir).bond(cir.lambda0)
}

/// Default density `−G′(t) = (B₁′(t) + B₂′(t)λ₀)·G(t)`.
pub fn default_density<T: Real>(t: T, cir: &CirParams<T>) -> T {
    let d = cir_bond_derivatives(t, cir);
    (d.db1 + d.db2 * cir.lambda0) * survival(t, cir)
}

/// `E[λ_t] = θ + (λ₀ − θ)e^{−γt}`.
pub fn mean_path<T: Real>(t: T, cir: &CirParams<T>) -> T {
    cir.theta + (cir.lambda0 - cir.theta) * (-cir.gamma * t).exp()
}

/// `∫₀^τ E[λ_s] ds = θτ + (λ₀ − θ)(1 − e^{−γτ})/γ`, with the `γ → 0` limit `λ₀τ`.
pub fn integrated_mean_path<T: Real>(tau: T, cir: &CirParams<T>) -> T {
    let decay_integral = if cir.gamma == T::zero() {
        tau
    } else {
        -(-cir.gamma * tau).exp_m1() / cir.gamma
    };
    cir.theta * tau + (cir.lambda0 - cir.theta) * decay_integral
}
