//! Closed-form building blocks: Black–Scholes, CIR transforms and the
//! independence price `g0`.

mod black_scholes;
mod cir;
mod mgf;

pub use black_scholes::{bs_call, bs_spot_delta, d1_d2};
pub use cir::{
    cir_bond_derivatives, cir_bond_factors, default_density, integrated_mean_path, mean_path, survival,
    CirBondDerivatives, CirBondFactors,
};
pub use mgf::{
    ln_mgf_kernel, mgf_kernel, mixed_cir_expectation, mixed_cir_expectation_with, MgfKernelParams, MixedRoute,
    StateWeight, MIN_HORIZON,
};

use crate::error::Result;
use crate::model::ModelParams;
use crate::scalar::Real;

/// Defaultable call price under independence,
/// `g0 = e^{−B₁(T−t) − B₂(T−t)λ}·c_BS(x, t, T)`.
pub fn g0<T: Real>(x: T, lambda0: T, t: T, maturity: T, params: &ModelParams<T>, strike: T) -> Result<T> {
    let call = bs_call(x, t, maturity, params.equity.sigma, params.rate.r, strike)?;
    Ok(cir_bond_factors(maturity - t, &params.cir).bond(lambda0) * call)
}

/// Independence CVA `(1 − R)·c_BS(0, T)·(1 − G(T))`.
pub fn independence_cva<T: Real>(params: &ModelParams<T>, contract: &crate::model::Contract<T>) -> Result<T> {
    let call = bs_call(
        params.equity.log_spot(),
        T::zero(),
        contract.maturity,
        params.equity.sigma,
        params.rate.r,
        contract.strike,
    )?;
    Ok(contract.loss_given_default() * call * (T::one() - survival(contract.maturity, &params.cir)))
}
