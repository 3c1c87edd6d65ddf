//! Closed forms checked against independent formulas.

mod common;

use common::{base, two_date_transform};
use proptest::prelude::*;
use wwrcva::analytic::{
    bs_call, cir_bond_factors, g0, mgf_kernel, mixed_cir_expectation, mixed_cir_expectation_with, survival,
    MgfKernelParams, MixedRoute, StateWeight,
};
use wwrcva::numerics::try_integrate_semi_infinite;
use wwrcva::{QuadratureSpec, SeriesSpec};
use wwrcva::CirParams;

fn tight() -> QuadratureSpec {
    QuadratureSpec::new(1e-14, 1e-10, 2000).unwrap()
}

/// `E[√λ_τ e^{−bλ_τ − ∫λ}]` via `√x = (1/(2√π))∫₀^∞ (1 − e^{−sx}) s^{−3/2} ds`
/// and the Riccati transform, with `s = v²`.
fn sqrt_moment_oracle(b: f64, tau: f64, c: &CirParams) -> f64 {
    let base = two_date_transform(b, tau, c);
    let integral = try_integrate_semi_infinite(
        |v: f64| {
            if v == 0.0 {
                return Ok(0.0);
            }
            Ok(2.0 * (base - two_date_transform(b + v * v, tau, c)) / (v * v))
        },
        0.0,
        5.0,
        &tight(),
    )
    .unwrap();
    integral / (2.0 * std::f64::consts::PI.sqrt())
}

#[test]
fn bs_reference_values() {
    let x = 100f64.ln();
    let atm = bs_call(x, 0.0, 1.0, 0.1, 0.0, 100.0).unwrap();
    let erf_oracle = 100.0 * libm::erf(0.05 / std::f64::consts::SQRT_2);
    assert!((atm - erf_oracle).abs() < 1e-12);
    assert!((bs_call(x, 0.0, 1.0, 0.1, 0.0, 1e-12).unwrap() - 100.0).abs() < 1e-9);
    assert!((bs_call(110f64.ln(), 0.0, 1.0, 1e-8, 0.0, 100.0).unwrap() - 10.0).abs() < 1e-9);
}

#[test]
fn riccati_transform_with_zero_terminal_is_the_bond() {
    let (p, _) = base();
    for &tau in &[0.2, 1.0, 3.0] {
        let bond = cir_bond_factors(tau, &p.cir).bond(p.cir.lambda0);
        assert!((two_date_transform(0.0, tau, &p.cir) - bond).abs() < 1e-14);
    }
}

#[test]
fn unit_weight_matches_riccati_transform() {
    let (p, _) = base();
    let s = SeriesSpec::default();
    for &eta in &[0.1, 0.3, 0.5] {
        let cir = CirParams { eta, ..p.cir };
        for &(b, tau) in &[(0.0, 0.5), (0.3, 0.5), (0.9, 0.1), (0.5, 2.0)] {
            let oracle = two_date_transform(b, tau, &cir);
            for route in [MixedRoute::Series, MixedRoute::Quadrature] {
                let v = mixed_cir_expectation_with(b, 0.04, 0.0, tau, &cir, StateWeight::Unit, route, &s, &tight())
                    .unwrap();
                assert!((v / oracle - 1.0).abs() < 1e-7, "η={eta} b={b} τ={tau} {route:?}: {v} vs {oracle}");
            }
        }
    }
}

#[test]
fn sqrt_weight_matches_fractional_moment_oracle() {
    let (p, _) = base();
    let s = SeriesSpec::default();
    for &eta in &[0.1, 0.3, 0.5] {
        let cir = CirParams { eta, ..p.cir };
        for &(b, tau) in &[(0.0, 0.5), (cir_bond_factors(0.5, &cir).b2, 0.5), (0.2, 0.05), (0.1, 0.95)] {
            let oracle = sqrt_moment_oracle(b, tau, &cir);
            let v = mixed_cir_expectation(b, 0.04, 0.0, tau, &cir, &s, &tight()).unwrap();
            assert!((v / oracle - 1.0).abs() < 1e-7, "η={eta} b={b} τ={tau}: {v} vs {oracle}");
        }
    }
}

#[test]
fn g0_is_survival_times_call() {
    let (p, c) = base();
    let x = p.equity.log_spot();
    let oracle = survival(1.0, &p.cir) * bs_call(x, 0.0, 1.0, 0.1, 0.0, 100.0).unwrap();
    let v = g0(x, 0.04, 0.0, 1.0, &p, c.strike).unwrap();
    assert!((v / oracle - 1.0).abs() < 1e-12);
}

#[test]
fn b2_bounded_by_maturity_on_grid() {
    let (p, _) = base();
    for gamma in [0.02, 0.2, 0.8, 2.0] {
        for eta in [0.01, 0.1, 0.3, 0.5, 1.0] {
            let cir = CirParams { gamma, eta, ..p.cir };
            for i in 1..=50 {
                let tau = 0.1 * i as f64;
                let b2 = cir_bond_factors(tau, &cir).b2;
                assert!(b2 > 0.0 && b2 <= tau);
            }
        }
    }
}

/// `∫₀^∞ M·I_ν dζ`, substituting `ζ = w^k` to tame the `ζ^ν` endpoint.
fn kernel_mass(lambda0: f64, t: f64, alpha: f64, cir: &CirParams) -> f64 {
    let nu = MgfKernelParams::new(cir).unwrap().nu;
    let k = if nu < 0.0 { 1.0 / (1.0 + nu) } else { 1.0 };
    let s = SeriesSpec::default();
    try_integrate_semi_infinite(
        |w: f64| {
            let zeta = w.powf(k);
            if zeta <= 0.0 {
                return Ok(0.0);
            }
            let jac = k * w.powf(k - 1.0);
            Ok(mgf_kernel(lambda0, zeta, t, alpha, cir, &s)? * jac)
        },
        0.0,
        cir.theta.powf(1.0 / k),
        &tight(),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn kernel_integrates_to_the_bond(
        lambda0 in 0.005f64..0.2,
        gamma in 0.05f64..1.0,
        theta in 0.01f64..0.2,
        eta in 0.05f64..0.5,
        t in 0.0f64..1.0,
        horizon in 0.05f64..3.0,
    ) {
        let cir = CirParams { lambda0, gamma, theta, eta };
        let mass = kernel_mass(lambda0, t, t + horizon, &cir);
        let bond = cir_bond_factors(horizon, &cir).bond(lambda0);
        prop_assert!((mass / bond - 1.0).abs() < 1e-6, "{} vs {}", mass, bond);
    }
}
