//! Monte Carlo cross-checks of the closed forms and of the simulator itself.

mod common;

use std::sync::OnceLock;

use common::{base, mean_se, two_date_transform};
use wwrcva::analytic::{
    bs_call, cir_bond_factors, g0, independence_cva, integrated_mean_path, mixed_cir_expectation, survival,
};
use wwrcva::corr_expansion::equity_factor;
use wwrcva::drift_adjustment::epe_closed_form;
use wwrcva::montecarlo::{cva_mc, mc_sweep, price_mc, simulate_paths, McTarget, PathEnd};
use wwrcva::numerics::{normal_cdf, rng_stream};
use wwrcva::{CirParams, Contract, McConfig, QuadratureSpec, SeriesSpec};

const MILLION: usize = 1_000_000;

fn full(paths: usize, steps: usize) -> McConfig {
    McConfig {
        paths,
        steps,
        ..McConfig::default()
    }
}

/// 10⁶ paths on `[0, 1]` at ρ = 0.
fn one_year() -> &'static [PathEnd<f64>] {
    static PATHS: OnceLock<Vec<PathEnd<f64>>> = OnceLock::new();
    PATHS.get_or_init(|| simulate_paths(&base().0, 1.0, &full(MILLION, 1000)).unwrap())
}

/// 10⁶ paths on `[0, 0.5]`, same step size.
fn half_year() -> &'static [PathEnd<f64>] {
    static PATHS: OnceLock<Vec<PathEnd<f64>>> = OnceLock::new();
    PATHS.get_or_init(|| {
        let cfg = McConfig {
            seed: 7,
            ..full(MILLION, 500)
        };
        simulate_paths(&base().0, 0.5, &cfg).unwrap()
    })
}

fn within(estimate: (f64, f64), target: f64, what: &str) {
    let (mean, se) = estimate;
    assert!((mean - target).abs() <= 3.0 * se, "{what}: MC {mean} ± {se} vs {target}");
}

#[test]
fn bond_price() {
    let p = base().0;
    let xs: Vec<f64> = one_year().iter().map(|e| (-e.integrated_intensity).exp()).collect();
    within(mean_se(&xs), survival(1.0, &p.cir), "E[exp(-∫λ)]");
}

#[test]
fn independence_price() {
    let (p, c) = base();
    let xs: Vec<f64> = one_year()
        .iter()
        .map(|e| (-e.integrated_intensity).exp() * (e.log_price.exp() - c.strike).max(0.0))
        .collect();
    within(mean_se(&xs), g0(p.equity.log_spot(), 0.04, 0.0, 1.0, &p, c.strike).unwrap(), "g0");
}

#[test]
fn discounted_spot_is_a_martingale() {
    let xs: Vec<f64> = one_year().iter().map(|e| e.log_price.exp()).collect();
    within(mean_se(&xs), 100.0, "E[S_T]");
}

#[test]
fn mixed_expectation() {
    let cir = base().0.cir;
    let b = cir_bond_factors(0.5, &cir).b2;
    let xs: Vec<f64> = half_year()
        .iter()
        .map(|e| e.intensity.sqrt() * (-b * e.intensity - e.integrated_intensity).exp())
        .collect();
    let closed = mixed_cir_expectation(b, 0.04, 0.0, 0.5, &cir, &SeriesSpec::default(), &QuadratureSpec::default()).unwrap();
    within(mean_se(&xs), closed, "E[√λ exp(-bλ-∫λ)]");
}

#[test]
fn two_date_transform_by_simulation() {
    let cir = base().0.cir;
    for b in [0.2, 1.0] {
        let xs: Vec<f64> = half_year()
            .iter()
            .map(|e| (-b * e.intensity - e.integrated_intensity).exp())
            .collect();
        within(mean_se(&xs), two_date_transform(b, 0.5, &cir), "E[exp(-bλ-∫λ)]");
    }
}

#[test]
fn drivers_are_independent_at_zero_correlation() {
    let (p, _) = base();
    let cfg = full(100_000, 100);
    let corr = |rho: f64| {
        let ends = simulate_paths(&p.with_rho(rho), 1.0, &cfg).unwrap();
        let dx: Vec<f64> = ends.iter().map(|e| e.log_price - p.equity.log_spot()).collect();
        let dl: Vec<f64> = ends.iter().map(|e| e.intensity - p.cir.lambda0).collect();
        let (mx, _) = mean_se(&dx);
        let (ml, _) = mean_se(&dl);
        let cov: f64 = dx.iter().zip(&dl).map(|(a, b)| (a - mx) * (b - ml)).sum();
        let vx: f64 = dx.iter().map(|a| (a - mx) * (a - mx)).sum();
        let vl: f64 = dl.iter().map(|b| (b - ml) * (b - ml)).sum();
        cov / (vx * vl).sqrt()
    };
    assert!(corr(0.0).abs() < 3.0 / (100_000f64).sqrt());
    assert!(corr(0.5) > 0.3);
}

#[test]
fn deterministic_limit_of_the_integral() {
    let (p, _) = base();
    let p = p.with_cir(CirParams { eta: 1e-10, ..p.cir });
    let ends = simulate_paths(&p, 1.0, &full(1000, 1000)).unwrap();
    let exact = integrated_mean_path(1.0, &p.cir);
    for e in ends {
        assert!((e.integrated_intensity - exact).abs() < 1e-6);
    }
}

#[test]
fn equity_factor_by_sampling() {
    let x = 100f64.ln();
    let (alpha, maturity, sigma) = (0.5, 1.0, 0.1);
    let mut rng = rng_stream(11, 0);
    let xs: Vec<f64> = (0..MILLION)
        .map(|_| {
            let y = x - sigma * sigma / 2.0 * alpha + sigma * alpha.sqrt() * rng.next_normal();
            let d1 = (y - 100f64.ln() + sigma * sigma / 2.0 * (maturity - alpha)) / (sigma * (maturity - alpha).sqrt());
            y.exp() * normal_cdf(d1)
        })
        .collect();
    let closed = equity_factor(x, 0.0, alpha, maturity, sigma, 0.0, 100.0, &QuadratureSpec::default()).unwrap();
    within(mean_se(&xs), closed, "E[e^X N(d1)]");
}

#[test]
fn exposure_without_adjustment() {
    let (p, c) = base();
    let t = 0.5;
    let mut rng = rng_stream(12, 0);
    let xs: Vec<f64> = (0..MILLION)
        .map(|_| {
            let x = p.equity.log_spot() - 0.005 * t + 0.1 * t.sqrt() * rng.next_normal();
            bs_call(x, t, 1.0, 0.1, 0.0, 100.0).unwrap()
        })
        .collect();
    within(mean_se(&xs), epe_closed_form(t, &p, &c, 0.0).unwrap(), "E[c(t,T)]");
}

#[test]
fn zero_correlation_cva() {
    let (p, c) = base();
    let est = cva_mc(&p, &c, 0.0, &full(MILLION, 1000)).unwrap();
    within((est.value, est.std_error), independence_cva(&p, &c).unwrap(), "CVA(ρ=0)");
}

#[test]
fn zero_strike_price_factorises() {
    let (p, c) = base();
    let c = Contract { strike: 1e-8, ..c };
    let est = price_mc(&p, &c, 0.0, &full(100_000, 1000)).unwrap();
    within((est.value, est.std_error), 100.0 * survival(1.0, &p.cir), "price with K→0");
}

#[test]
fn control_variate_reduces_error() {
    let (p, c) = base();
    let with = cva_mc(&p, &c, 0.5, &full(100_000, 1000)).unwrap();
    let cfg = McConfig {
        control_variate: false,
        ..full(100_000, 1000)
    };
    let without = cva_mc(&p, &c, 0.5, &cfg).unwrap();
    assert!(with.std_error <= without.std_error, "{} vs {}", with.std_error, without.std_error);
}

#[test]
fn estimates_do_not_depend_on_worker_count() {
    let (p, c) = base();
    let cfg = McConfig {
        batch_paths: 1000,
        ..full(10_000, 100)
    };
    std::env::set_var(wwrcva::montecarlo::WORKERS_ENV, "1");
    let one = cva_mc(&p, &c, 0.3, &cfg).unwrap();
    std::env::set_var(wwrcva::montecarlo::WORKERS_ENV, "3");
    let three = cva_mc(&p, &c, 0.3, &cfg).unwrap();
    std::env::remove_var(wwrcva::montecarlo::WORKERS_ENV);
    assert_eq!(one, three);
    assert_eq!(one, cva_mc(&p, &c, 0.3, &cfg).unwrap());
}

/// Weak error of the full-truncation scheme: both grids driven by the same
/// Brownian path, the coarse increments being sums of fine ones.
#[test]
fn halving_the_step_barely_moves_the_estimate() {
    let (p, c) = base();
    let reference = cva_mc(&p, &c, 0.0, &full(MILLION, 1000)).unwrap();
    let cir = p.cir;
    let euler = |normals: &[f64], dt: f64| {
        let mut lambda = cir.lambda0;
        let mut integral = 0.0;
        for z in normals {
            let pos = lambda.max(0.0);
            let next = lambda + cir.gamma * (cir.theta - pos) * dt + cir.eta * pos.sqrt() * dt.sqrt() * z;
            integral += 0.5 * (pos + next.max(0.0)) * dt;
            lambda = next;
        }
        integral
    };
    let call = bs_call(p.equity.log_spot(), 0.0, 1.0, 0.1, 0.0, 100.0).unwrap();
    let mut rng = rng_stream(99, 0);
    let mut fine = vec![0.0; 1000];
    let mut coarse = vec![0.0; 500];
    let diffs: Vec<f64> = (0..200_000)
        .map(|_| {
            fine.iter_mut().for_each(|z| *z = rng.next_normal());
            for (k, z) in coarse.iter_mut().enumerate() {
                *z = (fine[2 * k] + fine[2 * k + 1]) / std::f64::consts::SQRT_2;
            }
            // At ρ = 0 the payoff is independent of λ, so the CVA difference
            // is the call price times the difference of default probabilities.
            call * ((-euler(&fine, 1e-3)).exp() - (-euler(&coarse, 2e-3)).exp())
        })
        .collect();
    let (shift, se) = mean_se(&diffs);
    assert!(shift.abs() + 3.0 * se < reference.std_error, "{shift} ± {se} vs {}", reference.std_error);
}

#[test]
fn common_number_sweeps_are_monotone() {
    let rhos = [-0.9, -0.7, -0.5, -0.3, -0.1, 0.1, 0.3, 0.5, 0.7, 0.9];
    for (sigma, eta) in [(0.1, 0.1), (0.1, 0.3), (0.1, 0.5), (0.3, 0.1), (0.5, 0.1)] {
        let (p, c) = base();
        let p = p.with_sigma(sigma).with_eta(eta);
        let targets: Vec<_> = rhos.iter().map(|&rho| McTarget::Cva { rho }).collect();
        let est = mc_sweep(&p, &c, &targets, &full(100_000, 1000)).unwrap();
        assert!(est.windows(2).all(|w| w[1].value > w[0].value), "σ={sigma} η={eta}");
    }
}
