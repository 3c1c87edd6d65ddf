#![allow(dead_code)]

use wwrcva::model::presets::reference_case;
use wwrcva::{CirParams, Contract, ModelParams};

pub fn base() -> (ModelParams, Contract) {
    reference_case::<f64>()
}

/// `E[e^{−uλ_τ − ∫₀^τ λ}]` from the Riccati solution with terminal condition `u`.
pub fn two_date_transform(u: f64, tau: f64, c: &CirParams) -> f64 {
    let h = (c.gamma * c.gamma + 2.0 * c.eta * c.eta).sqrt();
    let e = (h * tau).exp();
    let den = (h - c.gamma) + (h + c.gamma) * e + c.eta * c.eta * u * (e - 1.0);
    let b = (u * ((h + c.gamma) + (h - c.gamma) * e) + 2.0 * (e - 1.0)) / den;
    let a = -(2.0 * c.gamma * c.theta / (c.eta * c.eta)) * (2.0 * h * ((c.gamma + h) * tau / 2.0).exp() / den).ln();
    (-a - b * c.lambda0).exp()
}

/// Mean and standard error of a sample.
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}
