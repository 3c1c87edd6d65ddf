//! Monte Carlo benchmark for the correlated equity/intensity system.
//!
//! The intensity is simulated with a full-truncation Euler scheme and its
//! time integral with the trapezoid rule. Given the intensity driver, the
//! terminal log-price is drawn exactly:
//! `X_T = x + (r − σ²/2)T + σ(ρ W¹_T + √(1−ρ²) W²_T)`.
//!
//! Paths are generated in fixed-size batches, batch `i` drawing from random
//! stream `i`, and batch statistics are merged in batch order, so results do
//! not depend on the number of worker threads.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::bs_call;
use crate::error::{CvaError, Result};
use crate::model::{CirParams, Contract, CvaResult, Method, ModelParams};
use crate::numerics::rng_stream;
use crate::scalar::Real;

/// Environment variable holding the number of worker threads.
pub const WORKERS_ENV: &str = "WWR_CVA_WORKERS";

/// Simulation settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct McConfig {
    pub paths: usize,
    /// Euler steps over `[0, T]`.
    pub steps: usize,
    pub seed: u64,
    pub control_variate: bool,
    pub antithetic: bool,
    /// Paths per random stream.
    pub batch_paths: usize,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            paths: 1_000_000,
            steps: 1000,
            seed: 42,
            control_variate: true,
            antithetic: false,
            batch_paths: 8192,
        }
    }
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        if self.paths < 1 {
            errs.push("paths must be at least 1".to_string());
        }
        if self.steps < 1 {
            errs.push("steps must be at least 1".to_string());
        }
        if self.batch_paths < 2 {
            errs.push("batch_paths must be at least 2".to_string());
        }
        if self.antithetic && (!self.paths.is_multiple_of(2) || !self.batch_paths.is_multiple_of(2)) {
            errs.push("antithetic sampling needs an even number of paths and batch_paths".to_string());
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(CvaError::Validation(errs))
        }
    }
}

/// Estimate with its sampling error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate<T> {
    pub value: T,
    pub std_error: T,
    pub ci95_halfwidth: T,
    pub paths_used: usize,
}

impl<T: Real> McEstimate<T> {
    fn new(value: T, std_error: T, paths_used: usize) -> Self {
        Self {
            value,
            std_error,
            ci95_halfwidth: T::lit(1.96) * std_error,
            paths_used,
        }
    }
}

/// Terminal state of one simulated path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathEnd<T> {
    pub log_price: T,
    pub intensity: T,
    pub integrated_intensity: T,
}

/// Correlation-free randomness of one path: the intensity-driver value
/// `W¹_T`, an independent standard normal for `W²_T/√T`, and the path's
/// intensity functionals.
#[derive(Debug, Clone, Copy)]
struct Draw<T> {
    driver: T,
    orthogonal: T,
    intensity: T,
    integrated: T,
}

struct Stepper<T> {
    cir: CirParams<T>,
    dt: T,
    sqrt_dt: T,
    steps: usize,
}

impl<T: Real> Stepper<T> {
    fn new(cir: &CirParams<T>, maturity: T, steps: usize) -> Self {
        let dt = maturity / T::from_usize(steps).unwrap_or_else(T::one);
        Self {
            cir: *cir,
            dt,
            sqrt_dt: dt.sqrt(),
            steps,
        }
    }

    /// Simulates one path, or an antithetic pair when `normals` is mirrored.
    fn draw(&self, normals: &[T], orthogonal: T, mirror: bool) -> Draw<T> {
        let half = T::lit(0.5);
        let sign = if mirror { -T::one() } else { T::one() };
        let CirParams { gamma, theta, eta, .. } = self.cir;
        let mut lambda = self.cir.lambda0;
        let mut integrated = T::zero();
        let mut sum = T::zero();
        for &z in &normals[..self.steps] {
            let z = sign * z;
            let pos = lambda.max(T::zero());
            let next = lambda + gamma * (theta - pos) * self.dt + eta * pos.sqrt() * self.sqrt_dt * z;
            integrated = integrated + half * (pos + next.max(T::zero())) * self.dt;
            sum = sum + z;
            lambda = next;
        }
        Draw {
            driver: sum * self.sqrt_dt,
            orthogonal: sign * orthogonal,
            intensity: lambda.max(T::zero()),
            integrated,
        }
    }
}

/// Pooled first and second moments of a (response, control) pair.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: f64,
    mean_y: f64,
    mean_c: f64,
    m2_y: f64,
    m2_c: f64,
    co: f64,
}

impl Moments {
    fn push(&mut self, y: f64, c: f64) {
        self.n += 1.0;
        let dy = y - self.mean_y;
        let dc = c - self.mean_c;
        self.mean_y += dy / self.n;
        self.mean_c += dc / self.n;
        self.m2_y += dy * (y - self.mean_y);
        self.m2_c += dc * (c - self.mean_c);
        self.co += dy * (c - self.mean_c);
    }

    fn merge(&mut self, other: &Moments) {
        if other.n == 0.0 {
            return;
        }
        if self.n == 0.0 {
            *self = *other;
            return;
        }
        let n = self.n + other.n;
        let dy = other.mean_y - self.mean_y;
        let dc = other.mean_c - self.mean_c;
        let w = self.n * other.n / n;
        self.m2_y += other.m2_y + dy * dy * w;
        self.m2_c += other.m2_c + dc * dc * w;
        self.co += other.co + dy * dc * w;
        self.mean_y += dy * other.n / n;
        self.mean_c += dc * other.n / n;
        self.n = n;
    }

    /// Plain or regression-adjusted estimate, with the control's known mean.
    fn estimate(&self, control_mean: f64, control_variate: bool) -> (f64, f64) {
        let n = self.n;
        let dof = (n - 1.0).max(1.0);
        if !control_variate || self.m2_c <= 0.0 {
            return (self.mean_y, (self.m2_y / dof / n).sqrt());
        }
        let beta = self.co / self.m2_c;
        let value = self.mean_y - beta * (self.mean_c - control_mean);
        let resid = (self.m2_y - beta * self.co).max(0.0);
        let dof = (n - 2.0).max(1.0);
        (value, (resid / dof / n).sqrt())
    }
}

/// Quantity estimated by a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum McTarget<T> {
    /// `(1 − R)E[e^{−rT}(e^{X_T} − K)⁺(1 − e^{−∫λ})]`.
    Cva { rho: T },
    /// `E[e^{−rT}(e^{X_T} − K)⁺ e^{−∫λ}]`.
    Price { rho: T },
    /// Central difference `(price(h) − price(−h))/(2h)` on common paths.
    PriceSlope { step: T },
}

struct Payoff<T> {
    drift: T,
    sigma: T,
    maturity_sqrt: T,
    discount: T,
    strike: T,
    lgd: T,
}

impl<T: Real> Payoff<T> {
    fn call(&self, d: &Draw<T>, rho: T) -> T {
        let mix = (T::one() - rho * rho).max(T::zero()).sqrt();
        let x = self.drift + self.sigma * (rho * d.driver + mix * self.maturity_sqrt * d.orthogonal);
        self.discount * (x.exp() - self.strike).max(T::zero())
    }

    /// `(response, control)` of one path.
    fn sample(&self, d: &Draw<T>, target: McTarget<T>) -> (f64, f64) {
        match target {
            McTarget::Cva { rho } => {
                let c = self.call(d, rho);
                let default = -(-d.integrated).exp_m1();
                ((self.lgd * c * default).as_f64(), c.as_f64())
            }
            McTarget::Price { rho } => {
                let c = self.call(d, rho);
                ((c * (-d.integrated).exp()).as_f64(), c.as_f64())
            }
            McTarget::PriceSlope { step } => {
                let (up, down) = (self.call(d, step), self.call(d, -step));
                let scale = T::lit(2.0) * step;
                let survival = (-d.integrated).exp();
                (((up - down) * survival / scale).as_f64(), ((up - down) / scale).as_f64())
            }
        }
    }
}

fn worker_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(WORKERS_ENV) {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| CvaError::Config(format!("{WORKERS_ENV} must be a positive integer, got '{v}'")))?;
        if n == 0 {
            return Err(CvaError::Config(format!("{WORKERS_ENV} must be positive")));
        }
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| CvaError::Config(format!("cannot start worker pool: {e}")))
}

/// Visits every path (or antithetic pair) of batch `batch`.
fn for_each_in_batch<T: Real>(
    stepper: &Stepper<T>,
    cfg: &McConfig,
    batch: usize,
    mut visit: impl FnMut(&[Draw<T>]),
) {
    let first = batch * cfg.batch_paths;
    let count = cfg.batch_paths.min(cfg.paths - first);
    let mut stream = rng_stream(cfg.seed, batch as u64);
    let mut normals = vec![T::zero(); stepper.steps];
    let group = if cfg.antithetic { 2 } else { 1 };
    for _ in 0..count / group {
        for z in normals.iter_mut() {
            *z = T::lit(stream.next_normal());
        }
        let orthogonal = T::lit(stream.next_normal());
        if cfg.antithetic {
            let pair = [stepper.draw(&normals, orthogonal, false), stepper.draw(&normals, orthogonal, true)];
            visit(&pair);
        } else {
            visit(&[stepper.draw(&normals, orthogonal, false)]);
        }
    }
}

fn batch_count(cfg: &McConfig) -> usize {
    cfg.paths.div_ceil(cfg.batch_paths)
}

/// Terminal states of all paths at correlation `params.corr.rho`.
pub fn simulate_paths<T: Real>(params: &ModelParams<T>, maturity: T, cfg: &McConfig) -> Result<Vec<PathEnd<T>>> {
    cfg.validate()?;
    let stepper = Stepper::new(&params.cir, maturity, cfg.steps);
    let rho = params.corr.rho;
    let mix = (T::one() - rho * rho).max(T::zero()).sqrt();
    let sigma = params.equity.sigma;
    let drift = params.equity.log_spot() + (params.rate.r - sigma * sigma / T::lit(2.0)) * maturity;
    let root = maturity.sqrt();
    let batches: Vec<Vec<PathEnd<T>>> = worker_pool()?.install(|| {
        (0..batch_count(cfg))
            .into_par_iter()
            .map(|b| {
                let mut out = Vec::with_capacity(cfg.batch_paths);
                for_each_in_batch(&stepper, cfg, b, |draws| {
                    out.extend(draws.iter().map(|d| PathEnd {
                        log_price: drift + sigma * (rho * d.driver + mix * root * d.orthogonal),
                        intensity: d.intensity,
                        integrated_intensity: d.integrated,
                    }))
                });
                out
            })
            .collect()
    });
    Ok(batches.into_iter().flatten().collect())
}

/// Estimates every target on one common set of paths.
///
/// The intensity paths do not depend on the correlation, so a sweep over
/// `ρ` costs little more than a single estimate.
pub fn mc_sweep<T: Real>(
    params: &ModelParams<T>,
    contract: &Contract<T>,
    targets: &[McTarget<T>],
    cfg: &McConfig,
) -> Result<Vec<McEstimate<T>>> {
    cfg.validate()?;
    for t in targets {
        let rho = match *t {
            McTarget::Cva { rho } | McTarget::Price { rho } => rho,
            McTarget::PriceSlope { step } => step,
        };
        if !(rho.abs() <= T::one()) {
            return Err(CvaError::Validation(vec![format!("correlation {rho} outside [-1, 1]")]));
        }
    }
    let maturity = contract.maturity;
    let sigma = params.equity.sigma;
    let r = params.rate.r;
    let payoff = Payoff {
        drift: params.equity.log_spot() + (r - sigma * sigma / T::lit(2.0)) * maturity,
        sigma,
        maturity_sqrt: maturity.sqrt(),
        discount: (-r * maturity).exp(),
        strike: contract.strike,
        lgd: contract.loss_given_default(),
    };
    let stepper = Stepper::new(&params.cir, maturity, cfg.steps);
    let per_batch: Vec<Vec<Moments>> = worker_pool()?.install(|| {
        (0..batch_count(cfg))
            .into_par_iter()
            .map(|b| {
                let mut acc = vec![Moments::default(); targets.len()];
                for_each_in_batch(&stepper, cfg, b, |draws| {
                    let k = draws.len() as f64;
                    for (m, &target) in acc.iter_mut().zip(targets) {
                        let (mut y, mut c) = (0.0, 0.0);
                        for d in draws {
                            let (dy, dc) = payoff.sample(d, target);
                            y += dy;
                            c += dc;
                        }
                        m.push(y / k, c / k);
                    }
                });
                acc
            })
            .collect()
    });
    let mut total = vec![Moments::default(); targets.len()];
    for batch in &per_batch {
        for (t, m) in total.iter_mut().zip(batch) {
            t.merge(m);
        }
    }
    let call = bs_call(params.equity.log_spot(), T::zero(), maturity, sigma, r, contract.strike)?.as_f64();
    Ok(targets
        .iter()
        .zip(&total)
        .map(|(target, m)| {
            let control_mean = match target {
                McTarget::PriceSlope { .. } => 0.0,
                _ => call,
            };
            let (value, se) = m.estimate(control_mean, cfg.control_variate);
            McEstimate::new(T::lit(value), T::lit(se), cfg.paths)
        })
        .collect())
}

/// Monte Carlo CVA at correlation `rho`.
pub fn cva_mc<T: Real>(params: &ModelParams<T>, contract: &Contract<T>, rho: T, cfg: &McConfig) -> Result<McEstimate<T>> {
    Ok(mc_sweep(params, contract, &[McTarget::Cva { rho }], cfg)?[0])
}

/// Monte Carlo defaultable call price at correlation `rho`.
pub fn price_mc<T: Real>(params: &ModelParams<T>, contract: &Contract<T>, rho: T, cfg: &McConfig) -> Result<McEstimate<T>> {
    Ok(mc_sweep(params, contract, &[McTarget::Price { rho }], cfg)?[0])
}

/// Common-random-number central difference of the price in `ρ` at zero.
pub fn rho_slope_mc<T: Real>(
    params: &ModelParams<T>,
    contract: &Contract<T>,
    step: T,
    cfg: &McConfig,
) -> Result<McEstimate<T>> {
    Ok(mc_sweep(params, contract, &[McTarget::PriceSlope { step }], cfg)?[0])
}

/// CVA for each correlation in `rhos`, all on the same paths.
///
/// Each result carries the runtime of the whole sweep.
pub fn cva_mc_sweep<T: Real>(
    params: &ModelParams<T>,
    contract: &Contract<T>,
    rhos: &[T],
    cfg: &McConfig,
) -> Result<Vec<CvaResult<T>>> {
    let start = Instant::now();
    let targets: Vec<_> = rhos.iter().map(|&rho| McTarget::Cva { rho }).collect();
    let estimates = mc_sweep(params, contract, &targets, cfg)?;
    let runtime_s = start.elapsed().as_secs_f64();
    Ok(estimates
        .into_iter()
        .map(|e| CvaResult {
            method: Method::MonteCarlo,
            value: e.value,
            ci_halfwidth: Some(e.ci95_halfwidth),
            runtime_s,
        })
        .collect())
}
