//! Model parameters, contract terms and result records.
//!
//! Every model symbol lives here exactly once; derived quantities such as the
//! log-spot `ln S0` or log-strike `ln K` are computed on demand.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{CvaError, Result};
use crate::scalar::Real;

/// Geometric Brownian motion for the underlying.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquityParams<T> {
    pub s0: T,
    pub sigma: T,
}

impl<T: Real> EquityParams<T> {
    /// `x = ln S0`.
    pub fn log_spot(&self) -> T {
        self.s0.ln()
    }
}

/// CIR default intensity `dλ = γ(θ − λ)dt + η√λ dY`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CirParams<T> {
    pub lambda0: T,
    pub gamma: T,
    pub theta: T,
    pub eta: T,
}

impl<T: Real> CirParams<T> {
    /// `2γθ > η²`. Informative only.
    pub fn feller_satisfied(&self) -> bool {
        T::lit(2.0) * self.gamma * self.theta > self.eta * self.eta
    }

    /// Same process started from a different intensity.
    pub fn with_lambda0(&self, lambda0: T) -> Self {
        Self { lambda0, ..*self }
    }
}

/// Constant short rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateParams<T> {
    pub r: T,
}

/// European call with fractional recovery.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Contract<T> {
    pub strike: T,
    pub maturity: T,
    pub recovery: T,
}

impl<T: Real> Contract<T> {
    /// `κ = ln K`.
    pub fn log_strike(&self) -> T {
        self.strike.ln()
    }

    /// `1 − R`.
    pub fn loss_given_default(&self) -> T {
        T::one() - self.recovery
    }
}

/// Instantaneous correlation between the equity and intensity drivers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Correlation<T> {
    pub rho: T,
}

impl<T: Real> Default for Correlation<T> {
    fn default() -> Self {
        Self { rho: T::zero() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams<T> {
    pub equity: EquityParams<T>,
    pub rate: RateParams<T>,
    pub cir: CirParams<T>,
    pub corr: Correlation<T>,
}

impl<T: Real> ModelParams<T> {
    pub fn with_rho(&self, rho: T) -> Self {
        Self {
            corr: Correlation { rho },
            ..*self
        }
    }

    pub fn with_cir(&self, cir: CirParams<T>) -> Self {
        Self { cir, ..*self }
    }

    pub fn with_sigma(&self, sigma: T) -> Self {
        Self {
            equity: EquityParams { sigma, ..self.equity },
            ..*self
        }
    }

    pub fn with_eta(&self, eta: T) -> Self {
        Self {
            cir: CirParams { eta, ..self.cir },
            ..*self
        }
    }
}

/// Pricing method tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    CorrExp,
    VolExp,
    DriftAdj,
    #[serde(rename = "mc")]
    MonteCarlo,
    Independence,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::CorrExp,
        Method::VolExp,
        Method::DriftAdj,
        Method::MonteCarlo,
        Method::Independence,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::CorrExp => "corr-exp",
            Method::VolExp => "vol-exp",
            Method::DriftAdj => "drift-adj",
            Method::MonteCarlo => "mc",
            Method::Independence => "independence",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = CvaError;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s.trim())
            .ok_or_else(|| {
                CvaError::Config(format!(
                    "unknown method '{s}' (expected one of corr-exp, vol-exp, drift-adj, mc, independence)"
                ))
            })
    }
}

/// CVA produced by one method.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CvaResult<T> {
    pub method: Method,
    pub value: T,
    pub ci_halfwidth: Option<T>,
    pub runtime_s: f64,
}

impl<T: Real> CvaResult<T> {
    /// First-order approximations can cross zero for strongly negative ρ.
    pub fn is_negative(&self) -> bool {
        self.value < T::zero()
    }
}

/// Outcome of a successful [`validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Validation {
    pub feller_satisfied: bool,
    pub warnings: Vec<String>,
}

/// Checks every parameter invariant and reports all violations at once.
///
/// A violated Feller condition is a warning, not an error.
pub fn validate<T: Real>(params: &ModelParams<T>, contract: &Contract<T>) -> Result<Validation> {
    let mut errs = Vec::new();
    let mut check = |ok: bool, msg: &str| {
        if !ok {
            errs.push(msg.to_string());
        }
    };
    let finite_pos = |v: T| v.is_finite() && v > T::zero();

    check(finite_pos(params.equity.s0), "s0 must be positive");
    check(finite_pos(params.equity.sigma), "sigma must be positive");
    check(params.rate.r.is_finite(), "r must be finite");
    check(finite_pos(params.cir.lambda0), "lambda0 must be positive");
    check(
        params.cir.gamma.is_finite() && params.cir.gamma >= T::zero(),
        "gamma must be non-negative",
    );
    check(finite_pos(params.cir.theta), "theta must be positive");
    check(finite_pos(params.cir.eta), "eta must be positive");
    check(
        params.corr.rho >= -T::one() && params.corr.rho <= T::one(),
        "rho must lie in [-1, 1]",
    );
    check(finite_pos(contract.strike), "strike must be positive");
    check(finite_pos(contract.maturity), "maturity must be positive");
    check(
        contract.recovery >= T::zero() && contract.recovery < T::one(),
        "recovery must lie in [0, 1)",
    );

    if !errs.is_empty() {
        return Err(CvaError::Validation(errs));
    }

    let feller_satisfied = params.cir.feller_satisfied();
    let mut warnings = Vec::new();
    if !feller_satisfied {
        let c = &params.cir;
        warnings.push(format!(
            "Feller condition violated: 2*gamma*theta = {} <= eta^2 = {}",
            T::lit(2.0) * c.gamma * c.theta,
            c.eta * c.eta
        ));
    }
    Ok(Validation {
        feller_satisfied,
        warnings,
    })
}

/// Parameter sets used throughout the numerical study.
pub mod presets {
    use super::*;

    /// S0 = K = 100, T = 1, r = 0, R = 0, σ = 0.1, λ0 = 0.04, γ = 0.2,
    /// θ = 0.05, η = 0.1, ρ = 0.
    pub fn reference_case<T: Real>() -> (ModelParams<T>, Contract<T>) {
        let params = ModelParams {
            equity: EquityParams {
                s0: T::lit(100.0),
                sigma: T::lit(0.1),
            },
            rate: RateParams { r: T::zero() },
            cir: CirParams {
                lambda0: T::lit(0.04),
                gamma: T::lit(0.2),
                theta: T::lit(0.05),
                eta: T::lit(0.1),
            },
            corr: Correlation::default(),
        };
        let contract = Contract {
            strike: T::lit(100.0),
            maturity: T::one(),
            recovery: T::zero(),
        };
        (params, contract)
    }

    /// Slow mean reversion towards a high long-run intensity.
    pub fn cir_set_1<T: Real>() -> CirParams<T> {
        CirParams {
            lambda0: T::lit(0.03),
            gamma: T::lit(0.02),
            theta: T::lit(0.161),
            eta: T::lit(0.08),
        }
    }

    /// Fast mean reversion, Feller condition violated.
    pub fn cir_set_3<T: Real>() -> CirParams<T> {
        CirParams {
            lambda0: T::lit(0.01),
            gamma: T::lit(0.8),
            theta: T::lit(0.02),
            eta: T::lit(0.2),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::presets::reference_case;
    use super::*;

    #[test]
    fn reference_case_is_valid_and_feller() {
        let (p, c) = reference_case::<f64>();
        let v = validate(&p, &c).unwrap();
        assert!(v.feller_satisfied);
        assert!(v.warnings.is_empty());
    }

    #[test]
    fn feller_violation_is_a_warning() {
        let (p, c) = reference_case::<f64>();
        let v = validate(&p.with_eta(0.3), &c).unwrap();
        assert!(!v.feller_satisfied);
        assert_eq!(v.warnings.len(), 1);
    }

    #[test]
    fn negative_strike_rejected() {
        let (p, mut c) = reference_case::<f64>();
        c.strike = -1.0;
        match validate(&p, &c) {
            Err(CvaError::Validation(msgs)) => assert_eq!(msgs, vec!["strike must be positive".to_string()]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn all_violations_are_reported() {
        let (mut p, mut c) = reference_case::<f64>();
        p.equity.sigma = 0.0;
        p.corr.rho = 1.5;
        c.recovery = 1.0;
        match validate(&p, &c) {
            Err(CvaError::Validation(msgs)) => assert_eq!(msgs.len(), 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn validate_is_idempotent() {
        let (p, c) = reference_case::<f64>();
        let p = p.with_eta(0.5);
        assert_eq!(validate(&p, &c).unwrap(), validate(&p, &c).unwrap());
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.as_str().parse::<Method>().unwrap(), m);
        }
        assert!("foo".parse::<Method>().is_err());
    }
}
