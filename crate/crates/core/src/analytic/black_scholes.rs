use crate::error::{CvaError, Result};
use crate::numerics::normal_cdf;
use crate::scalar::Real;

/// `d₁,₂(x, τ) = (x − κ + (r ± σ²/2)τ)/(σ√τ)`.
pub fn d1_d2<T: Real>(x: T, tau: T, sigma: T, r: T, log_strike: T) -> (T, T) {
    let vol = sigma * tau.sqrt();
    let d1 = (x - log_strike + (r + sigma * sigma / T::lit(2.0)) * tau) / vol;
    (d1, d1 - vol)
}

fn check_times<T: Real>(t: T, maturity: T) -> Result<T> {
    if t < maturity {
        Ok(maturity - t)
    } else {
        Err(CvaError::domain(
            "bs_call",
            format!("valuation time {t} must precede maturity {maturity}"),
        ))
    }
}

/// Black–Scholes call price at log-spot `x`, time `t`, maturity `maturity`.
///
/// With a vanishing total volatility the discounted intrinsic value
/// `(e^x − K e^{−rτ})⁺` is returned.
pub fn bs_call<T: Real>(x: T, t: T, maturity: T, sigma: T, r: T, strike: T) -> Result<T> {
    let tau = check_times(t, maturity)?;
    let discounted_strike = strike * (-r * tau).exp();
    if sigma * tau.sqrt() == T::zero() {
        return Ok((x.exp() - discounted_strike).max(T::zero()));
    }
    let (d1, d2) = d1_d2(x, tau, sigma, r, strike.ln());
    Ok(x.exp() * normal_cdf(d1) - discounted_strike * normal_cdf(d2))
}

/// `∂c_BS/∂x = e^x N(d₁)`.
pub fn bs_spot_delta<T: Real>(x: T, t: T, maturity: T, sigma: T, r: T, strike: T) -> Result<T> {
    let tau = check_times(t, maturity)?;
    if sigma * tau.sqrt() == T::zero() {
        let itm = x.exp() > strike * (-r * tau).exp();
        return Ok(if itm { x.exp() } else { T::zero() });
    }
    let (d1, _) = d1_d2(x, tau, sigma, r, strike.ln());
    Ok(x.exp() * normal_cdf(d1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_strike_is_the_spot() {
        let x = 100f64.ln();
        let c = bs_call(x, 0.0, 1.0, 0.1, 0.0, 1e-12).unwrap();
        assert!((c - 100.0).abs() < 1e-9);
    }

    #[test]
    fn at_the_money_forward() {
        let c = bs_call(100f64.ln(), 0.0, 1.0, 0.1, 0.0, 100.0).unwrap();
        let oracle = 100.0 * (2.0 * normal_cdf(0.05) - 1.0);
        assert!((c - oracle).abs() < 1e-12);
        assert!((c - 3.987_761_167_674_492).abs() < 1e-9);
    }

    #[test]
    fn small_vol_is_intrinsic() {
        let c = bs_call(110f64.ln(), 0.0, 1.0, 1e-9, 0.0, 100.0).unwrap();
        assert!((c - 10.0).abs() < 1e-9);
        let c0 = bs_call(110f64.ln(), 0.0, 1.0, 0.0, 0.0, 100.0).unwrap();
        assert!((c0 - 10.0).abs() < 1e-12);
    }

    #[test]
    fn bounds_hold() {
        for &s in &[50.0f64, 90.0, 100.0, 130.0] {
            for &r in &[0.0, 0.05] {
                let c = bs_call(s.ln(), 0.0, 2.0, 0.3, r, 100.0).unwrap();
                let lower = (s - 100.0 * (-2.0 * r).exp()).max(0.0);
                assert!(c >= lower - 1e-12 && c <= s);
            }
        }
    }

    #[test]
    fn expired_is_a_domain_error() {
        assert!(bs_call(0.0f64, 1.0, 1.0, 0.2, 0.0, 1.0).is_err());
    }

    #[test]
    fn delta_matches_finite_difference() {
        let (x, h) = (100f64.ln(), 1e-5);
        let up = bs_call(x + h, 0.0, 1.0, 0.2, 0.01, 95.0).unwrap();
        let dn = bs_call(x - h, 0.0, 1.0, 0.2, 0.01, 95.0).unwrap();
        let d = bs_spot_delta(x, 0.0, 1.0, 0.2, 0.01, 95.0).unwrap();
        assert!(((up - dn) / (2.0 * h) - d).abs() < 1e-6);
    }
}
