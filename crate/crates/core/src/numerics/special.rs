//! Normal distribution and modified Bessel functions of the first kind.

use crate::error::{CvaError, Result};
use crate::scalar::Real;

use super::series::{ln_sum_unimodal, SeriesSpec};

/// Standard normal CDF, `Φ(x) = erfc(−x/√2)/2`.
///
/// Saturates to 0/1 for large `|x|`; `Φ(x) + Φ(−x) = 1` to rounding.
pub fn normal_cdf<T: Real>(x: T) -> T {
    T::lit(0.5) * (-x * T::FRAC_1_SQRT_2()).erfc()
}

/// Standard normal density.
pub fn normal_pdf<T: Real>(x: T) -> T {
    let inv_sqrt_2pi = T::FRAC_2_SQRT_PI() * T::FRAC_1_SQRT_2() / T::lit(2.0);
    inv_sqrt_2pi * (-x * x / T::lit(2.0)).exp()
}

/// Arguments up to this value are summed from `n = 0`; larger ones start
/// from the dominant term in the log domain.
pub const BESSEL_DIRECT_MAX_Z: f64 = 30.0;

/// `ln I_ν(z)` for `ν > −1`, `z > 0`, from the power series
/// `I_ν(z) = Σ (z/2)^{ν+2n} / (n! Γ(ν+n+1))`.
///
/// Never overflows; `z = 0` gives `−∞` for `ν > 0` and `0` for `ν = 0`.
pub fn ln_bessel_i<T: Real>(nu: T, z: T, series: &SeriesSpec<T>) -> Result<T> {
    if !(nu > -T::one()) {
        return Err(CvaError::domain("bessel_i", format!("order must exceed -1, got {nu}")));
    }
    if !(z >= T::zero()) || !z.is_finite() {
        return Err(CvaError::domain("bessel_i", format!("argument must be finite and >= 0, got {z}")));
    }
    if z == T::zero() {
        return if nu == T::zero() {
            Ok(T::zero())
        } else if nu > T::zero() {
            Ok(T::neg_infinity())
        } else {
            Err(CvaError::domain("bessel_i", format!("I_ν(0) is unbounded for ν = {nu} < 0")))
        };
    }

    if let Some(v) = ln_bessel_i_asymptotic(nu, z) {
        return Ok(v);
    }

    let half = z / T::lit(2.0);
    let q = half * half;
    let ln_half = half.ln();
    let ln_term = |n: usize| {
        let nf = T::lit(n as f64);
        (nu + T::lit(2.0) * nf) * ln_half - (nf + T::one()).ln_gamma() - (nu + nf + T::one()).ln_gamma()
    };
    let ratio = |n: usize| {
        let nf = T::lit(n as f64);
        q / ((nf + T::one()) * (nf + nu + T::one()))
    };

    let start = if z <= T::lit(BESSEL_DIRECT_MAX_Z) {
        0
    } else {
        // Mode of the terms: n(n+ν) ≈ (z/2)².
        let peak = ((nu * nu + z * z).sqrt() - nu) / T::lit(2.0);
        peak.floor().to_usize().unwrap_or(0)
    };
    ln_sum_unimodal(start, ln_term(start), ratio, series, "bessel_i")
}

/// Beyond this argument (and `z > 2ν²`) the large-argument expansion is used.
pub const BESSEL_ASYMPTOTIC_MIN_Z: f64 = 2000.0;

/// `ln I_ν(z) ≈ z − ½ln(2πz) + ln Σ_k (−1)^k a_k(ν)/z^k` with
/// `a_k = Π_{j=1..k} (4ν² − (2j−1)²) / (k! 8^k)`.
fn ln_bessel_i_asymptotic<T: Real>(nu: T, z: T) -> Option<T> {
    let two = T::lit(2.0);
    if z <= T::lit(BESSEL_ASYMPTOTIC_MIN_Z) || z <= two * nu * nu {
        return None;
    }
    let mu = T::lit(4.0) * nu * nu;
    let mut term = T::one();
    let mut sum = T::one();
    for k in 1..40 {
        let odd = T::lit((2 * k - 1) as f64);
        let next = -term * (mu - odd * odd) / (T::lit(k as f64) * T::lit(8.0) * z);
        if next.abs() >= term.abs() {
            break;
        }
        term = next;
        sum = sum + term;
        if term.abs() < T::epsilon() * sum.abs() {
            break;
        }
    }
    Some(z - (two * T::PI() * z).ln() / two + sum.ln())
}

/// Largest `ln I_ν(z)` that [`bessel_i`] returns without overflow for `T`.
pub fn bessel_overflow_log<T: Real>() -> T {
    T::max_value().ln()
}

/// Modified Bessel function of the first kind `I_ν(z)`.
///
/// Errors with [`CvaError::Overflow`] once `ln I_ν(z)` exceeds
/// [`bessel_overflow_log`] (for `f64` this happens near `z ≈ 713`); use
/// [`ln_bessel_i`] beyond that.
pub fn bessel_i<T: Real>(nu: T, z: T, series: &SeriesSpec<T>) -> Result<T> {
    let ln = ln_bessel_i(nu, z, series)?;
    if ln > bessel_overflow_log::<T>() {
        return Err(CvaError::overflow(
            "bessel_i",
            format!("I_{nu}({z}) = exp({ln}) exceeds the representable range"),
        ));
    }
    Ok(ln.exp())
}
