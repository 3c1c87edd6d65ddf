//! Log-domain summation of positive, unimodal power series.

use serde::{Deserialize, Serialize};

use crate::error::{CvaError, Result};
use crate::scalar::Real;

/// Truncation control for the Bessel and conditional-MGF series.
///
/// `max_order` caps the number of terms summed around the dominant term;
/// summation stops once the bounded remaining tail falls below
/// `tail_tol` times the partial sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesSpec<T> {
    pub max_order: usize,
    pub tail_tol: T,
}

impl<T: Real> Default for SeriesSpec<T> {
    fn default() -> Self {
        Self {
            max_order: 2_000_000,
            tail_tol: T::lit(1e-12),
        }
    }
}

impl<T: Real> SeriesSpec<T> {
    pub fn new(max_order: usize, tail_tol: T) -> Result<Self> {
        let spec = Self { max_order, tail_tol };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        if self.max_order < 1 {
            errs.push("max_order must be at least 1".to_string());
        }
        if !(self.tail_tol > T::zero()) {
            errs.push("tail_tol must be positive".to_string());
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(CvaError::Validation(errs))
        }
    }
}

/// Returns `ln Σ_{n≥0} t_n` for a positive series with unimodal terms.
///
/// `start` should be (near) the index of the largest term and `ln_start` its
/// logarithm; `ratio(n)` is `t_{n+1}/t_n`. Terms are accumulated relative to
/// `t_start`, walking outwards in both directions, so the sum never
/// overflows even when `t_start` itself is not representable.
pub(crate) fn ln_sum_unimodal<T, R>(
    start: usize,
    ln_start: T,
    ratio: R,
    spec: &SeriesSpec<T>,
    context: &'static str,
) -> Result<T>
where
    T: Real,
    R: Fn(usize) -> T,
{
    let one = T::one();
    let mut sum = one;
    let mut terms = 1usize;

    // Upward tail.
    let mut term = one;
    let mut n = start;
    loop {
        let r = ratio(n);
        term = term * r;
        sum = sum + term;
        terms += 1;
        n += 1;
        // Past the mode every later ratio is ≤ r, so the rest is geometric.
        if r < one && term / (one - r) <= spec.tail_tol * sum {
            break;
        }
        if term == T::zero() {
            break;
        }
        if terms >= spec.max_order {
            return Err(CvaError::Series {
                context,
                terms,
                last_relative: (term / sum).as_f64(),
            });
        }
    }

    // Downward tail, finite.
    let mut term = one;
    let mut n = start;
    while n > 0 {
        term = term / ratio(n - 1);
        sum = sum + term;
        terms += 1;
        n -= 1;
        if n == 0 || term == T::zero() {
            break;
        }
        // Below the mode each step down shrinks terms by at least this factor.
        let q = one / ratio(n - 1);
        if q < one && term * q / (one - q) <= spec.tail_tol * sum {
            break;
        }
        if terms >= spec.max_order {
            return Err(CvaError::Series {
                context,
                terms,
                last_relative: (term / sum).as_f64(),
            });
        }
    }

    Ok(ln_start + sum.ln())
}
