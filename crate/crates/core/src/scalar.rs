//! Scalar abstraction shared by every pricing routine.
//!
//! All numerical code in the crate is written against [`Real`] so that it can
//! run in `f64` (the default, see the aliases at the crate root) or `f32`.
//! Tolerances in the default configurations assume `f64`.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point scalar usable by the pricing engine.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal. Values are always representable (possibly rounded).
    fn lit(x: f64) -> Self;

    /// Complementary error function.
    fn erfc(self) -> Self;

    /// Natural log of `|Γ(x)|`.
    fn ln_gamma(self) -> Self;

    /// Lossy conversion used for diagnostics and error payloads.
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    #[inline]
    fn lit(x: f64) -> Self {
        x
    }

    #[inline]
    fn erfc(self) -> Self {
        libm::erfc(self)
    }

    #[inline]
    fn ln_gamma(self) -> Self {
        libm::lgamma(self)
    }
}

impl Real for f32 {
    #[inline]
    fn lit(x: f64) -> Self {
        x as f32
    }

    #[inline]
    fn erfc(self) -> Self {
        libm::erfcf(self)
    }

    #[inline]
    fn ln_gamma(self) -> Self {
        libm::lgammaf(self)
    }
}
