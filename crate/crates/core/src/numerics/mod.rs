//! Special functions, adaptive quadrature and random streams.

mod quadrature;
mod rng;
mod series;
mod special;

pub use quadrature::{
    integrate_adaptive, try_integrate, try_integrate_detailed, try_integrate_semi_infinite, Integral,
    QuadratureSpec,
};
pub use rng::{rng_stream, NormalStream};
pub use series::SeriesSpec;
pub(crate) use series::ln_sum_unimodal;
pub use special::{
    bessel_i, bessel_overflow_log, ln_bessel_i, normal_cdf, normal_pdf, BESSEL_ASYMPTOTIC_MIN_Z, BESSEL_DIRECT_MAX_Z,
};
