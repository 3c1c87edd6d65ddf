//! Adaptive Gauss–Kronrod (10/21 point) quadrature.
//!
//! Global bisection of the interval with the largest error estimate, in the
//! style of QUADPACK's `qag` without extrapolation. The error rescaling of
//! `qk21` is kept so that smooth integrands report realistic error bounds.

use serde::{Deserialize, Serialize};

use crate::error::{CvaError, Result};
use crate::scalar::Real;

/// Tolerances for [`integrate_adaptive`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec<T> {
    pub abs_tol: T,
    pub rel_tol: T,
    pub max_subdivisions: usize,
}

impl<T: Real> Default for QuadratureSpec<T> {
    fn default() -> Self {
        Self {
            abs_tol: T::lit(1e-10),
            rel_tol: T::lit(1e-8),
            max_subdivisions: 200,
        }
    }
}

impl<T: Real> QuadratureSpec<T> {
    pub fn new(abs_tol: T, rel_tol: T, max_subdivisions: usize) -> Result<Self> {
        let spec = Self {
            abs_tol,
            rel_tol,
            max_subdivisions,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        if !(self.abs_tol > T::zero()) {
            errs.push("abs_tol must be positive".to_string());
        }
        if !(self.rel_tol > T::zero()) {
            errs.push("rel_tol must be positive".to_string());
        }
        if self.max_subdivisions < 1 {
            errs.push("max_subdivisions must be at least 1".to_string());
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(CvaError::Validation(errs))
        }
    }

    fn tolerance(&self, value: T) -> T {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral<T> {
    pub value: T,
    pub error_bound: T,
    pub intervals: usize,
    pub evaluations: usize,
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_388_444_713,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

#[derive(Debug, Clone, Copy)]
struct Segment<T> {
    a: T,
    b: T,
    value: T,
    error: T,
}

fn check_finite<T: Real>(v: T, x: T) -> Result<T> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(CvaError::domain(
            "integrate_adaptive",
            format!("integrand not finite ({v}) at x = {x}"),
        ))
    }
}

/// One 21-point Kronrod rule on `[a, b]` with the embedded 10-point Gauss
/// estimate used for the error.
fn kronrod21<T, F>(f: &mut F, a: T, b: T) -> Result<Segment<T>>
where
    T: Real,
    F: FnMut(T) -> Result<T>,
{
    let two = T::lit(2.0);
    let center = (a + b) / two;
    let half = (b - a) / two;
    let f_center = check_finite(f(center)?, center)?;

    let mut res_k = f_center * T::lit(WGK[10]);
    let mut res_g = T::zero();
    let mut res_abs = res_k.abs();
    let mut fv1 = [T::zero(); 10];
    let mut fv2 = [T::zero(); 10];

    for j in 0..10 {
        let x = half * T::lit(XGK[j]);
        let (xl, xr) = (center - x, center + x);
        let f1 = check_finite(f(xl)?, xl)?;
        let f2 = check_finite(f(xr)?, xr)?;
        fv1[j] = f1;
        fv2[j] = f2;
        let w = T::lit(WGK[j]);
        res_k = res_k + w * (f1 + f2);
        res_abs = res_abs + w * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g = res_g + T::lit(WG[j / 2]) * (f1 + f2);
        }
    }

    let mean = res_k / two;
    let mut res_asc = T::lit(WGK[10]) * (f_center - mean).abs();
    for j in 0..10 {
        res_asc = res_asc + T::lit(WGK[j]) * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let value = res_k * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != T::zero() && err != T::zero() {
        let scale = (T::lit(200.0) * err / res_asc).powf(T::lit(1.5));
        err = if scale < T::one() { res_asc * scale } else { res_asc };
    }
    let eps = T::epsilon();
    if res_abs > T::min_positive_value() / (T::lit(50.0) * eps) {
        err = err.max(T::lit(50.0) * eps * res_abs);
    }

    Ok(Segment { a, b, value, error: err })
}

/// Adaptive integration of a fallible integrand, returning the full report.
///
/// The integrand's own errors are propagated unchanged; non-convergence
/// yields [`CvaError::Quadrature`] with the best estimate reached.
pub fn try_integrate_detailed<T, F>(mut f: F, a: T, b: T, spec: &QuadratureSpec<T>) -> Result<Integral<T>>
where
    T: Real,
    F: FnMut(T) -> Result<T>,
{
    if !(a.is_finite() && b.is_finite()) || a > b {
        return Err(CvaError::domain(
            "integrate_adaptive",
            format!("need finite a <= b, got [{a}, {b}]"),
        ));
    }
    if a == b {
        return Ok(Integral {
            value: T::zero(),
            error_bound: T::zero(),
            intervals: 0,
            evaluations: 0,
        });
    }

    let mut segments = vec![kronrod21(&mut f, a, b)?];
    let mut evaluations = 21;
    loop {
        let (value, error) = segments
            .iter()
            .fold((T::zero(), T::zero()), |(v, e), s| (v + s.value, e + s.error));
        if error <= spec.tolerance(value) {
            return Ok(Integral {
                value,
                error_bound: error,
                intervals: segments.len(),
                evaluations,
            });
        }
        if segments.len() >= spec.max_subdivisions {
            return Err(CvaError::Quadrature {
                estimate: value.as_f64(),
                error_bound: error.as_f64(),
                subdivisions: segments.len(),
            });
        }

        // Bisect the worst segment; ties resolve to the leftmost for determinism.
        let worst = segments
            .iter()
            .enumerate()
            .fold(0, |best, (i, s)| if s.error > segments[best].error { i } else { best });
        let seg = segments[worst];
        let mid = (seg.a + seg.b) / T::lit(2.0);
        if !(mid > seg.a && mid < seg.b) {
            return Err(CvaError::Quadrature {
                estimate: value.as_f64(),
                error_bound: error.as_f64(),
                subdivisions: segments.len(),
            });
        }
        let left = kronrod21(&mut f, seg.a, mid)?;
        let right = kronrod21(&mut f, mid, seg.b)?;
        evaluations += 42;
        segments[worst] = left;
        segments.insert(worst + 1, right);
    }
}

/// Adaptive integration of a fallible integrand over `[a, b]`.
pub fn try_integrate<T, F>(f: F, a: T, b: T, spec: &QuadratureSpec<T>) -> Result<T>
where
    T: Real,
    F: FnMut(T) -> Result<T>,
{
    try_integrate_detailed(f, a, b, spec).map(|i| i.value)
}

/// Adaptive integration of `f` over `[a, b]` to `max(abs_tol, rel_tol·|I|)`.
pub fn integrate_adaptive<T, F>(mut f: F, a: T, b: T, spec: &QuadratureSpec<T>) -> Result<T>
where
    T: Real,
    F: FnMut(T) -> T,
{
    try_integrate(|x| Ok(f(x)), a, b, spec)
}

/// Integral of `f` over `[a, ∞)`.
///
/// Uses `ζ = a + scale·u/(1−u)`, `u ∈ [0, 1)`, so the mass of `f` near
/// `a + scale` lands in the middle of the unit interval. The Kronrod rule
/// never samples `u = 1`.
pub fn try_integrate_semi_infinite<T, F>(mut f: F, a: T, scale: T, spec: &QuadratureSpec<T>) -> Result<T>
where
    T: Real,
    F: FnMut(T) -> Result<T>,
{
    if !(scale > T::zero()) {
        return Err(CvaError::domain(
            "integrate_semi_infinite",
            format!("scale must be positive, got {scale}"),
        ));
    }
    try_integrate(
        |u| {
            let one_minus = T::one() - u;
            let zeta = a + scale * u / one_minus;
            let jac = scale / (one_minus * one_minus);
            let v = f(zeta)?;
            // The mapped integrand tends to zero at u = 1 for any integrable f;
            // guard the 0·∞ corner explicitly.
            Ok(if v == T::zero() { v } else { v * jac })
        },
        T::zero(),
        T::one(),
        spec,
    )
}
