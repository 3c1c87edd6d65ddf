use thiserror::Error;

/// Errors raised by the pricing engine.
///
/// Numerical payloads are stored as `f64` regardless of the scalar type the
/// computation ran in.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CvaError {
    #[error("domain error in {context}: {message}")]
    Domain {
        context: &'static str,
        message: String,
    },

    #[error(
        "adaptive quadrature did not converge after {subdivisions} subdivisions \
         (estimate {estimate:e}, error bound {error_bound:e})"
    )]
    Quadrature {
        estimate: f64,
        error_bound: f64,
        subdivisions: usize,
    },

    #[error(
        "series in {context} not converged after {terms} terms \
         (last relative term {last_relative:e})"
    )]
    Series {
        context: &'static str,
        terms: usize,
        last_relative: f64,
    },

    #[error("overflow in {context}: {message}")]
    Overflow {
        context: &'static str,
        message: String,
    },

    /// A failure inside an integrand, tagged with the abscissa that caused it.
    #[error("{context} failed at {point}: {source}")]
    AtPoint {
        context: &'static str,
        point: f64,
        source: Box<CvaError>,
    },

    #[error("invalid parameters: {}", .0.join("; "))]
    Validation(Vec<String>),

    #[error("configuration error: {0}")]
    Config(String),
}

impl CvaError {
    pub(crate) fn domain(context: &'static str, message: impl Into<String>) -> Self {
        CvaError::Domain {
            context,
            message: message.into(),
        }
    }

    pub(crate) fn overflow(context: &'static str, message: impl Into<String>) -> Self {
        CvaError::Overflow {
            context,
            message: message.into(),
        }
    }

    pub(crate) fn at_point(context: &'static str, point: f64) -> impl FnOnce(CvaError) -> CvaError {
        move |e| CvaError::AtPoint {
            context,
            point,
            source: Box::new(e),
        }
    }

    /// `true` for errors caused by bad inputs rather than numerical failure.
    pub fn is_config_error(&self) -> bool {
        matches!(self, CvaError::Validation(_) | CvaError::Config(_))
    }
}

pub type Result<T, E = CvaError> = std::result::Result<T, E>;
