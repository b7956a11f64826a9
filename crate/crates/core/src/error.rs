use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Net profit condition violated; the analytic solvers refuse to run.
    #[error("certain ruin: net-profit quantity rho = {rho} >= 1")]
    CertainRuin { rho: f64 },

    #[error("infinite moment: {0}")]
    InfiniteMoment(String),

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("configuration error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// True for errors caused by bad input rather than a failed computation.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter { .. }
                | Error::InvalidDistribution(_)
                | Error::Unsupported(_)
                | Error::Config { .. }
                | Error::Json(_)
        )
    }
}

pub(crate) fn ensure_positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be a positive finite number",
        })
    }
}

pub(crate) fn ensure_nonnegative(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be a nonnegative finite number",
        })
    }
}
