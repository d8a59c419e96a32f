use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// |Tr ρ − 1| exceeded the allowed tolerance.
    #[error("trace error: |Tr - 1| = {deviation:e} exceeds {tolerance:e}")]
    Trace { deviation: f64, tolerance: f64 },

    /// Smallest eigenvalue below the allowed negative tolerance.
    #[error("positivity error: min eigenvalue {min_eigenvalue:e} below -{tolerance:e}")]
    Positivity { min_eigenvalue: f64, tolerance: f64 },

    /// supp(ρ) is not contained in supp(σ).
    #[error("support error: {0}")]
    Support(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("quadrature error: {0}")]
    Quadrature(String),

    #[error("step size error: h = {step:e} exceeds bound {bound:e} at t = {time:e}")]
    StepSize { step: f64, bound: f64, time: f64 },

    /// A configuration field failed validation. `field` names the offender.
    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("cross-check failure: {0}")]
    CrossCheck(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::Domain(_) | Error::Io(_) => 2,
            Error::Quadrature(_)
            | Error::StepSize { .. }
            | Error::Trace { .. }
            | Error::Positivity { .. }
            | Error::Support(_) => 3,
            Error::CrossCheck(_) => 4,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
