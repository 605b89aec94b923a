use thiserror::Error;

/// Coarse classification used by the command line front end to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    /// Input outside the mathematical domain of an operation.
    Domain,
    /// The numerics broke down (singular frames, blowup, event limits).
    Numerical,
    /// File system or serialization failure.
    Io,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid chart: {0}")]
    InvalidChart(String),

    #[error("chart mismatch: {0}")]
    ChartMismatch(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("field of kind real has imaginary part {max_imag:e} (limit {limit:e})")]
    NotReal { max_imag: f64, limit: f64 },

    #[error("singular immersion at node ({i}, {j}): metric factor {factor:e}")]
    SingularImmersion { i: usize, j: usize, factor: f64 },

    #[error("degenerate Moebius frame at node ({i}, {j})")]
    UmbilicFrame { i: usize, j: usize },

    #[error("inconsistent curvature at node ({i}, {j}): H^2 - K = {value:e}")]
    InconsistentCurvature { i: usize, j: usize, value: f64 },

    #[error("family pole at node ({i}, {j}): 1 + 2i h t = 0")]
    PoleOfFamily { i: usize, j: usize },

    #[error("outside validity domain: {0}")]
    Validity(String),

    #[error("curve has an inflection at sample {index} (kappa_E = {kappa:e})")]
    Inflection { index: usize, kappa: f64 },

    #[error("degenerate frame at sample {index}")]
    DegenerateFrame { index: usize },

    #[error("time step {dt:e} exceeds the stability limit {limit:e}")]
    StepSize { dt: f64, limit: f64 },

    #[error("non-finite values after {step} steps")]
    Blowup { step: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::InvalidChart(_)
            | Error::ChartMismatch(_)
            | Error::Domain(_)
            | Error::NotReal { .. }
            | Error::Validity(_)
            | Error::Inflection { .. }
            | Error::StepSize { .. }
            | Error::Parse(_) => ErrorCategory::Domain,
            Error::SingularImmersion { .. }
            | Error::UmbilicFrame { .. }
            | Error::InconsistentCurvature { .. }
            | Error::PoleOfFamily { .. }
            | Error::DegenerateFrame { .. }
            | Error::Blowup { .. } => ErrorCategory::Numerical,
            Error::Io(_) | Error::Csv(_) | Error::Json(_) => ErrorCategory::Io,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
