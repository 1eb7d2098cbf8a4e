use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum OsgmError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("stationary point reached (gradient norm {0:e})")]
    StationaryPoint(f64),
    #[error("unsupported parametrization: {0}")]
    UnsupportedParametrization(String),
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("degenerate direction: ‖(I − αΛ)ẑ‖ = {0:e}")]
    DegenerateDirection(f64),
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("scenario not found: {0}")]
    ScenarioNotFound(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for OsgmError {
    fn from(e: std::io::Error) -> Self {
        OsgmError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, OsgmError>;
