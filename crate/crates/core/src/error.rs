use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("spectral point {lambda} lies outside the validity region {region}")]
    DomainViolation { lambda: Complex64, region: &'static str },

    #[error("tail truncation unreliable: {0}")]
    TruncationUnreliable(String),

    #[error("time {t} exceeds horizon {horizon}")]
    Horizon { t: f64, horizon: f64 },

    #[error("value overflows native floating point (log-magnitude {log_magnitude}); use the scaled form")]
    Overflow { log_magnitude: f64 },

    #[error("accuracy: {0}")]
    Accuracy(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("unknown registry entry `{0}`")]
    UnknownEntry(String),

    #[error("spectral point {lambda} within {distance:e} of the pole {pole}")]
    PoleProximity { lambda: Complex64, pole: f64, distance: f64 },

    #[error("non-finite integrand value at lambda = {lambda}")]
    NonFinite { lambda: Complex64 },

    #[error("missing boundary trace: {0}")]
    MissingTrace(&'static str),

    #[error("least-squares system is rank deficient (condition {condition:e}); use a positive Tikhonov weight")]
    RankCollapse { condition: f64 },

    #[error("refused: {0}")]
    Refused(String),
}

impl Error {
    /// Accuracy-class failures (contour or quadrature parameters too coarse),
    /// as opposed to invalid input.
    pub fn is_accuracy(&self) -> bool {
        matches!(
            self,
            Error::Accuracy(_)
                | Error::NonFinite { .. }
                | Error::TruncationUnreliable(_)
                | Error::Overflow { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
