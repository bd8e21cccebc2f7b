use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("degenerate geometry: `{0}` and `{1}` share coordinates on a modeled link")]
    DegenerateGeometry(String, String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("interference covariance is not positive definite")]
    NotPositiveDefinite,

    #[error("detection model requires a non-negative SINR, got {0}")]
    NegativeSinr(f64),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("plot error: {0}")]
    Plot(String),
}

impl Error {
    pub(crate) fn dim(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }

    /// Process exit status for the command-line front end: 1 for bad input,
    /// 2 for infeasibility, 3 for I/O and output failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_)
            | Error::DegenerateGeometry(..)
            | Error::Dimension(_)
            | Error::NotPositiveDefinite
            | Error::NegativeSinr(_) => 1,
            Error::Infeasible(_) => 2,
            Error::Io(_) | Error::Csv(_) | Error::Plot(_) => 3,
        }
    }
}
