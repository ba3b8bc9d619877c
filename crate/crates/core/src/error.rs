use thiserror::Error;

/// Errors raised by the library. The CLI maps these onto its exit codes.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed instance data: dimension mismatches, empty sets, bad indices,
    /// non-finite coordinates, unparseable files.
    #[error("instance format error: {0}")]
    InstanceFormat(String),

    /// A point was used outside the domain of the operation (e.g. not in A or B),
    /// or parameters fall outside the admissible region.
    #[error("domain error: {0}")]
    Domain(String),

    /// Invalid numeric parameters (contraction constants, iteration limits, ...).
    #[error("parameter error: {0}")]
    Parameter(String),

    /// The region/branch combination has no defined value of the premise factor.
    #[error("unsupported parameters: {0}")]
    ParamsUnsupported(String),

    /// An analysis was requested whose precondition does not hold.
    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
