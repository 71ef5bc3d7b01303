use thiserror::Error;

/// Which density-matrix invariant a candidate state violated.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum ValidationError {
    #[error("NotHermitian: max|rho - rho^dagger| = {defect:.3e}")]
    NotHermitian { defect: f64 },
    #[error("TraceNotOne: |Tr rho - 1| = {deviation:.3e}")]
    TraceNotOne { deviation: f64 },
    #[error("NotPositive: minimum eigenvalue {min_eigenvalue:.3e}")]
    NotPositive { min_eigenvalue: f64 },
    #[error("NotSquare: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid density matrix: {0}")]
    Validation(#[from] ValidationError),

    #[error("dimension mismatch: {left:?} vs {right:?}")]
    DimensionMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("shape error: {0}")]
    Shape(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("TraceDrift at t = {time}: |Tr rho - 1| = {drift:.3e}")]
    TraceDrift { time: f64, drift: f64 },

    #[error("PositivityLoss at t = {time}: minimum eigenvalue {min_eigenvalue:.3e}")]
    PositivityLoss { time: f64, min_eigenvalue: f64 },

    #[error("decay rate has a pole at t = {0}")]
    PoleAt(f64),

    #[error("derivative is not traceless: |Tr rho_dot| = {0:.3e}")]
    NotTraceless(f64),

    #[error("zero path length with endpoint distance {0:.3e}")]
    InconsistentPath(f64),

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for the CLI: 2 validation, 3 numerical, 4 config.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Validation(_)
            | Error::DimensionMismatch { .. }
            | Error::Shape(_)
            | Error::InvalidArgument(_)
            | Error::NotTraceless(_) => 2,
            Error::Numeric(_)
            | Error::TraceDrift { .. }
            | Error::PositivityLoss { .. }
            | Error::PoleAt(_)
            | Error::InconsistentPath(_) => 3,
            Error::Config(_) | Error::Io(_) | Error::Csv(_) | Error::Json(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
