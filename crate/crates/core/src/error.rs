use thiserror::Error;

/// Errors raised by the design, information-matrix, solver and construction routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("treatment label {label} out of range 1..={t}")]
    LabelOutOfRange { label: usize, t: usize },

    #[error("a sequence needs at least 2 periods, got {0}")]
    TooFewPeriods(usize),

    #[error("need at least {min} treatments, got {t}")]
    TooFewTreatments { t: usize, min: usize },

    #[error("inconsistent dimensions: {0}")]
    Inconsistent(String),

    #[error("empty design")]
    EmptyDesign,

    #[error("invalid proportions: {0}")]
    InvalidProportions(String),

    #[error("matrix is not symmetric (max asymmetry {0:.3e})")]
    Asymmetric(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    Indefinite(f64),

    #[error("class has {blocks} distinct labels but only {t} treatments are available")]
    TooManyBlocks { blocks: usize, t: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("solver did not converge after {iterations} iterations: {detail}")]
    NoConvergence { iterations: usize, detail: String },

    #[error("no nonnegative proportions solve the stationarity system (residual {residual:.3e})")]
    NoProportions { residual: f64 },

    #[error("certificate check `{check}` failed: {detail}")]
    Certificate { check: &'static str, detail: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
