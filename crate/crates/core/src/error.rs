use thiserror::Error;

#[derive(Error, Debug)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("invalid boundary specification: {0}")]
    InvalidBoundary(String),
    #[error("requested {requested} modes but the grid resolves at most {cap}")]
    TooManyModes { requested: usize, cap: usize },
    #[error("invalid reaction matrix: {0}")]
    InvalidMatrix(String),
    #[error("mode index {0} is outside the retained basis")]
    ModeOutOfRange(usize),
    #[error("mode {0} has zero Laplace eigenvalue and carries no hyperbola")]
    ConstantMode(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid source/sink profile: {0}")]
    InvalidProfile(String),
    #[error("operator requires {expected} placement of the source/sink profile")]
    WrongPlacement { expected: &'static str },
    #[error("the Neumann part of the boundary is empty")]
    EmptyNeumannBoundary,
    #[error("quotient undefined: {0}")]
    DegenerateVector(String),
    #[error("truncation too short: tail bound {tail:.3e} is not below the envelope value {d1max:.3e}")]
    TruncationTooShort { tail: f64, d1max: f64 },
    #[error("numerical blow-up at t = {t}: {what}")]
    NumericalBlowUp { t: f64, what: String },
    #[error("growth-rate fit window is empty: {0}")]
    EmptyFitWindow(String),
    #[error("expression error: {0}")]
    Expression(String),
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
