use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degenerate clock angle {0} (cos δ ≈ 0)")]
    DegenerateClockAngle(f64),
    #[error("gap out of range: {0} (expected 0 ≤ d < 2)")]
    GapOutOfRange(f64),
    #[error("polar degeneracy: |phi| = {0} reaches π/2")]
    PolarDegeneracy(f64),
    #[error("curve parameter out of range: {0} (expected 0 < x ≤ 1)")]
    ParameterOutOfRange(String),
    #[error("nonfinite evaluation at probe {0}")]
    NonfiniteEvaluation(usize),
    #[error("inconclusive decay fit (residual {residual:.3e}, slope {slope:.3})")]
    Inconclusive { slope: f64, residual: f64 },
    #[error("invalid grid: {0}")]
    InvalidGrid(&'static str),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("point is not on the equal-value locus (spread {0:.3e})")]
    NotOnLocus(f64),
    #[error("closed-form pole at Ξ = {0}")]
    ClosedFormPole(f64),
    #[error("p_x is rational at x = {0}")]
    PxRational(String),
    #[error("{0}")]
    Usage(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
