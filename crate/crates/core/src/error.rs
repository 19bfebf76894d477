use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty reduction")]
    EmptyReduction,
    #[error("NaN is not an extended real")]
    NotANumber,
    #[error("degenerate grid: {0}")]
    DegenerateGrid(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid not uniform")]
    GridNotUniform,
    #[error("off-grid evaluation at x = {0}")]
    OffGrid(f64),
    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),
    #[error("invalid function: {0}")]
    InvalidFunction(String),
    #[error("invalid constant: {0}")]
    InvalidConstant(String),
    #[error("product precondition violated: {reason} (witness {witness:?})")]
    ProductPrecondition { reason: String, witness: Vec<f64> },
    #[error("improper primal")]
    ImproperPrimal,
    #[error("improper conjugate")]
    ImproperConjugate,
    #[error("improper input")]
    ImproperInput,
    #[error("no affine minorant on this dual grid")]
    NoAffineMinorant,
    #[error("unknown base point")]
    UnknownBasePoint,
    #[error("direction exits domain")]
    DirectionExitsDomain,
    #[error("anchor precondition violated: e(x,x) = {0} at x = {1}")]
    AnchorPrecondition(f64, f64),
    #[error("kernel precondition violated: {0}")]
    KernelPrecondition(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("no applicable stability bound")]
    NoApplicableStabilityBound,
    #[error("no probes")]
    NoProbes,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
