use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid angle {theta}°: {reason}")]
    InvalidAngle { theta: f64, reason: String },

    #[error("discs {i} and {j} overlap or touch (gap {gap:e})")]
    DisjointnessViolation { i: usize, j: usize, gap: f64 },

    #[error("circle {index} is not orthogonal to the unit circle (residual {residual:e})")]
    NotOrthogonal { index: usize, residual: f64 },

    #[error("disc {index} contains the Cayley pole z = 1")]
    CayleyPoleInsideDisc { index: usize },

    #[error("power iteration did not converge for word {word} after {cycles} cycles")]
    NoConvergence { word: String, cycles: usize },

    #[error("word {word} is not contracting (log-multiplier {u})")]
    NotContracting { word: String, u: f64 },

    #[error("zeta vanishes at s = {re} + {im}i at order {order}")]
    ZeroDenominator { re: f64, im: f64, order: usize },

    #[error("no sign change of Z on (0, 1]")]
    NoSignChange,

    #[error("root finder exceeded {iterations} iterations")]
    MaxIterations { iterations: usize },

    #[error("|Z| = {value:e} below floor on the contour near s = {re} + {im}i")]
    ContourNearZero { re: f64, im: f64, value: f64 },

    #[error("contour integral {value} is not close to an integer (residual {residual})")]
    NonIntegerResult { value: f64, residual: f64 },

    #[error("quadrature refinement exhausted near s = {re} + {im}i")]
    QuadratureDepth { re: f64, im: f64 },

    #[error("leading eigenvalue does not cross 1 on [0, 1] (lambda(0) = {at_zero}, lambda(1) = {at_one})")]
    BracketFailure { at_zero: f64, at_one: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("cache: {0}")]
    Cache(String),
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidAngle { .. } => "InvalidAngle",
            Error::DisjointnessViolation { .. } => "DisjointnessViolation",
            Error::NotOrthogonal { .. } => "NotOrthogonal",
            Error::CayleyPoleInsideDisc { .. } => "CayleyPoleInsideDisc",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::NotContracting { .. } => "NotContracting",
            Error::ZeroDenominator { .. } => "ZeroDenominator",
            Error::NoSignChange => "NoSignChange",
            Error::MaxIterations { .. } => "MaxIterations",
            Error::ContourNearZero { .. } => "ContourNearZero",
            Error::NonIntegerResult { .. } => "NonIntegerResult",
            Error::QuadratureDepth { .. } => "QuadratureDepth",
            Error::BracketFailure { .. } => "BracketFailure",
            Error::InvalidArgument(_) => "InvalidArgument",
            Error::Cache(_) => "Cache",
        }
    }
}
