use thiserror::Error;

pub type Result<T, E = BiwaveError> = std::result::Result<T, E>;

/// Every failure the library can report.
///
/// Variants carry a stable kebab-case code (see [`BiwaveError::code`]) so
/// callers such as the scenario runner can report them without matching on
/// message text.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum BiwaveError {
    #[error("wave speeds must be finite (a = {a}, b = {b})")]
    NonFiniteSpeed { a: f64, b: f64 },
    #[error("wave speeds must be positive (a = {a}, b = {b})")]
    NonPositiveSpeed { a: f64, b: f64 },
    #[error("degenerate wave speeds: a^2 = b^2 ({a}, {b})")]
    DegenerateSpeeds { a: f64, b: f64 },
    #[error("wave speeds out of order: need a^2 > b^2, got a = {a}, b = {b}")]
    SpeedOrdering { a: f64, b: f64 },
    #[error("spatial dimension must be at least 1, got {0}")]
    InvalidDimension(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("{what} does not support dimension {n}")]
    UnsupportedDimension { what: &'static str, n: usize },
    #[error("{solver} solver requires {expected} dimension, got n = {n}")]
    WrongParity {
        solver: &'static str,
        expected: &'static str,
        n: usize,
    },
    #[error("quadrature order must be at least {min}, got {got}")]
    InvalidOrder { min: usize, got: usize },
    #[error("non-finite value: {0}")]
    NonFinite(&'static str),
    #[error("negative radius {0}")]
    NegativeRadius(f64),
    #[error("negative time {0}")]
    NegativeTime(f64),
    #[error("malformed integration bounds: {0}")]
    MalformedBounds(String),
    #[error("wrong quadrature rule: expected {expected}, got {got}")]
    WrongRule { expected: String, got: String },
    #[error("finite-difference stencil leaves the evaluable domain: {0}")]
    StencilOutOfDomain(String),
    #[error("non-finite sample at {0}")]
    NonFiniteSample(f64),
    #[error("field {0} is not a trigonometric polynomial")]
    NotTrigPoly(&'static str),
    #[error("trigonometric polynomial is not conjugate-symmetric at wavevector {0:?}")]
    NotConjugateSymmetric(Vec<i32>),
    #[error("incompatible trigonometric polynomials: {0}")]
    IncompatibleTrigPoly(String),
    #[error("zero wavevector has no oscillatory mode; use zero_mode")]
    ZeroFrequency,
    #[error("mode coefficient self-test failed: linear solve and closed form differ by {0:e}")]
    OracleSelfTest(f64),
    #[error("ODE integrator failed: {0}")]
    IntegratorFailure(String),
    #[error("forcing is undefined at t = {t} (horizon {horizon})")]
    ForcingHorizon { t: f64, horizon: f64 },
    #[error("invalid elastic parameters: {0}")]
    InvalidElastic(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

impl BiwaveError {
    pub fn code(&self) -> &'static str {
        use BiwaveError::*;
        match self {
            NonFiniteSpeed { .. } => "non-finite-speed",
            NonPositiveSpeed { .. } => "non-positive-speed",
            DegenerateSpeeds { .. } => "degenerate-speeds",
            SpeedOrdering { .. } => "ordering",
            InvalidDimension(_) => "invalid-dimension",
            DimensionMismatch { .. } => "dimension-mismatch",
            UnsupportedDimension { .. } => "unsupported-dimension",
            WrongParity { .. } => "wrong-parity",
            InvalidOrder { .. } => "invalid-order",
            NonFinite(_) => "non-finite",
            NegativeRadius(_) => "negative-radius",
            NegativeTime(_) => "negative-time",
            MalformedBounds(_) => "malformed-bounds",
            WrongRule { .. } => "wrong-rule",
            StencilOutOfDomain(_) => "stencil-out-of-domain",
            NonFiniteSample(_) => "non-finite-sample",
            NotTrigPoly(_) => "not-trig-poly",
            NotConjugateSymmetric(_) => "not-conjugate-symmetric",
            IncompatibleTrigPoly(_) => "incompatible-trig-poly",
            ZeroFrequency => "zero-frequency",
            OracleSelfTest(_) => "oracle-self-test",
            IntegratorFailure(_) => "integrator-failure",
            ForcingHorizon { .. } => "forcing-horizon",
            InvalidElastic(_) => "invalid-elastic",
            InvalidGrid(_) => "invalid-grid",
            InvalidConfig(_) => "invalid-config",
        }
    }
}
