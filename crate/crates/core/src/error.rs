use thiserror::Error;

/// Errors raised by the engine.
///
/// Variants split into two families: input problems (syntax, unknown names,
/// degree overflow) and mathematical precondition failures (singular linear
/// part, non-triangular linearization). [`Error::is_input_error`] tells them
/// apart for callers that map errors to exit codes.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("shape mismatch: (d={d1}, m={m1}) vs (d={d2}, m={m2})")]
    ShapeMismatch { d1: usize, m1: u32, d2: usize, m2: u32 },

    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("unknown variable \"{0}\"")]
    UnknownVariable(String),

    #[error("term of degree {degree} exceeds truncation order {order}")]
    DegreeOverflow { degree: u32, order: u32 },

    #[error("component {index} has a nonzero constant term")]
    ConstantTerm { index: usize },

    #[error("{what} must have {expected} components, got {found}")]
    ComponentCount {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("map is not invertible: linear part is singular")]
    NotInvertible,

    #[error("linear part is not lower-triangular in the declared variable order (entry {row},{col})")]
    NonTriangularLinearPart { row: usize, col: usize },

    #[error("unknown generator \"{0}\"")]
    UnknownGenerator(String),

    #[error("generator \"{name}\" is not a {expected}")]
    WrongGeneratorKind { name: String, expected: &'static str },

    #[error("duplicate name \"{0}\"")]
    DuplicateName(String),

    #[error("generators do not commute: {condition} fails for {left}, {right}")]
    NonCommuting {
        condition: String,
        left: String,
        right: String,
    },

    #[error("zero multiplier in recurrence")]
    ZeroMultiplier,

    #[error("discrete variable \"{0}\" needs an integer value")]
    NonIntegerDiscrete(String),

    #[error("quasipolynomial variable mismatch: {0}")]
    VariableMismatch(String),

    #[error("unsupported spectrum: {0}")]
    UnsupportedSpectrum(String),

    #[error("minor enumeration would visit {count} minors, limit is {limit}")]
    SizeLimitExceeded { count: u128, limit: u128 },

    #[error("{0}")]
    Unsupported(String),
}

impl Error {
    pub(crate) fn syntax(position: usize, message: impl Into<String>) -> Self {
        Error::Syntax {
            position,
            message: message.into(),
        }
    }

    /// True for errors caused by malformed or inconsistent input rather than
    /// by a mathematical precondition.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Syntax { .. }
                | Error::UnknownVariable(_)
                | Error::DegreeOverflow { .. }
                | Error::ConstantTerm { .. }
                | Error::ComponentCount { .. }
                | Error::UnknownGenerator(_)
                | Error::WrongGeneratorKind { .. }
                | Error::DuplicateName(_)
                | Error::DimensionMismatch { .. }
                | Error::ShapeMismatch { .. }
                | Error::NonIntegerDiscrete(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
