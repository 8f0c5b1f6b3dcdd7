use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The point handed to the normal oracle is not on the boundary of the epigraph.
    #[error("contract violation: ({what}) at t = {t}, f(x) = {fx}")]
    NotOnBoundary { what: &'static str, t: f64, fx: f64 },

    #[error("oracle returned an invalid value: {0}")]
    Oracle(String),

    /// Upward bracket doubling never reached a feasible scale.
    #[error("line search failed to bracket after {expansions} expansions")]
    BracketExhausted { expansions: u32 },

    /// Bisection can no longer shrink the bracket in floating point.
    #[error("line search bracket [{lo}, {hi}] cannot be refined further")]
    BracketStall { lo: f64, hi: f64 },

    #[error("degenerate epigraph normal: denominator {denominator}")]
    DegenerateNormal { denominator: f64 },

    #[error("invalid step size {0}")]
    InvalidStep(f64),

    #[error("invalid problem field `{field}`: {reason}")]
    Construction { field: String, reason: String },

    #[error("failed to load {path}: at `{field}`: {message}")]
    Load {
        path: String,
        field: String,
        message: String,
    },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn construction(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Construction {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
