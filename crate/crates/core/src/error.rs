use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong across the library.
///
/// Sampling and bracketing failures carry enough payload (the offending point,
/// the trisection depth) for a caller to report them without re-running the
/// computation.
#[derive(Debug, Error)]
pub enum Error {
    /// A form degree outside `0..=n`.
    #[error("degree {degree} out of range for dimension {n}")]
    DegreeOutOfRange { degree: usize, n: usize },

    /// A coordinate index outside `1..=n` (indices are 1-based).
    #[error("index {value} outside 1..={n}")]
    IndexOutOfRange { value: usize, n: usize },

    /// Mismatched dimensions between two objects that must agree.
    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    /// A sampler could not produce a value at `point`.
    ///
    /// For cloud-backed fields this is how a derivative stencil tells the user
    /// which face center their data is missing.
    #[error("sampling failed at {point:?}: {reason}")]
    Sampling { point: Vec<f64>, reason: String },

    /// Expression syntax error, 1-based line/column.
    #[error("parse error at {line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    /// A form expression term whose wedge degree disagrees with the declared degree.
    #[error("degree mismatch: declared {declared}, found term of degree {found}")]
    DegreeMismatch { declared: usize, found: usize },

    /// An interval with `a >= b`.
    #[error("degenerate interval [{a}, {b}]")]
    DegenerateInterval { a: f64, b: f64 },

    /// Face axis outside `1..=k`.
    #[error("face axis {axis} out of range for domain dimension {k}")]
    AxisOutOfRange { axis: usize, k: usize },

    /// Invalid configuration value (non-positive eps, zero subdivisions, ...).
    #[error("invalid configuration: {0}")]
    Config(String),

    /// An operation that needs an analytic derivative was called on a field
    /// without one.
    #[error("unsupported operation: {0}")]
    Unsupported(String),

    /// The trisection step could not bracket a sign change of the flux
    /// mismatch; the flux-continuity hypothesis is numerically violated.
    #[error("bracketing failure at trisection depth {depth}: {detail}")]
    Bracketing { depth: usize, detail: String },

    /// Malformed input file (data cloud, chain description).
    #[error("invalid {what}: {detail}")]
    Format { what: &'static str, detail: String },
}

impl Error {
    pub(crate) fn dim(context: &'static str, expected: usize, actual: usize) -> Self {
        Error::DimensionMismatch {
            context,
            expected,
            actual,
        }
    }
}
