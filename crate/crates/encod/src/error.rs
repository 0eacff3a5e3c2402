use thiserror::Error;

/// Errors produced by the toolkit.
///
/// The CLI maps input-side variants (parsing, validation, configuration) to
/// exit code 2 and everything else to exit code 1; `is_input_error`
/// implements that split.
#[derive(Debug, Error)]
pub enum EncodError {
    /// A document line that does not match the expected format.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// A value outside its mathematical domain (e.g. vertex not in the
    /// community it is scored against).
    #[error("domain error: {0}")]
    Domain(String),

    /// A document that fails to cover every vertex of the graph.
    #[error("coverage error: {0}")]
    Coverage(String),

    /// A vertex label that does not exist in the graph.
    #[error("unknown label: {0}")]
    Label(String),

    /// The same vertex assigned more than once in a partition document.
    #[error("duplicate vertex: {0}")]
    Duplicate(String),

    /// A feature row with no positive entry, which cannot be normalized.
    #[error("degenerate row: {0}")]
    DegenerateRow(String),

    /// Feature extraction over an ensemble with no communities.
    #[error("empty ensemble: no base communities to extract features from")]
    EmptyEnsemble,

    /// A similarity query on an all-zero vector.
    #[error("degenerate vector: {0}")]
    DegenerateVector(String),

    /// Invalid configuration values.
    #[error("config error: {0}")]
    Config(String),

    /// A cover or partition that violates its structural invariants.
    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl EncodError {
    /// True for errors caused by bad input documents or configuration.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, EncodError::Io(_))
    }
}

pub type Result<T> = std::result::Result<T, EncodError>;
