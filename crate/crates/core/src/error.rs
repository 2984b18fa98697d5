use thiserror::Error;

/// Errors raised by the models, file formats and synthesis.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum HerdError {
    /// An input lies outside the domain where a model is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// Synthesis could not satisfy a geometric or physical constraint.
    #[error("infeasible design: {constraint}")]
    Infeasible { constraint: String },

    /// A text file (design, spec or Touchstone) could not be parsed.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A key-value file lacks a key that has no default.
    #[error("missing required key `{0}`")]
    MissingKey(String),

    /// Touchstone v2 and other formats that are recognized but not handled.
    #[error("unsupported format: {0}")]
    Unsupported(String),
}

impl HerdError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        HerdError::Domain(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        HerdError::Parse {
            line,
            message: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, HerdError>;
