use thiserror::Error;

/// A parameter condition that failed, with the inequality it enforces.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    /// The condition as written, e.g. `"B > A^2"`.
    pub condition: &'static str,
    /// The offending values.
    pub detail: String,
}

impl Violation {
    pub fn new(condition: &'static str, detail: impl Into<String>) -> Self {
        Self {
            condition,
            detail: detail.into(),
        }
    }
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "requires {} ({})", self.condition, self.detail)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("index error: {0}")]
    Index(String),

    #[error("invalid parameters: {0}")]
    Validation(Violation),

    #[error("no bound states: {0}")]
    NoBoundStates(Violation),

    #[error("numerical failure: {0}")]
    Numeric(String),
}

impl Error {
    pub(crate) fn violation(condition: &'static str, detail: impl Into<String>) -> Self {
        Error::Validation(Violation::new(condition, detail))
    }

    /// The violated condition, for validation-type errors.
    pub fn condition(&self) -> Option<&'static str> {
        match self {
            Error::Validation(v) | Error::NoBoundStates(v) => Some(v.condition),
            _ => None,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
