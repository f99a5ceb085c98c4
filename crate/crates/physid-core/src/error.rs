//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{family}: expected {expected} parameters, got {got}")]
    ArityMismatch {
        family: String,
        expected: usize,
        got: usize,
    },

    #[error("{family}: expected {expected} bodies, got {got}")]
    BodyCountMismatch {
        family: String,
        expected: usize,
        got: usize,
    },

    #[error("{family}: {detail}")]
    InvalidParams { family: String, detail: String },

    #[error("{op} is not defined for family {family}")]
    UnsupportedFamily { family: String, op: &'static str },

    #[error("the uncorrected Euler step is only defined for second-order families")]
    BuggyEulerOnFirstOrder,

    #[error("state diverged at step {step}")]
    Diverged { step: usize },

    #[error("trial {trial} failed: {source}")]
    Trial {
        trial: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("trajectory too short: need {needed} samples, got {got}")]
    TooShort { needed: usize, got: usize },

    #[error("ill-posed problem: {0}")]
    IllPosed(String),

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("invalid argument: {0}")]
    Domain(String),

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    #[error("schema violation in {context}: {msg}")]
    Schema { context: String, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
