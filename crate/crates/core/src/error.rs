use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An input lies outside the domain where the model is defined.
    #[error("domain error: {0}")]
    Domain(String),
    /// A configuration coordinate (angle, slider travel) lies outside its admissible range.
    #[error("range error: {0}")]
    Range(String),
    /// An operation was called on a state that is missing a prerequisite stage.
    #[error("state error: {0}")]
    State(String),
    #[error("shape mismatch: expected {expected}, got {got}")]
    Shape { expected: usize, got: usize },
    #[error("singular configuration: {0}")]
    Singular(String),
    #[error("degenerate feature range for column `{0}`")]
    DegenerateRange(String),
    #[error("training error: {0}")]
    Training(String),
    #[error("unknown material `{0}`")]
    Lookup(String),
    #[error("no material satisfies the thermal requirements")]
    NoCandidate,
    #[error("infeasible problem: {0}")]
    Infeasible(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Json(_) => 2,
            Error::Io { .. } | Error::Csv(_) => 4,
            _ => 3,
        }
    }
}
