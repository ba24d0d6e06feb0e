use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at byte offset {offset}: {msg}")]
    Parse { offset: usize, msg: String },

    #[error("invalid field `{field}`: {msg}")]
    Field { field: String, msg: String },

    #[error("calibration error in signal {signal}: {msg}")]
    Calibration { signal: usize, msg: String },

    #[error("csv error at row {row}{}: {msg}", .col.map(|c| format!(", column {c}")).unwrap_or_default())]
    Csv { row: usize, col: Option<usize>, msg: String },

    #[error("value out of range: {0}")]
    Range(String),

    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("filter design error: {0}")]
    Design(String),

    #[error("marker row {row} exceeds recording: {msg}")]
    MarkerBounds { row: usize, msg: String },

    #[error("rank deficient basis: column {column} is linearly dependent on earlier columns")]
    RankDeficient { column: usize },

    #[error("classification error: {0}")]
    Classify(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Wraps the error with a description of where it happened.
    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}
