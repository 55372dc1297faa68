use thiserror::Error;

/// Every failure the pipeline can report.
#[derive(Debug, Error)]
pub enum Error {
    #[error("decode error in {field}: {message}")]
    Decode { field: &'static str, message: String },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error("training error: {0}")]
    Training(String),

    #[error("model load error in {field}: {message}")]
    ModelLoad { field: String, message: String },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn decode(field: &'static str, message: impl Into<String>) -> Self {
        Error::Decode {
            field,
            message: message.into(),
        }
    }

    pub(crate) fn model_load(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::ModelLoad {
            field: field.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
