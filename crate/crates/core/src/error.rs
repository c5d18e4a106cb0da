use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid signature: {0}")]
    Signature(String),
    #[error("invalid structure: {0}")]
    Structure(String),
    #[error("signature mismatch")]
    SignatureMismatch,
    #[error("domain/codomain mismatch: {0}")]
    Composition(String),
    #[error("invalid embedding: {0}")]
    Embedding(String),
    #[error("element out of range: {0}")]
    OutOfRange(String),
    #[error("class mismatch: {0}")]
    ClassMismatch(String),
    #[error("unknown class `{0}`")]
    UnknownClass(String),
    #[error("malformed class file: {0}")]
    ClassFile(String),
    #[error("amalgam search failed: {0}")]
    AmalgamFailure(String),
    #[error("subgroups belong to different parent groups")]
    DifferentParents,
    #[error("resource bound exceeded: {0}")]
    Overflow(String),
    #[error("json: {0}")]
    Json(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
