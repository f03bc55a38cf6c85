use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid sequence: {0}")]
    InvalidSequence(String),
    #[error("invalid weight: {0}")]
    InvalidWeight(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{0} is outside the evaluation domain")]
    Domain(String),
    #[error("t = {t} is beyond the tail-certified range (t < {limit})")]
    Range { t: f64, limit: f64 },
    #[error("no routing rule for {0}")]
    Routing(String),
    #[error("unknown family `{0}`")]
    UnknownFamily(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
