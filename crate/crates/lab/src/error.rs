use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] semiperiodic_core::Error),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("experiment too large: {0}")]
    Budget(String),
}

impl LabError {
    /// CLI exit status: configuration problems are 2, everything else 1.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Config(_) | LabError::Budget(_) => 2,
            _ => 1,
        }
    }
}
