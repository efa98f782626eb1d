use thiserror::Error;

#[derive(Debug, Error)]
pub enum DecompError {
    #[error("unit source failed: {0}")]
    Source(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Gateway(#[from] qanoun_llm::GatewayError),

    #[error(transparent)]
    Core(#[from] qanoun_core::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl DecompError {
    /// Whether the failure came from talking to a remote service.
    pub fn is_transport(&self) -> bool {
        matches!(
            self,
            DecompError::Source(_) | DecompError::Gateway(qanoun_llm::GatewayError::Transport { .. })
        )
    }
}

pub type Result<T> = std::result::Result<T, DecompError>;
