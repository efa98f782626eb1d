use thiserror::Error;

/// Failures mapped onto process exit codes.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags or configuration.
    #[error("{0}")]
    Usage(String),

    /// Malformed input or records that fail validation.
    #[error("{0}")]
    Data(String),

    /// An endpoint could not be reached or kept failing.
    #[error("{0}")]
    Transport(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Data(_) | CliError::Io(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Transport(_) => 3,
        }
    }
}

impl From<qanoun_core::Error> for CliError {
    fn from(e: qanoun_core::Error) -> Self {
        match e {
            qanoun_core::Error::Usage(m) => CliError::Usage(m),
            qanoun_core::Error::Io(e) => CliError::Io(e),
            other => CliError::Data(other.to_string()),
        }
    }
}

impl From<qanoun_llm::GatewayError> for CliError {
    fn from(e: qanoun_llm::GatewayError) -> Self {
        use qanoun_llm::GatewayError as G;
        match e {
            G::Config(m) => CliError::Usage(m),
            G::Transport { .. } => CliError::Transport(e.to_string()),
            G::Core(e) => e.into(),
            G::Io(e) => CliError::Io(e),
            other => CliError::Data(other.to_string()),
        }
    }
}

impl From<qanoun_decomp::DecompError> for CliError {
    fn from(e: qanoun_decomp::DecompError) -> Self {
        use qanoun_decomp::DecompError as D;
        if e.is_transport() {
            return CliError::Transport(e.to_string());
        }
        match e {
            D::Config(m) => CliError::Usage(m),
            D::Gateway(g) => g.into(),
            D::Core(c) => c.into(),
            D::Io(e) => CliError::Io(e),
            other => CliError::Data(other.to_string()),
        }
    }
}

impl From<qanoun_service::ServiceError> for CliError {
    fn from(e: qanoun_service::ServiceError) -> Self {
        use qanoun_service::ServiceError as S;
        match e {
            S::Config(m) | S::BadRequest(m) => CliError::Usage(m),
            S::Io(e) => CliError::Io(e),
            other => CliError::Data(other.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
