use thiserror::Error;

/// Failures of a CLI invocation, split by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// An engine error, with the operation and entity it concerns.
    #[error("{context}: {source}")]
    Core {
        context: String,
        source: germlab_core::Error,
    },
    #[error("{0}")]
    Input(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn core(context: impl Into<String>, source: germlab_core::Error) -> Self {
        CliError::Core {
            context: context.into(),
            source,
        }
    }

    /// 1 for mathematical precondition failures, 2 for input errors.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core { source, .. } if !source.is_input_error() => 1,
            _ => 2,
        }
    }
}
