use std::io;
use std::path::Path;

/// Everything a subcommand can fail with. Usage errors exit with 1, data
/// and IO errors with 2.
#[derive(Debug, thiserror::Error)]
pub enum ToolError {
    #[error("{0}")]
    Usage(String),
    /// `line` is 1-based; 0 means the file as a whole.
    #[error("{file}{}: {message}", if *line > 0 { format!(":{line}") } else { String::new() })]
    Data { file: String, line: usize, message: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
}

impl ToolError {
    pub fn data(file: impl AsRef<Path>, line: usize, message: impl Into<String>) -> Self {
        ToolError::Data { file: file.as_ref().display().to_string(), line, message: message.into() }
    }

    pub fn io(path: impl AsRef<Path>, source: io::Error) -> Self {
        ToolError::Io { path: path.as_ref().display().to_string(), source }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        ToolError::Usage(message.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            ToolError::Usage(_) => 1,
            ToolError::Data { .. } | ToolError::Io { .. } => 2,
        }
    }
}

pub type Result<T, E = ToolError> = std::result::Result<T, E>;
