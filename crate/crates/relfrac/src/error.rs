use std::path::PathBuf;

use relfrac_core::Error as CoreError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed file {}: {detail}", path.display())]
    Format { path: PathBuf, detail: String },

    #[error(transparent)]
    Core(#[from] CoreError),

    /// A run finished and wrote its artifacts but some part of it failed.
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn config(detail: impl Into<String>) -> Self {
        Self::Config(detail.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) | Self::Io { .. } | Self::Format { .. } => EXIT_CONFIG,
            Self::Core(e) => match e {
                CoreError::Config(_)
                | CoreError::Domain { .. }
                | CoreError::Shape(_)
                | CoreError::Infeasible { .. }
                | CoreError::Truncation { .. } => EXIT_CONFIG,
                CoreError::Overflow { .. }
                | CoreError::Numerical { .. }
                | CoreError::Projection(_)
                | CoreError::NonConvergence { .. }
                | CoreError::Positivity { .. } => EXIT_NUMERICAL,
            },
            Self::Failed(_) => EXIT_NUMERICAL,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_the_error_class() {
        assert_eq!(CliError::config("x").exit_code(), EXIT_CONFIG);
        assert_eq!(CliError::from(CoreError::Config("V1 <= 0".into())).exit_code(), EXIT_CONFIG);
        let stuck = CoreError::NonConvergence {
            iterations: 3,
            residual: 1.0,
            history: vec![],
        };
        assert_eq!(CliError::from(stuck).exit_code(), EXIT_NUMERICAL);
        assert_eq!(CliError::Failed("criterion 8".into()).exit_code(), EXIT_NUMERICAL);
    }
}
