use serde_json::json;
use thiserror::Error;

/// Failures of a CLI run, split by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Invalid model file or failed check; exit code 2.
    #[error("{message}")]
    Validation { kind: &'static str, message: String },
    /// Anything that stopped the computation; exit code 1.
    #[error("{message}")]
    Runtime { kind: &'static str, message: String },
}

impl CliError {
    pub fn validation(kind: &'static str, message: impl Into<String>) -> Self {
        Self::Validation { kind, message: message.into() }
    }

    pub fn runtime(kind: &'static str, message: impl Into<String>) -> Self {
        Self::Runtime { kind, message: message.into() }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Validation { .. } => 2,
            Self::Runtime { .. } => 1,
        }
    }

    pub fn diagnostic(&self) -> String {
        let kind = match self {
            Self::Validation { kind, .. } | Self::Runtime { kind, .. } => kind,
        };
        json!({
            "status": "error",
            "kind": kind,
            "message": self.to_string(),
            "exit_code": self.exit_code(),
        })
        .to_string()
    }
}

impl From<polyterm::Error> for CliError {
    fn from(e: polyterm::Error) -> Self {
        use polyterm::Error as E;
        let kind = match &e {
            E::Schema { .. } => "schema",
            E::Degree { .. } => "degree",
            E::Number(_) => "number",
            E::Param(_) => "parameter",
            E::Constraint(_) => "constraint",
            E::Io { .. } => "io",
            E::Domain { .. } => "domain",
            E::Config(_) => "config",
            E::Theta(_) => "theta",
            E::Divergence(_) => "divergence",
            E::Truncation { .. } => "truncation",
            _ => "numerical",
        };
        let message = e.to_string();
        match e {
            E::Schema { .. } | E::Degree { .. } | E::Number(_) | E::Param(_) | E::Constraint(_) => {
                Self::Validation { kind, message }
            }
            _ => Self::Runtime { kind, message },
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
