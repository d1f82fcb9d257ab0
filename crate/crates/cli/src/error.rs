use serde::Serialize;

/// Failure of a run, mapped onto the documented exit codes.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] confperc::Error),
    #[error("output: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use confperc::Error as E;
        match self {
            CliError::Config(_) => 2,
            CliError::Core(e) => match e {
                E::Resource(_) => 3,
                E::NonConvergence { .. } => 4,
                E::Internal(_) => 1,
                _ => 2,
            },
            CliError::Io(_) | CliError::Csv(_) => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self.exit_code() {
            2 => "invalid-config",
            3 => "resource-exhausted",
            4 => "non-convergence",
            _ => "internal",
        }
    }

    pub fn record(&self) -> ErrorRecord {
        let residual = match self {
            CliError::Core(confperc::Error::NonConvergence { residual, .. }) => Some(*residual),
            _ => None,
        };
        ErrorRecord { kind: self.kind(), exit_code: self.exit_code(), message: self.to_string(), residual }
    }
}

/// Machine-readable error, printed as one JSON line on stderr.
#[derive(Debug, Serialize)]
pub struct ErrorRecord {
    pub kind: &'static str,
    pub exit_code: i32,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
}
