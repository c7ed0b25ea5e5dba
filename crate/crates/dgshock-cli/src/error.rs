use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Invalid or inconsistent flags.
    #[error("invalid spec: {0}")]
    Spec(String),
    /// The requested run could not be completed.
    #[error("run failed: {0}")]
    Run(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Spec(_) => 2,
            _ => 3,
        }
    }
}

impl From<dgshock::Error> for CliError {
    fn from(e: dgshock::Error) -> Self {
        CliError::Run(e.to_string())
    }
}
