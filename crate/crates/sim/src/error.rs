use std::process::ExitCode;

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] bicmb_core::Error),
    #[error("I/O error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("TOML error: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("slope not estimable: {0}")]
    NotEstimable(String),
    #[error("self-test failed: {0}")]
    SelfTest(String),
}

pub type SimResult<T> = Result<T, SimError>;

impl SimError {
    pub fn config(msg: impl Into<String>) -> Self {
        SimError::Config(msg.into())
    }

    /// 1 for configuration and input problems, 2 for internal consistency
    /// failures.
    pub fn exit_code(&self) -> ExitCode {
        use bicmb_core::Error as E;
        match self {
            SimError::Core(E::InternalConsistency(_) | E::DegenerateFactorization(_)) | SimError::SelfTest(_) => {
                ExitCode::from(2)
            }
            _ => ExitCode::from(1),
        }
    }
}
