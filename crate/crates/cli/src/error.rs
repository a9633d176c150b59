use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config schema error: {0}")]
    Schema(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error(transparent)]
    Core(#[from] ocdm_core::Error),

    #[error("{path}: {source}")]
    File {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("self-test failed: {0}")]
    SelfTest(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    ThreadPool(#[from] rayon::ThreadPoolBuildError),
}

impl CliError {
    /// Process exit status: 2 schema, 3 precondition, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Schema(_) => 2,
            CliError::Precondition(_) => 3,
            CliError::Core(e) if e.is_precondition() => 3,
            _ => 1,
        }
    }
}

pub fn file_error(path: &std::path::Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::File {
        path: path.display().to_string(),
        source,
    }
}
