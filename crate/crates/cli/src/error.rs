use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] wcboost::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("{0}")]
    Usage(String),
}

impl CliError {
    /// Short machine-readable code for the error JSON.
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Core(err) => match err {
                wcboost::Error::EmptyClass(_) => "empty_class",
                wcboost::Error::Config(_) => "config",
                wcboost::Error::Contract(_) => "contract",
                wcboost::Error::Parse { .. } => "parse",
                wcboost::Error::Label { .. } => "label",
                wcboost::Error::Dimension { .. } => "dimension",
                wcboost::Error::NoWeakHypothesis => "no_weak_hypothesis",
                wcboost::Error::Io(_) => "io",
                wcboost::Error::Json(_) => "json",
            },
            CliError::Io(_) => "io",
            CliError::Json(_) => "json",
            CliError::Usage(_) => "usage",
        }
    }
}
