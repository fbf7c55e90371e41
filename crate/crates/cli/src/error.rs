use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error in `{field}`: {detail}")]
    Config { field: String, detail: String },

    #[error("{0}")]
    Run(#[from] diskfrac::Error),

    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: std::io::Error },

    #[error("{0}")]
    Strict(String),

    #[error("{0} check(s) failed")]
    ChecksFailed(usize),
}

impl CliError {
    pub fn config(field: &str, detail: impl Into<String>) -> Self {
        CliError::Config { field: field.to_string(), detail: detail.into() }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 2,
            CliError::Strict(_) => 3,
            CliError::Run(_) | CliError::Io { .. } | CliError::ChecksFailed(_) => 1,
        }
    }
}
