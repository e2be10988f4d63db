use std::path::PathBuf;

/// Errors produced by the library and surfaced by the CLI.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("validation error: {0}")]
    Validation(String),

    #[error("degenerate distribution: all components are zero")]
    Degenerate,

    /// A malformed or rejected record in an input file.
    #[error("{path}:{line}: {message}")]
    Parse { path: String, line: usize, message: String },

    #[error("ragged tensor: missing (model, sample) pairs: {}", format_pairs(.missing))]
    Ragged { missing: Vec<(String, String)> },

    #[error("class {0} has zero examples")]
    EmptyClass(String),

    #[error("empty input: {0}")]
    Empty(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("I/O error on {}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("input file not found: {}", .0.display())]
    MissingInput(PathBuf),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    /// An error raised inside one stage of a multi-stage command.
    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

fn format_pairs(pairs: &[(String, String)]) -> String {
    const SHOWN: usize = 20;
    let mut out: Vec<String> = pairs.iter().take(SHOWN).map(|(m, s)| format!("({m}, {s})")).collect();
    if pairs.len() > SHOWN {
        out.push(format!("... {} more", pairs.len() - SHOWN));
    }
    out.join(", ")
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn parse(path: &std::path::Path, line: usize, message: impl Into<String>) -> Self {
        Error::Parse { path: path.display().to_string(), line, message: message.into() }
    }

    /// Tags an error with the stage that raised it.
    pub fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage { stage, source: Box::new(self) }
    }

    /// True for errors caused by user-supplied configuration or arguments.
    pub fn is_usage(&self) -> bool {
        match self {
            Error::Config(_) | Error::MissingInput(_) => true,
            Error::Stage { source, .. } => source.is_usage(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
