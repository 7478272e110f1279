use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    Dimension {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("unsupported size: {0}")]
    UnsupportedSize(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("lattice bin (k={k}, l={l}) is already occupied")]
    Collision { k: usize, l: usize },

    #[error("chirp is not sparse in the lattice: off-support energy fraction {fraction:.3e}")]
    NotSparse { fraction: f64 },

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("{}", format_config_errors(.path, .violations))]
    Config {
        path: Option<PathBuf>,
        violations: Vec<ConfigViolation>,
    },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

/// One problem found while loading a scenario file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigViolation {
    /// 1-based line number, when the problem is tied to a line.
    pub line: Option<usize>,
    pub field: Option<String>,
    pub message: String,
}

impl std::fmt::Display for ConfigViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if let Some(line) = self.line {
            write!(f, "line {line}: ")?;
        }
        if let Some(field) = &self.field {
            write!(f, "{field}: ")?;
        }
        f.write_str(&self.message)
    }
}

fn format_config_errors(path: &Option<PathBuf>, violations: &[ConfigViolation]) -> String {
    let mut out = match path {
        Some(p) => format!("invalid scenario {}", p.display()),
        None => "invalid scenario".to_string(),
    };
    for v in violations {
        out.push_str("\n  ");
        out.push_str(&v.to_string());
    }
    out
}

impl Error {
    pub(crate) fn dim(context: &'static str, expected: usize, actual: usize) -> Self {
        Error::Dimension {
            context,
            expected,
            actual,
        }
    }

    /// True for errors caused by user-supplied configuration.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config { .. } | Error::Configuration(_) | Error::Parameter(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
