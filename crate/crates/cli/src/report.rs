use std::fmt;
use std::path::Path;

use clap::ValueEnum;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

/// Why a command failed; each kind has a fixed exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags or inputs that do not fit together (2).
    Usage(String),
    /// Answers contradicting monotonicity (3).
    Inconsistent(String),
    /// Data on which nothing can be learned (4).
    Degenerate(String),
    /// Anything else, e.g. unreadable files (1).
    Other(anyhow::Error),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Inconsistent(_) => 3,
            Failure::Degenerate(_) => 4,
            Failure::Other(_) => 1,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "{m}"),
            Failure::Inconsistent(m) => write!(f, "inconsistent answers: {m}"),
            Failure::Degenerate(m) => write!(f, "degenerate data: {m}"),
            Failure::Other(e) => write!(f, "{e:#}"),
        }
    }
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Other(e.into())
    }
}

/// What a command prints, and optionally the file it writes to `--output`.
pub struct Report {
    text: String,
    json: Value,
    artifact: Option<String>,
}

impl Report {
    pub fn new(text: String, json: Value) -> Self {
        Self {
            text,
            json,
            artifact: None,
        }
    }

    pub fn empty() -> Self {
        Self::new(String::new(), Value::Null)
    }

    pub fn with_artifact(mut self, contents: String) -> Self {
        self.artifact = Some(contents);
        self
    }

    pub fn emit(self, format: Format, output: Option<&Path>) -> Result<(), Failure> {
        if let (Some(path), Some(contents)) = (output, &self.artifact) {
            std::fs::write(path, contents).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
        }
        match format {
            Format::Text => print!("{}", self.text),
            Format::Json if !self.json.is_null() => {
                println!("{}", serde_json::to_string_pretty(&self.json).expect("values serialize"))
            }
            Format::Json => {}
        }
        Ok(())
    }
}
