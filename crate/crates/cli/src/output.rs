use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use corrlab::mating::sha256_hex;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: invalid JSON: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("{path}: {source}")]
    Format { path: PathBuf, source: corrlab::io::FormatError },
    #[error("{0}")]
    Domain(String),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Io { .. } => "io",
            CliError::Json { .. } | CliError::Format { .. } => "format",
            CliError::Domain(_) => "domain",
        }
    }

    pub fn to_json(&self, command: &str) -> Value {
        json!({ "error": { "kind": self.kind(), "command": command, "message": self.to_string() } })
    }
}

pub fn domain(e: impl std::fmt::Display) -> CliError {
    CliError::Domain(e.to_string())
}

pub fn read_json(path: &Path) -> Result<Value, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })?;
    serde_json::from_str(&text).map_err(|source| CliError::Json { path: path.into(), source })
}

/// Parses `path` with a format reader, attaching the path to errors.
pub fn load<T>(path: &Path, parse: impl Fn(&Value) -> Result<T, corrlab::io::FormatError>) -> Result<T, CliError> {
    parse(&read_json(path)?).map_err(|source| CliError::Format { path: path.into(), source })
}

#[derive(Debug, Clone, Serialize)]
pub struct Artifact {
    pub path: PathBuf,
    pub sha256: String,
    pub bytes: usize,
}

/// Collects the files a run emits.
#[derive(Debug, Default)]
pub struct Emitter {
    pub artifacts: Vec<Artifact>,
}

impl Emitter {
    /// Writes through a temporary file in the target directory and renames it
    /// into place, so a partial file never appears at `path`.
    pub fn write(&mut self, path: &Path, bytes: &[u8]) -> Result<(), CliError> {
        let io = |source| CliError::Io { path: path.into(), source };
        let dir = match path.parent() {
            Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
            _ => PathBuf::from("."),
        };
        let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(io)?;
        tmp.write_all(bytes).map_err(io)?;
        tmp.as_file().sync_all().map_err(io)?;
        tmp.persist(path).map_err(|e| io(e.error))?;
        self.artifacts.push(Artifact { path: path.into(), sha256: sha256_hex(bytes), bytes: bytes.len() });
        Ok(())
    }

    pub fn write_json(&mut self, path: &Path, v: &Value) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(v).expect("JSON values serialize");
        text.push('\n');
        self.write(path, text.as_bytes())
    }
}

/// `path` with `suffix` appended to the file name.
pub fn sidecar(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}
