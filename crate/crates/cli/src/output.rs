//! Report directory handling.

use std::fs;
use std::path::{Path, PathBuf};

use hpl_core::report::{to_json, write_atomic};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::CliError;

pub const TOOL: &str = "hpl";
pub const DEFAULT_OUT: &str = "hpl-out";

/// Resolution order: `--out`, config `out`, `HPL_OUT`, then `hpl-out`.
pub fn resolve_out_dir(flag: Option<&Path>, config: Option<&Path>) -> PathBuf {
    if let Some(p) = flag.or(config) {
        return p.to_path_buf();
    }
    match std::env::var_os("HPL_OUT") {
        Some(v) if !v.is_empty() => PathBuf::from(v),
        _ => PathBuf::from(DEFAULT_OUT),
    }
}

/// Common wrapper of every JSON report.
#[derive(Serialize)]
pub struct Envelope<'a, R: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'a str,
    pub config: &'a ExperimentConfig,
    pub result: R,
}

pub struct OutDir {
    dir: PathBuf,
    written: Vec<PathBuf>,
}

impl OutDir {
    pub fn create(dir: PathBuf) -> Result<Self, CliError> {
        fs::create_dir_all(&dir).map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
        Ok(Self { dir, written: Vec::new() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    /// Writes `bytes` and returns their SHA-256 in hex.
    pub fn write_bytes(&mut self, name: &str, bytes: &[u8]) -> Result<String, CliError> {
        let path = self.dir.join(name);
        write_atomic(&path, bytes).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
        self.written.push(path);
        Ok(hex::encode(Sha256::digest(bytes)))
    }

    pub fn write_text(&mut self, name: &str, text: &str) -> Result<String, CliError> {
        self.write_bytes(name, text.as_bytes())
    }

    pub fn write_report<R: Serialize>(
        &mut self,
        name: &str,
        command: &str,
        config: &ExperimentConfig,
        result: R,
    ) -> Result<String, CliError> {
        let env = Envelope { tool: TOOL, version: hpl_core::VERSION, command, config, result };
        let text = to_json(&env).map_err(|e| CliError::Io(format!("cannot serialize {name}: {e}")))?;
        self.write_text(name, &text)
    }
}
