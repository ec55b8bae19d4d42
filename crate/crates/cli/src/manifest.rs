//! Run manifests: a record of each run that is enough to repeat it.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::request::{Request, VERSION};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    /// RFC 3339 time of the original run; informational only.
    pub timestamp: String,
    pub command: String,
    pub request: Request,
    /// Files written by the run.
    pub outputs: Vec<PathBuf>,
}

impl RunManifest {
    pub fn new(request: Request, outputs: Vec<PathBuf>) -> Self {
        Self {
            version: VERSION.to_string(),
            timestamp: chrono::Utc::now().to_rfc3339(),
            command: request.name().to_string(),
            request,
            outputs,
        }
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read manifest {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Validation(format!("invalid manifest {}: {e}", path.display())))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, crate::format::pretty(self)?)?;
        Ok(())
    }
}

/// Manifest location for an output file: `<output>.manifest.json`.
pub fn manifest_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}
