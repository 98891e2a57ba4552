use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::ReportError;

pub const MANIFEST_FILE: &str = "manifest.json";

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Provenance record written beside every set of outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command_line: String,
    pub config_digest: String,
    pub seed: u64,
    pub inputs: BTreeMap<String, String>,
    pub tool_version: String,
    pub timestamp: String,
    /// Output file (relative to the manifest) to its SHA-256.
    pub outputs: BTreeMap<String, String>,
}

/// An output directory that remembers what was written into it.
#[derive(Debug)]
pub struct OutputDir {
    root: PathBuf,
    written: BTreeMap<String, String>,
}

impl OutputDir {
    pub fn create(root: impl Into<PathBuf>) -> Result<Self, ReportError> {
        let root = root.into();
        fs::create_dir_all(&root)?;
        Ok(Self { root, written: BTreeMap::new() })
    }

    pub fn path(&self) -> &Path {
        &self.root
    }

    /// Writes `bytes` to `name`, a path relative to the directory.
    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), ReportError> {
        if name == MANIFEST_FILE {
            return Err(ReportError::Invalid(format!("{MANIFEST_FILE} is reserved")));
        }
        let path = self.root.join(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(&path, bytes)?;
        self.written.insert(name.replace('\\', "/"), sha256_hex(bytes));
        Ok(())
    }

    pub fn written(&self) -> &BTreeMap<String, String> {
        &self.written
    }

    /// Writes the manifest and returns it.
    pub fn finish(self, mut manifest: RunManifest) -> Result<RunManifest, ReportError> {
        manifest.outputs = self.written;
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        fs::write(self.root.join(MANIFEST_FILE), text)?;
        Ok(manifest)
    }
}

/// Current UTC time, ISO-8601 with second precision.
pub fn timestamp_now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}
