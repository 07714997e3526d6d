//! `manifest.json` run records, one per output directory. Each command
//! replaces its own stage entry: config snapshot, input and output SHA-256
//! hashes, tool version and wall time.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub stages: BTreeMap<String, StageRecord>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub config: BTreeMap<String, String>,
    pub inputs: BTreeMap<String, String>,
    pub outputs: BTreeMap<String, String>,
    pub seconds: f64,
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

fn display_name(path: &Path) -> String {
    path.file_name().map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned())
}

pub fn hash_paths(paths: &[&Path]) -> Result<BTreeMap<String, String>> {
    paths.iter().map(|p| Ok((display_name(p), sha256_file(p)?))).collect()
}

/// Merges `stage` into the manifest of `dir`, creating it if needed.
pub fn record_stage(dir: &Path, name: &str, stage: StageRecord) -> Result<()> {
    let path = dir.join(MANIFEST_NAME);
    let mut manifest = match std::fs::read_to_string(&path) {
        Ok(text) => serde_json::from_str(&text).map_err(|e| Error::format(path.display().to_string(), e.to_string()))?,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => RunManifest::default(),
        Err(e) => return Err(Error::io(&path, e)),
    };
    manifest.tool = env!("CARGO_PKG_NAME").to_owned();
    manifest.version = env!("CARGO_PKG_VERSION").to_owned();
    manifest.stages.insert(name.to_owned(), stage);
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    std::fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))
}

pub fn read_manifest(dir: &Path) -> Result<RunManifest> {
    let path = dir.join(MANIFEST_NAME);
    let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::format(path.display().to_string(), e.to_string()))
}
