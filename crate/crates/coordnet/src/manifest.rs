//! Run manifests: what went into a command and what came out.
//!
//! The manifest digest is the SHA-256 of the manifest's compact JSON. Every
//! output directory also gets `artifacts.json`, which lists each emitted file
//! with its own SHA-256 next to the manifest digest.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::Config;
use crate::error::{Error, Result};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn file_sha256(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(sha256_hex(&bytes))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InputDigest {
    /// File name without directories, so relocated inputs hash the same.
    pub name: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub seed: u64,
    pub config: Config,
    pub inputs: Vec<InputDigest>,
    /// First and last record timestamps (epoch seconds).
    pub corpus_span: Option<(i64, i64)>,
    pub counts: BTreeMap<String, u64>,
}

impl RunManifest {
    pub fn new(command: &str, seed: u64, config: &Config) -> Self {
        Self {
            tool: "coordnet",
            version: TOOL_VERSION,
            command: command.into(),
            seed,
            config: config.clone(),
            inputs: Vec::new(),
            corpus_span: None,
            counts: BTreeMap::new(),
        }
    }

    pub fn add_input(&mut self, path: &Path) -> Result<()> {
        let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        let sha256 = file_sha256(path)?;
        self.inputs.push(InputDigest { name, sha256 });
        Ok(())
    }

    pub fn count(&mut self, key: &str, value: usize) {
        self.counts.insert(key.into(), value as u64);
    }

    pub fn digest(&self) -> String {
        sha256_hex(&serde_json::to_vec(self).expect("manifest serializes"))
    }
}

/// Collects output files for one command and writes them with the manifest
/// and artifact index.
#[derive(Debug)]
pub struct OutputDir {
    dir: PathBuf,
    files: BTreeMap<String, String>,
}

impl OutputDir {
    pub fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        Ok(Self { dir: dir.to_path_buf(), files: BTreeMap::new() })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    /// Renders `name` into memory via `f`, then writes it.
    pub fn write_with(&mut self, name: &str, f: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<()> {
        let mut buf = Vec::new();
        f(&mut buf)?;
        self.write_bytes(name, buf)
    }

    pub fn write_bytes(&mut self, name: &str, bytes: Vec<u8>) -> Result<()> {
        let path = self.path(name);
        self.files.insert(name.to_string(), sha256_hex(&bytes));
        fs::write(&path, bytes).map_err(|e| Error::io(&path, e))
    }

    pub fn write_json(&mut self, name: &str, value: &impl Serialize) -> Result<()> {
        let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| Error::Internal(e.to_string()))?;
        bytes.push(b'\n');
        self.write_bytes(name, bytes)
    }

    /// Writes `manifest.json` and `artifacts.json`; returns the digest.
    pub fn finish(mut self, manifest: &RunManifest) -> Result<String> {
        let digest = manifest.digest();
        #[derive(Serialize)]
        struct Artifacts<'a> {
            manifest_digest: &'a str,
            files: &'a BTreeMap<String, String>,
        }
        let files = std::mem::take(&mut self.files);
        self.write_json("manifest.json", manifest)?;
        self.write_json("artifacts.json", &Artifacts { manifest_digest: &digest, files: &files })?;
        Ok(digest)
    }
}
