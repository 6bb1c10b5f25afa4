//! Run manifests with content digests and atomic emission.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::{CliError, Result};

/// Record of one completed run: the effective configuration, the seed,
/// the code version, wall-clock duration, and every emitted file with its
/// SHA-256 digest. Written atomically at run end.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub seed: u64,
    pub version: String,
    pub duration_seconds: f64,
    pub config: toml::Value,
    pub outputs: Vec<OutputFile>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OutputFile {
    pub path: String,
    pub sha256: String,
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path)?;
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    Ok(format!("{:x}", hasher.finalize()))
}

/// Collects output files relative to `out_dir`, digests them, and writes
/// `manifest.json` via a temp-file rename.
pub struct ManifestBuilder {
    command: String,
    seed: u64,
    config: toml::Value,
    out_dir: PathBuf,
    outputs: Vec<String>,
    started: Instant,
}

impl ManifestBuilder {
    pub fn new<C: Serialize>(command: &str, seed: u64, config: &C, out_dir: &Path) -> Result<Self> {
        let config = toml::Value::try_from(config)
            .map_err(|e| CliError::Runtime(format!("cannot snapshot config: {e}")))?;
        fs::create_dir_all(out_dir)?;
        Ok(Self {
            command: command.to_string(),
            seed,
            config,
            out_dir: out_dir.to_path_buf(),
            outputs: Vec::new(),
            started: Instant::now(),
        })
    }

    pub fn out_dir(&self) -> &Path {
        &self.out_dir
    }

    /// Registers an output file (relative name) and returns its full path.
    pub fn declare(&mut self, name: &str) -> PathBuf {
        self.outputs.push(name.to_string());
        self.out_dir.join(name)
    }

    /// Digests the declared files and writes the manifest.
    pub fn finish(self) -> Result<RunManifest> {
        let mut outputs = Vec::with_capacity(self.outputs.len());
        for name in &self.outputs {
            let path = self.out_dir.join(name);
            if !path.is_file() {
                return Err(CliError::Runtime(format!(
                    "declared output `{name}` was never written"
                )));
            }
            outputs.push(OutputFile { path: name.clone(), sha256: sha256_file(&path)? });
        }
        let manifest = RunManifest {
            command: self.command,
            seed: self.seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            duration_seconds: self.started.elapsed().as_secs_f64(),
            config: self.config,
            outputs,
        };
        let text = serde_json::to_string_pretty(&manifest)
            .map_err(|e| CliError::Runtime(e.to_string()))?;
        let tmp = self.out_dir.join("manifest.json.tmp");
        fs::write(&tmp, text)?;
        fs::rename(&tmp, self.out_dir.join("manifest.json"))?;
        Ok(manifest)
    }
}

/// Re-digests the files listed in a manifest and checks they still match.
pub fn verify_manifest(out_dir: &Path) -> Result<RunManifest> {
    let text = fs::read_to_string(out_dir.join("manifest.json"))?;
    let manifest: RunManifest =
        serde_json::from_str(&text).map_err(|e| CliError::Runtime(e.to_string()))?;
    for output in &manifest.outputs {
        let digest = sha256_file(&out_dir.join(&output.path))?;
        if digest != output.sha256 {
            return Err(CliError::Runtime(format!(
                "digest mismatch for {}: manifest {} vs file {digest}",
                output.path, output.sha256
            )));
        }
    }
    Ok(manifest)
}
