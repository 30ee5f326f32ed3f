//! Machine-readable JSON run reports: residuals, norms, timings, argmax
//! locations and a manifest of emitted files with content hashes. The
//! manifest hashes (not the timings) are the determinism anchor.

use serde::Serialize;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

#[derive(Debug, Serialize, Default)]
pub struct Residuals {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reciprocity: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unitarity: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_form_min_eigenvalue: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct Norms {
    pub spectral: f64,
    pub frobenius: f64,
}

#[derive(Debug, Serialize)]
pub struct ArgmaxEntry {
    pub index: usize,
    pub x: f64,
    pub y: f64,
    pub value: f64,
}

#[derive(Debug, Serialize)]
pub struct ChainMargins {
    pub lower: f64,
    pub middle: f64,
    pub upper: f64,
    pub scale: f64,
}

#[derive(Debug, Serialize)]
pub struct ManifestEntry {
    pub path: String,
    pub sha256: String,
}

/// One report per command invocation.
#[derive(Debug, Serialize, Default)]
pub struct RunReport {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub engine: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measured_relative_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residuals: Option<Residuals>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub norms: Option<Norms>,
    /// map name (e.g. "new_rho2") -> argmax
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub argmax: BTreeMap<String, ArgmaxEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chain: Option<ChainMargins>,
    /// seconds, by phase name
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub timings_seconds: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub manifest: Vec<ManifestEntry>,
}

impl RunReport {
    pub fn new(command: &str) -> Self {
        RunReport {
            command: command.to_string(),
            ..Default::default()
        }
    }

    /// Hash an emitted file into the manifest.
    pub fn record_file(&mut self, path: &Path) -> scatter2d::Result<()> {
        let bytes = std::fs::read(path)?;
        let digest = Sha256::digest(&bytes);
        self.manifest.push(ManifestEntry {
            path: path
                .file_name()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| path.display().to_string()),
            sha256: hex_string(&digest),
        });
        Ok(())
    }

    pub fn write(&self, path: &Path) -> scatter2d::Result<PathBuf> {
        let json = serde_json::to_string_pretty(self)
            .expect("report serialization cannot fail");
        std::fs::write(path, json + "\n")?;
        Ok(path.to_path_buf())
    }
}

fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
