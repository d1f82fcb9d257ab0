//! Result files: CSV tables, optional SVG figures and the run manifest, all
//! written atomically.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

/// One named output file, held in memory until the run succeeds.
#[derive(Debug, Clone)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

impl Artifact {
    pub fn csv<R: Serialize>(name: &str, rows: &[R]) -> Result<Self, csv::Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in rows {
            w.serialize(r)?;
        }
        let bytes = w.into_inner().map_err(|e| csv::Error::from(e.into_error()))?;
        Ok(Artifact { name: name.into(), bytes })
    }

    pub fn text(name: &str, text: String) -> Self {
        Artifact { name: name.into(), bytes: text.into_bytes() }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Writes through a sibling temporary file and a rename, so readers never
/// see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })
}

#[derive(Debug, Serialize)]
pub struct OutputRecord {
    pub file: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config: serde_json::Value,
    pub config_hash: String,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub runtime_seconds: f64,
    pub outputs: Vec<OutputRecord>,
}

/// Writes every artifact into `dir`, then the manifest naming them.
pub fn publish(dir: &Path, artifacts: &[Artifact], mut manifest: Manifest) -> std::io::Result<PathBuf> {
    fs::create_dir_all(dir)?;
    for a in artifacts {
        write_atomic(&dir.join(&a.name), &a.bytes)?;
        manifest.outputs.push(OutputRecord { file: a.name.clone(), sha256: sha256_hex(&a.bytes) });
    }
    let path = dir.join("manifest.json");
    let mut text = serde_json::to_string_pretty(&manifest).map_err(std::io::Error::other)?;
    text.push('\n');
    write_atomic(&path, text.as_bytes())?;
    Ok(path)
}
