//! Per-run manifest: config echo, timestamps, summary numbers and the
//! sha256 of every emitted file.

use crate::config::RunConfig;
use crate::{CliError, TOOL_VERSION};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileEntry {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub tool: String,
    pub tool_version: String,
    pub config: RunConfig,
    pub started_unix: u64,
    pub finished_unix: u64,
    /// Scalar results such as fitted exponents, keyed by name.
    pub summary: BTreeMap<String, f64>,
    pub files: Vec<FileEntry>,
}

impl RunManifest {
    pub fn file(&self, name: &str) -> Option<&FileEntry> {
        self.files.iter().find(|f| f.path == name)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

pub fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// The only writer into a run directory.
pub struct ManifestWriter {
    dir: PathBuf,
    started: u64,
    files: Vec<FileEntry>,
    summary: BTreeMap<String, f64>,
}

impl ManifestWriter {
    /// Creates `dir`; refuses a non-empty existing directory so that the
    /// manifest always describes everything inside it.
    pub fn create(dir: &Path) -> Result<Self, CliError> {
        if dir.exists() {
            let mut it = std::fs::read_dir(dir).map_err(|e| CliError::io(dir, e))?;
            if it.next().is_some() {
                return Err(CliError::Config(format!(
                    "output directory {} is not empty",
                    dir.display()
                )));
            }
        }
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            started: unix_now(),
            files: Vec::new(),
            summary: BTreeMap::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        if name == MANIFEST_FILE
            || name.contains(['/', '\\'])
            || self.files.iter().any(|f| f.path == name)
        {
            return Err(CliError::Config(format!(
                "refusing to write artifact {name:?}"
            )));
        }
        let path = self.dir.join(name);
        std::fs::write(&path, bytes).map_err(|e| CliError::io(&path, e))?;
        self.files.push(FileEntry {
            path: name.into(),
            bytes: bytes.len() as u64,
            sha256: sha256_hex(bytes),
        });
        Ok(())
    }

    /// JSON has no NaN or infinity; such values are left out.
    pub fn summary(&mut self, key: &str, value: f64) {
        if value.is_finite() {
            self.summary.insert(key.into(), value);
        }
    }

    pub fn finish(self, config: &RunConfig) -> Result<RunManifest, CliError> {
        let m = RunManifest {
            tool: "cbesov".into(),
            tool_version: TOOL_VERSION.into(),
            config: config.clone(),
            started_unix: self.started,
            finished_unix: unix_now(),
            summary: self.summary,
            files: self.files,
        };
        let text = serde_json::to_string_pretty(&m).expect("manifest serializes");
        let path = self.dir.join(MANIFEST_FILE);
        std::fs::write(&path, text + "\n").map_err(|e| CliError::io(&path, e))?;
        Ok(m)
    }
}

pub fn parse_manifest(text: &str) -> Result<RunManifest, CliError> {
    let m: RunManifest =
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("manifest: {e}")))?;
    let mut seen = std::collections::BTreeSet::new();
    for f in &m.files {
        if f.path == MANIFEST_FILE || f.path.contains(['/', '\\']) || f.path.is_empty() {
            return Err(CliError::Config(format!(
                "manifest: bad file entry {:?}",
                f.path
            )));
        }
        if !seen.insert(f.path.as_str()) {
            return Err(CliError::Config(format!(
                "manifest: duplicate entry {:?}",
                f.path
            )));
        }
        if f.sha256.len() != 64 || !f.sha256.bytes().all(|b| b.is_ascii_hexdigit()) {
            return Err(CliError::Config(format!(
                "manifest: malformed digest for {:?}",
                f.path
            )));
        }
    }
    Ok(m)
}

pub fn read_manifest(dir: &Path) -> Result<RunManifest, CliError> {
    let path = dir.join(MANIFEST_FILE);
    let text = std::fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
    parse_manifest(&text)
}

/// Every file on disk is listed and every digest matches.
pub fn verify(dir: &Path) -> Result<RunManifest, CliError> {
    let m = read_manifest(dir)?;
    for entry in std::fs::read_dir(dir).map_err(|e| CliError::io(dir, e))? {
        let entry = entry.map_err(|e| CliError::io(dir, e))?;
        let name = entry.file_name().to_string_lossy().into_owned();
        if name != MANIFEST_FILE && m.file(&name).is_none() {
            return Err(CliError::Comparison(format!(
                "{name} is not listed in the manifest"
            )));
        }
    }
    for f in &m.files {
        let path = dir.join(&f.path);
        let bytes = std::fs::read(&path).map_err(|e| CliError::io(&path, e))?;
        if sha256_hex(&bytes) != f.sha256 {
            return Err(CliError::Comparison(format!(
                "digest mismatch for {}",
                f.path
            )));
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    #[test]
    fn known_digest() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn writer_lists_every_file_and_verify_catches_strays() {
        let dir = tempfile::tempdir().unwrap();
        let run = dir.path().join("r");
        let cfg = parse_config(r#"{"schema_version":1,"mode":"cutoffs"}"#).unwrap();
        let mut w = ManifestWriter::create(&run).unwrap();
        w.write("a.csv", b"x\n1\n").unwrap();
        assert!(w.write("a.csv", b"again").is_err());
        w.finish(&cfg).unwrap();
        let m = verify(&run).unwrap();
        assert_eq!(m.files.len(), 1);
        std::fs::write(run.join("stray.txt"), "").unwrap();
        assert!(verify(&run).is_err());
        assert!(ManifestWriter::create(&run).is_err());
    }

    #[test]
    fn tampering_is_detected() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = parse_config(r#"{"schema_version":1,"mode":"cutoffs"}"#).unwrap();
        let mut w = ManifestWriter::create(dir.path()).unwrap();
        w.write("a.csv", b"x\n1\n").unwrap();
        w.finish(&cfg).unwrap();
        std::fs::write(dir.path().join("a.csv"), "x\n2\n").unwrap();
        assert!(matches!(verify(dir.path()), Err(CliError::Comparison(_))));
    }
}
