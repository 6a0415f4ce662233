use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use dogss_core::{Error, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Serialize)]
pub struct FileDigest {
    pub role: String,
    pub path: String,
    pub sha256: String,
}

/// Everything needed to rerun a command: its arguments, effective
/// configuration, input and output digests, seed and tool versions.
#[derive(Debug, Serialize)]
pub struct Manifest {
    pub command: String,
    pub args: Vec<String>,
    pub config: serde_json::Value,
    pub seed: Option<u64>,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
    pub versions: BTreeMap<&'static str, &'static str>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|source| Error::Io {
        path: path.into(),
        source,
    })
}

/// Records digests of the files a command reads and writes.
pub struct Recorder {
    manifest: Manifest,
}

impl Recorder {
    pub fn new(command: &str, seed: Option<u64>) -> Self {
        let mut versions = BTreeMap::new();
        versions.insert("dogss-cli", env!("CARGO_PKG_VERSION"));
        versions.insert("dogss-core", dogss_core::VERSION);
        Self {
            manifest: Manifest {
                command: command.to_string(),
                args: std::env::args().skip(1).collect(),
                config: serde_json::Value::Null,
                seed,
                inputs: Vec::new(),
                outputs: Vec::new(),
                versions,
            },
        }
    }

    pub fn config<C: Serialize>(&mut self, config: &C) {
        self.manifest.config = serde_json::to_value(config).expect("configs serialize");
    }

    /// Reads an input file and records its digest.
    pub fn input(&mut self, role: &str, path: &Path) -> Result<Vec<u8>> {
        let bytes = read_bytes(path)?;
        self.manifest.inputs.push(FileDigest {
            role: role.into(),
            path: path.display().to_string(),
            sha256: sha256_hex(&bytes),
        });
        Ok(bytes)
    }

    pub fn output(&mut self, role: &str, path: &Path) -> Result<()> {
        let bytes = read_bytes(path)?;
        self.manifest.outputs.push(FileDigest {
            role: role.into(),
            path: path.display().to_string(),
            sha256: sha256_hex(&bytes),
        });
        Ok(())
    }

    /// Writes `<primary>.manifest.json`.
    pub fn finish(self, primary: &Path) -> Result<PathBuf> {
        let mut name = primary.as_os_str().to_owned();
        name.push(".manifest.json");
        let path = PathBuf::from(name);
        dogss_core::io::write_json(&self.manifest, &path)?;
        Ok(path)
    }
}
