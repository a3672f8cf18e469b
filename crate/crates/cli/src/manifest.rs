use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use lfgeo::{Error, Result};

#[derive(Clone, Debug, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

/// Provenance record written next to every output file.
#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub command_line: Vec<String>,
    pub seed: Option<u64>,
    pub tool_version: String,
    pub inputs: Vec<InputDigest>,
    pub outputs: Vec<String>,
    pub wall_time_seconds: f64,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Per-invocation state: reads inputs, writes outputs, then the manifests.
pub struct Run {
    argv: Vec<String>,
    started: Instant,
    pub seed: Option<u64>,
    inputs: Vec<InputDigest>,
    outputs: Vec<PathBuf>,
}

impl Run {
    pub fn new(argv: Vec<String>) -> Self {
        Run { argv, started: Instant::now(), seed: None, inputs: Vec::new(), outputs: Vec::new() }
    }

    pub fn read(&mut self, path: &Path) -> Result<String> {
        let bytes = fs::read(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
        self.inputs.push(InputDigest { path: path.display().to_string(), sha256: sha256_hex(&bytes) });
        String::from_utf8(bytes).map_err(|_| Error::Parse(format!("{} is not UTF-8", path.display())))
    }

    /// Digest of the most recently read input.
    pub fn last_digest(&self) -> Option<&str> {
        self.inputs.last().map(|d| d.sha256.as_str())
    }

    /// Write to `path`, or to stdout when absent.
    pub fn write(&mut self, path: Option<&Path>, contents: &str) -> Result<()> {
        match path {
            Some(p) => {
                if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                    fs::create_dir_all(dir)?;
                }
                fs::write(p, contents)?;
                self.outputs.push(p.to_path_buf());
            }
            None => print!("{contents}"),
        }
        Ok(())
    }

    pub fn record_output(&mut self, path: PathBuf) {
        self.outputs.push(path);
    }

    pub fn finish(self) -> Result<()> {
        let manifest = RunManifest {
            command_line: self.argv,
            seed: self.seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            inputs: self.inputs,
            outputs: self.outputs.iter().map(|p| p.display().to_string()).collect(),
            wall_time_seconds: self.started.elapsed().as_secs_f64(),
        };
        let text = serde_json::to_string_pretty(&manifest)? + "\n";
        for out in &self.outputs {
            let mut name = out.as_os_str().to_owned();
            name.push(".manifest.json");
            fs::write(PathBuf::from(name), &text)?;
        }
        Ok(())
    }
}
