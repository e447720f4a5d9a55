//! Machine-readable run manifest written next to every command's outputs.
//!
//! The manifest records what determines the output bytes: input digests, the
//! semantic configuration, and the tool version. Scheduling knobs (thread
//! count) are deliberately left out — outputs do not depend on them — so a
//! rerun of the same command produces a byte-identical manifest too.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug, Serialize)]
pub struct RunManifest {
    tool: &'static str,
    version: &'static str,
    command: String,
    /// Input file name -> SHA-256 of its bytes.
    inputs: BTreeMap<String, String>,
    /// Echo of the semantics-affecting configuration, sorted by key.
    config: BTreeMap<String, serde_json::Value>,
    outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        RunManifest {
            tool: "resdist",
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            inputs: BTreeMap::new(),
            config: BTreeMap::new(),
            outputs: Vec::new(),
        }
    }

    pub fn input(&mut self, path: &Path, bytes: &[u8]) -> &mut Self {
        self.inputs
            .insert(path.display().to_string(), sha256_hex(bytes));
        self
    }

    pub fn config<V: Serialize>(&mut self, key: &str, value: V) -> &mut Self {
        let value = serde_json::to_value(value).expect("config values are plain scalars");
        self.config.insert(key.to_string(), value);
        self
    }

    pub fn output(&mut self, name: &str) -> &mut Self {
        self.outputs.push(name.to_string());
        self
    }

    /// Write `manifest.json` into the output directory.
    pub fn write(&self, out_dir: &Path) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        fs::write(out_dir.join("manifest.json"), text)?;
        Ok(())
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}
