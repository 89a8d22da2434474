//! Run manifests: a JSON record written alongside every output so a run
//! can be reproduced from its recorded inputs and configuration.

use anyhow::{Context, Result};
use serde_json::{json, Value};
use std::path::{Path, PathBuf};

pub struct RunManifest {
    command: &'static str,
    inputs: Vec<PathBuf>,
    outputs: Vec<PathBuf>,
    config: Value,
    rng_seed: Option<u64>,
}

impl RunManifest {
    pub fn new(command: &'static str) -> Self {
        Self {
            command,
            inputs: Vec::new(),
            outputs: Vec::new(),
            config: json!({}),
            rng_seed: None,
        }
    }

    pub fn input(mut self, path: &Path) -> Self {
        self.inputs.push(path.to_path_buf());
        self
    }

    pub fn output(mut self, path: &Path) -> Self {
        self.outputs.push(path.to_path_buf());
        self
    }

    pub fn config(mut self, key: &str, value: Value) -> Self {
        self.config[key] = value;
        self
    }

    pub fn rng_seed(mut self, seed: u64) -> Self {
        self.rng_seed = Some(seed);
        self
    }

    /// Writes `<anchor>.manifest.json` next to the primary output.
    pub fn write(self, anchor: &Path) -> Result<()> {
        let doc = json!({
            "tool": "strikebox",
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.command,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "config": self.config,
            "rng_seed": self.rng_seed,
        });
        let mut name = anchor.file_name().unwrap_or_default().to_os_string();
        name.push(".manifest.json");
        let path = anchor.with_file_name(name);
        std::fs::write(&path, serde_json::to_string_pretty(&doc)?)
            .with_context(|| format!("writing manifest {}", path.display()))
    }
}
