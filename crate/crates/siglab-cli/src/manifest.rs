//! Run manifests: enough provenance to reproduce any output byte for byte.

use serde::Serialize;
use std::path::{Path, PathBuf};
use std::time::Instant;

#[derive(Serialize)]
pub struct RunManifest {
    pub command: String,
    pub argv: Vec<String>,
    pub artifact_version: &'static str,
    pub seed: Option<u64>,
    pub threads: usize,
    pub config: serde_json::Value,
    pub outputs: Vec<PathBuf>,
    pub wall_clock_secs: f64,
}

pub struct ManifestBuilder {
    command: String,
    seed: Option<u64>,
    config: serde_json::Value,
    outputs: Vec<PathBuf>,
    started: Instant,
}

impl ManifestBuilder {
    pub fn new(command: &str, seed: Option<u64>, config: serde_json::Value) -> Self {
        Self {
            command: command.to_string(),
            seed,
            config,
            outputs: Vec::new(),
            started: Instant::now(),
        }
    }

    pub fn add_output(&mut self, path: &Path) {
        self.outputs.push(path.to_path_buf());
    }

    pub fn write(self, dir: &Path) -> anyhow::Result<PathBuf> {
        let manifest = RunManifest {
            command: self.command,
            argv: std::env::args().collect(),
            artifact_version: env!("CARGO_PKG_VERSION"),
            seed: self.seed,
            threads: rayon_threads(),
            config: self.config,
            outputs: self.outputs,
            wall_clock_secs: self.started.elapsed().as_secs_f64(),
        };
        let path = dir.join("manifest.json");
        crate::io::write_atomic(&path, &serde_json::to_string_pretty(&manifest)?)?;
        Ok(path)
    }
}

fn rayon_threads() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}
