use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use serde::Serialize;

pub const MANIFEST_NAME: &str = "manifest.json";

/// Provenance record, written last into an output directory so its presence
/// marks a completed run.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool_version: &'static str,
    pub subcommand: &'static str,
    pub flags: serde_json::Value,
    pub inputs: Vec<PathBuf>,
    /// Relative to the output directory.
    pub outputs: Vec<PathBuf>,
    pub seeds: Vec<u64>,
    pub wall_clock_seconds: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub details: Option<serde_json::Value>,
}

impl RunManifest {
    pub fn new(subcommand: &'static str, flags: impl Serialize) -> Result<Self> {
        Ok(RunManifest {
            tool_version: env!("CARGO_PKG_VERSION"),
            subcommand,
            flags: serde_json::to_value(flags)?,
            inputs: Vec::new(),
            outputs: Vec::new(),
            seeds: Vec::new(),
            wall_clock_seconds: 0.0,
            details: None,
        })
    }

    pub fn write(mut self, out: &Path, started: Instant) -> Result<()> {
        self.wall_clock_seconds = started.elapsed().as_secs_f64();
        let path = out.join(MANIFEST_NAME);
        let text = serde_json::to_string_pretty(&self)?;
        std::fs::write(&path, text + "\n").with_context(|| format!("writing {}", path.display()))
    }
}
