use serde::Serialize;
use std::path::{Path, PathBuf};
use std::time::Instant;

/// Record of one command invocation, written next to its outputs.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub command: String,
    pub tool_version: &'static str,
    pub master_seed: Option<u64>,
    pub seed_source: Option<&'static str>,
    pub config: serde_json::Value,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    pub wall_time_s: f64,
    pub error: Option<String>,
    #[serde(skip)]
    started: Option<Instant>,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        Self {
            schema_version: qtraj_core::io::SCHEMA_VERSION,
            command: command.into(),
            tool_version: env!("CARGO_PKG_VERSION"),
            master_seed: None,
            seed_source: None,
            config: serde_json::Value::Null,
            inputs: Vec::new(),
            outputs: Vec::new(),
            wall_time_s: 0.0,
            error: None,
            started: Some(Instant::now()),
        }
    }

    pub fn path_in(&self, dir: &Path) -> PathBuf {
        dir.join(format!("{}.manifest.json", self.command))
    }

    /// Stamps the wall time and writes the manifest into `dir`.
    pub fn finish(mut self, dir: &Path) -> anyhow::Result<PathBuf> {
        if let Some(t) = self.started {
            self.wall_time_s = t.elapsed().as_secs_f64();
        }
        let path = self.path_in(dir);
        qtraj_core::io::write_json(&path, &self)?;
        Ok(path)
    }
}
