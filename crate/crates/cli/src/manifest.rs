use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

use crate::commands::CliError;

/// Record of one invocation, written as `<out-stem>.manifest.json`.
#[derive(Serialize, Debug)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: Vec<String>,
    pub subcommand: &'static str,
    pub threads: Option<usize>,
    pub params: Value,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    pub seeds: Vec<u64>,
    pub results: Value,
    pub duration_seconds: f64,
}

pub struct Recorder {
    started: Instant,
    subcommand: &'static str,
    threads: Option<usize>,
    pub params: Value,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    pub seeds: Vec<u64>,
    pub results: Value,
}

impl Recorder {
    pub fn new(subcommand: &'static str, threads: Option<usize>) -> Self {
        Recorder {
            started: Instant::now(),
            subcommand,
            threads,
            params: Value::Null,
            inputs: vec![],
            outputs: vec![],
            seeds: vec![],
            results: Value::Null,
        }
    }

    /// Writes the manifest beside `out` and returns its path.
    pub fn finish(mut self, out: &Path) -> Result<PathBuf, CliError> {
        let path = sibling(out, "manifest.json");
        self.outputs.push(path.clone());
        let manifest = RunManifest {
            tool: "vessel3d",
            version: env!("CARGO_PKG_VERSION"),
            command: std::env::args().collect(),
            subcommand: self.subcommand,
            threads: self.threads,
            params: self.params,
            inputs: self.inputs,
            outputs: self.outputs,
            seeds: self.seeds,
            results: self.results,
            duration_seconds: self.started.elapsed().as_secs_f64(),
        };
        let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        std::fs::write(&path, text + "\n").map_err(|e| CliError::Write { path: path.clone(), source: e })?;
        Ok(path)
    }
}

/// `dir/stem.json` → `dir/stem.<suffix>`.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.{suffix}"))
}
