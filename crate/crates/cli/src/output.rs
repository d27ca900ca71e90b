use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use bo_core::io::{atomic_write, write_json};
use bo_core::BirkhoffConfig;
use serde::Serialize;
use serde_json::{json, Value};

use crate::CliError;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Tolerances {
    pub tol_tail: f64,
    pub tol_gap: f64,
    pub tol_phase: f64,
    pub tol_pole: f64,
}

impl Tolerances {
    pub fn new(cfg: &BirkhoffConfig) -> Self {
        Self { tol_tail: cfg.tol_tail, tol_gap: cfg.lax.tol_gap, tol_phase: cfg.lax.tol_phase, tol_pole: cfg.lax.tol_pole }
    }
}

/// Output directory; every file goes through an atomic write and is listed
/// in the manifest.
pub struct Output {
    dir: PathBuf,
    files: Vec<String>,
}

impl Output {
    pub fn create(dir: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir).map_err(|e| bo_core::Error::Io(format!("{}: {e}", dir.display())))?;
        Ok(Self { dir: dir.to_path_buf(), files: Vec::new() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn record(&mut self, name: &str) {
        if !self.files.iter().any(|f| f == name) {
            self.files.push(name.to_string());
        }
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        write_json(&self.dir.join(name), value)?;
        self.record(name);
        Ok(())
    }

    pub fn text(&mut self, name: &str, text: &str) -> Result<(), CliError> {
        atomic_write(&self.dir.join(name), text.as_bytes())?;
        self.record(name);
        Ok(())
    }

    pub fn files(&self) -> Vec<String> {
        let mut f = self.files.clone();
        f.sort();
        f
    }

    pub fn manifest(
        &mut self,
        command: &str,
        version: &str,
        parameters: BTreeMap<String, Value>,
        seed: u64,
        tolerances: &Tolerances,
    ) -> Result<(), CliError> {
        let manifest = json!({
            "command": command,
            "version": version,
            "parameters": parameters,
            "seed": seed,
            "tolerances": tolerances,
            "outputs": self.files(),
        });
        write_json(&self.dir.join("manifest.json"), &manifest)?;
        Ok(())
    }
}
