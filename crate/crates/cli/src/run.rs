//! Exit codes, output bookkeeping and run manifests.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{anyhow, Context};
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_EMPTY: i32 = 3;
pub const EXIT_MODEL: i32 = 4;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug)]
pub enum Failure {
    /// Unreadable or malformed input, bad arguments.
    Input(anyhow::Error),
    /// A fit or statistic could not be computed.
    Model(anyhow::Error),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Input(_) => EXIT_INPUT,
            Failure::Model(_) => EXIT_MODEL,
        }
    }

    pub fn error(&self) -> &anyhow::Error {
        match self {
            Failure::Input(e) | Failure::Model(e) => e,
        }
    }
}

pub trait Classify<T> {
    fn input(self) -> Result<T, Failure>;
    fn model(self) -> Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> Classify<T> for Result<T, E> {
    fn input(self) -> Result<T, Failure> {
        self.map_err(|e| Failure::Input(e.into()))
    }
    fn model(self) -> Result<T, Failure> {
        self.map_err(|e| Failure::Model(e.into()))
    }
}

pub fn input_error(msg: impl std::fmt::Display) -> Failure {
    Failure::Input(anyhow!("{msg}"))
}

/// What a command reports back for its manifest.
#[derive(Debug, Default)]
pub struct Outcome {
    pub params: Value,
    pub seed: Option<u64>,
    /// Set when the command completed but found nothing (exit 3).
    pub empty: Option<String>,
}

/// Collects output files under one directory and refuses to overwrite any
/// input.
pub struct Outputs {
    dir: PathBuf,
    inputs: Vec<PathBuf>,
    written: Vec<PathBuf>,
}

impl Outputs {
    pub fn new(dir: &Path) -> Result<Self, Failure> {
        fs::create_dir_all(dir).with_context(|| format!("cannot create output directory {}", dir.display())).input()?;
        Ok(Self { dir: dir.to_path_buf(), inputs: Vec::new(), written: Vec::new() })
    }

    /// Registers an input path; it is recorded in the manifest and protected
    /// from being overwritten.
    pub fn input(&mut self, path: &Path) {
        self.inputs.push(path.to_path_buf());
    }

    pub fn inputs(&self) -> &[PathBuf] {
        &self.inputs
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn write(&mut self, name: &str, bytes: impl AsRef<[u8]>) -> Result<PathBuf, Failure> {
        let path = self.dir.join(name);
        if let Ok(target) = path.canonicalize() {
            for input in &self.inputs {
                if input.canonicalize().is_ok_and(|i| i == target) {
                    return Err(input_error(format!("refusing to overwrite input {}", input.display())));
                }
            }
        }
        fs::write(&path, bytes).with_context(|| format!("cannot write {}", path.display())).input()?;
        if !self.written.contains(&path) {
            self.written.push(path.clone());
        }
        Ok(path)
    }

    pub fn write_json<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) -> Result<PathBuf, Failure> {
        let mut text = serde_json::to_string_pretty(value).context("serializing JSON").model()?;
        text.push('\n');
        self.write(name, text)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Arguments after the program name, exactly as given.
    pub args: Vec<String>,
    /// Directory the arguments are relative to.
    pub working_dir: String,
    pub params: Value,
    pub seed: Option<u64>,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub tool_version: String,
    pub started_at_unix: u64,
    pub finished_at_unix: u64,
    pub exit_code: i32,
}

pub fn unix_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

pub fn read_manifest(path: &Path) -> anyhow::Result<RunManifest> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("{} is not a run manifest", path.display()))
}

/// Filesystem-safe form of a lemma.
pub fn file_stem(lemma: &str) -> String {
    lemma.chars().map(|c| if c.is_alphanumeric() || c == '-' || c == '_' { c } else { '_' }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stems() {
        assert_eq!(file_stem("lianyin"), "lianyin");
        assert_eq!(file_stem("a/b c"), "a_b_c");
        assert_eq!(file_stem("联姻"), "联姻");
    }

    #[test]
    fn refuses_to_clobber_inputs() {
        let dir = std::env::temp_dir().join(format!("metasoc-run-{}", std::process::id()));
        let mut out = Outputs::new(&dir).unwrap();
        let input = out.write("in.csv", "x,y\n").unwrap();
        out.input(&input);
        assert!(matches!(out.write("in.csv", "oops"), Err(Failure::Input(_))));
        assert_eq!(fs::read_to_string(&input).unwrap(), "x,y\n");
        fs::remove_dir_all(&dir).unwrap();
    }
}
