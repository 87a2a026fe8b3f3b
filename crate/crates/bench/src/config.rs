use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{BenchError, Result};

/// A list of sizes, written as a number, an array, or `"8,16,32"`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum MList {
    One(usize),
    Many(Vec<usize>),
    Text(String),
}

impl MList {
    pub fn values(&self) -> Result<Vec<usize>> {
        match self {
            MList::One(v) => Ok(vec![*v]),
            MList::Many(v) => Ok(v.clone()),
            MList::Text(s) => s
                .split(',')
                .map(str::trim)
                .filter(|p| !p.is_empty())
                .map(|p| {
                    p.parse()
                        .map_err(|_| BenchError::precondition(format!("'{p}' is not a size")))
                })
                .collect(),
        }
    }

    /// The list when it holds exactly one value.
    pub fn single(&self, flag: &str) -> Result<usize> {
        match self.values()?.as_slice() {
            [v] => Ok(*v),
            other => Err(BenchError::precondition(format!(
                "--{flag} takes one value here, got {other:?}"
            ))),
        }
    }
}

/// Command options; JSON config files use the same keys as the flags.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub kernel: Option<String>,
    pub method: Option<String>,
    pub n: Option<MList>,
    pub m: Option<MList>,
    pub alpha: Option<usize>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
}

impl Config {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| BenchError::precondition(format!("config: {e}")))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Config::from_json(&std::fs::read_to_string(path)?)
    }

    /// Fields set in `flags` replace those from `self`.
    pub fn overridden_by(self, flags: Config) -> Config {
        Config {
            kernel: flags.kernel.or(self.kernel),
            method: flags.method.or(self.method),
            n: flags.n.or(self.n),
            m: flags.m.or(self.m),
            alpha: flags.alpha.or(self.alpha),
            out: flags.out.or(self.out),
            seed: flags.seed.or(self.seed),
        }
    }
}
