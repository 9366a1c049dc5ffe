use serde::{Deserialize, Serialize};

use crate::output::Execution;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub(crate) struct FileHash {
    pub path: String,
    pub sha256: String,
}

/// Enough to rerun a command and check its outputs byte for byte.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub(crate) struct RunManifest {
    pub command: String,
    /// Every flag, defaults included, in a form the parser accepts.
    pub args: Vec<String>,
    pub seed: Option<u64>,
    pub version: String,
    pub inputs: Vec<FileHash>,
    /// `-` stands for stdout.
    pub outputs: Vec<FileHash>,
    pub exit_code: u8,
}

impl RunManifest {
    pub fn new(command: &str, args: Vec<String>, seed: Option<u64>, exec: &Execution) -> Self {
        RunManifest {
            command: command.to_string(),
            args,
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            inputs: exec
                .inputs
                .iter()
                .map(|(p, h)| FileHash { path: p.display().to_string(), sha256: h.clone() })
                .collect(),
            outputs: output_hashes(exec),
            exit_code: exec.code,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data") + "\n"
    }
}

pub(crate) fn output_hashes(exec: &Execution) -> Vec<FileHash> {
    exec.artifacts
        .iter()
        .map(|a| FileHash { path: a.label(), sha256: crate::output::sha256_hex(&a.bytes) })
        .collect()
}
