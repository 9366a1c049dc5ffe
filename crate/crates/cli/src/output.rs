use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use qstlab::randomizer::KeySet;
use sha2::{Digest, Sha256};

use crate::exit::{CliError, OK};

/// Bytes bound for a file, or for stdout when `path` is `None`.
pub(crate) struct Artifact {
    pub path: Option<PathBuf>,
    pub bytes: Vec<u8>,
}

impl Artifact {
    pub fn file(path: impl Into<PathBuf>, bytes: impl Into<Vec<u8>>) -> Self {
        Artifact { path: Some(path.into()), bytes: bytes.into() }
    }

    pub fn to(path: Option<&Path>, bytes: impl Into<Vec<u8>>) -> Self {
        Artifact { path: path.map(Path::to_path_buf), bytes: bytes.into() }
    }

    pub fn label(&self) -> String {
        self.path.as_ref().map_or_else(|| "-".to_string(), |p| p.display().to_string())
    }
}

/// Everything a command produced, before anything touches the filesystem.
pub(crate) struct Execution {
    pub artifacts: Vec<Artifact>,
    pub inputs: Vec<(PathBuf, String)>,
    pub summary: String,
    pub code: u8,
    pub error: Option<String>,
}

impl Execution {
    pub fn ok(artifacts: Vec<Artifact>, inputs: Vec<(PathBuf, String)>, summary: String) -> Self {
        Execution { artifacts, inputs, summary, code: OK, error: None }
    }

    pub fn failed(e: CliError, inputs: Vec<(PathBuf, String)>) -> Self {
        Execution { artifacts: Vec::new(), inputs, summary: String::new(), code: e.code, error: Some(e.message) }
    }

    pub fn commit(&self) -> io::Result<()> {
        let stdout = io::stdout();
        let mut out = stdout.lock();
        for art in &self.artifacts {
            match &art.path {
                Some(path) => {
                    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                        fs::create_dir_all(dir)?;
                    }
                    fs::write(path, &art.bytes)?;
                }
                None => out.write_all(&art.bytes)?,
            }
        }
        out.write_all(self.summary.as_bytes())?;
        out.flush()
    }
}

pub(crate) fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Reads an input file and records its hash.
pub(crate) fn read_input(path: &Path, inputs: &mut Vec<(PathBuf, String)>) -> Result<String, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::parse(format!("cannot read {}: {e}", path.display())))?;
    inputs.push((path.to_path_buf(), sha256_hex(&bytes)));
    String::from_utf8(bytes).map_err(|_| CliError::parse(format!("{} is not UTF-8", path.display())))
}

/// Key sets are JSON when the first non-blank character is `{`, text otherwise.
pub(crate) fn read_key_set(path: &Path, inputs: &mut Vec<(PathBuf, String)>) -> Result<KeySet, CliError> {
    let text = read_input(path, inputs)?;
    let parsed = if text.trim_start().starts_with('{') {
        KeySet::from_json(&text)
    } else {
        KeySet::from_text(&text, None)
    };
    parsed.map_err(|e| CliError::parse(format!("{}: {e}", path.display())))
}

pub(crate) fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

pub(crate) fn sig(x: f64) -> String {
    qstlab::json::format_sig17(x)
}
