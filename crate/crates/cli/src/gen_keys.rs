use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::Args;
use qstlab::randomizer::{certify, dn_key_length, CertifyParams};

use crate::exit::{CliError, CERTIFICATION};
use crate::flags::{self, KeyFormat, DEFAULT_SEED, MAX_SET_BITS};
use crate::output::{sig, Artifact, Execution};

/// Sample and certify ε-randomizing key sets.
#[derive(Args, Clone, Debug)]
pub(crate) struct GenKeysArgs {
    /// Qubits per key.
    #[arg(long, value_parser = flags::key_qubits)]
    pub n: usize,
    /// Target trace distance from the maximally mixed state.
    #[arg(long, value_parser = flags::epsilon)]
    pub epsilon: f64,
    /// Write one set per hop of a chain with this many hops, at the per-hop threshold.
    #[arg(long, value_parser = flags::hops)]
    pub hops: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Output file; with --hops, `<stem>.hop<j>.<ext>` per hop.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 50)]
    pub max_retries: usize,
    #[arg(long, value_enum, default_value_t = KeyFormat::Json)]
    pub format: KeyFormat,
    /// Manifest path (default: `<out>.manifest.json`).
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

/// `keys.json` → `keys.hop2.json`.
pub(crate) fn hop_path(out: &Path, hop: usize) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match out.extension() {
        Some(ext) => format!("{stem}.hop{hop}.{}", ext.to_string_lossy()),
        None => format!("{stem}.hop{hop}"),
    };
    out.with_file_name(name)
}

impl GenKeysArgs {
    pub fn to_args(&self) -> Vec<String> {
        let mut v = vec!["--n".into(), self.n.to_string(), "--epsilon".into(), self.epsilon.to_string()];
        if let Some(h) = self.hops {
            v.extend(["--hops".into(), h.to_string()]);
        }
        v.extend([
            "--seed".into(),
            self.seed.to_string(),
            "--out".into(),
            self.out.display().to_string(),
            "--max-retries".into(),
            self.max_retries.to_string(),
            "--format".into(),
            flags::value_name(&self.format),
        ]);
        if let Some(m) = &self.manifest {
            v.extend(["--manifest".into(), m.display().to_string()]);
        }
        v
    }

    pub fn execute(&self) -> Execution {
        self.try_execute().unwrap_or_else(|e| Execution::failed(e, Vec::new()))
    }

    fn try_execute(&self) -> Result<Execution, CliError> {
        let parties = self.hops.map(|h| h + 1);
        let hop_epsilon = parties.map_or(self.epsilon, |m| self.epsilon.powf(1.0 / m as f64));
        let bits = dn_key_length(self.n, hop_epsilon)?;
        if bits > MAX_SET_BITS {
            return Err(CliError::config(format!(
                "a set of 2^{bits} keys exceeds the 2^{MAX_SET_BITS} cap; raise epsilon or lower n"
            )));
        }
        let targets: Vec<(Option<usize>, PathBuf)> = match self.hops {
            None => vec![(None, self.out.clone())],
            Some(h) => (1..=h).map(|j| (Some(j), hop_path(&self.out, j))).collect(),
        };
        let mut artifacts = Vec::new();
        let mut summary = String::new();
        for (hop, path) in targets {
            let params = match (hop, parties) {
                (Some(j), Some(m)) => CertifyParams::hop(self.n, self.epsilon, m, j, self.seed, self.max_retries)?,
                _ => CertifyParams::single(self.n, self.epsilon, self.seed, self.max_retries)?,
            };
            let outcome = certify(&params)?;
            let best = &outcome.best;
            if !outcome.certified {
                let which = hop.map_or_else(String::new, |j| format!("hop {j}: "));
                return Err(CliError {
                    code: CERTIFICATION,
                    message: format!(
                        "{which}no set of 2^{} keys met threshold {} in {} attempts; best beta_max = {}",
                        params.size_bits,
                        sig(params.threshold),
                        self.max_retries + 1,
                        sig(best.profile.beta_max())
                    ),
                });
            }
            let bytes = match self.format {
                KeyFormat::Json => best.set.to_json()?,
                KeyFormat::Text => best.set.to_text(),
            };
            writeln!(
                summary,
                "{}: {} keys, beta_max={} threshold={} attempts={}",
                path.display(),
                best.set.len(),
                sig(best.profile.beta_max()),
                sig(params.threshold),
                best.attempts
            )
            .expect("write to String");
            artifacts.push(Artifact::file(path, bytes));
        }
        Ok(Execution::ok(artifacts, Vec::new(), summary))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hop_files_keep_the_extension() {
        assert_eq!(hop_path(Path::new("out/keys.json"), 2), PathBuf::from("out/keys.hop2.json"));
        assert_eq!(hop_path(Path::new("keys"), 1), PathBuf::from("keys.hop1"));
    }
}
