use std::path::PathBuf;

use clap::Args;
use qstlab::randomizer::{bias_profile, bias_threshold};
use serde::Serialize;

use crate::exit::CliError;
use crate::flags::{self, TableFormat, MAX_KEY_QUBITS};
use crate::output::{read_key_set, sig, Artifact, Execution};

/// Print the bias of a key set at every (a, b).
#[derive(Args, Clone, Debug)]
pub(crate) struct BiasScanArgs {
    /// Key set file (JSON or text).
    pub file: PathBuf,
    #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
    pub format: TableFormat,
    /// Epsilon for the verdict; defaults to the one stored in the file.
    #[arg(long, value_parser = flags::epsilon)]
    pub epsilon: Option<f64>,
    /// Output file (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Manifest path (default: `<out>.manifest.json`; none for stdout).
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Serialize)]
struct Row {
    a: String,
    b: String,
    beta: f64,
}

#[derive(Serialize)]
struct ScanJson {
    n: usize,
    size: usize,
    epsilon: Option<f64>,
    threshold: Option<f64>,
    beta_max: f64,
    verdict: &'static str,
    profile: Vec<Row>,
}

impl BiasScanArgs {
    pub fn to_args(&self) -> Vec<String> {
        let mut v = vec![self.file.display().to_string(), "--format".into(), flags::value_name(&self.format)];
        if let Some(e) = self.epsilon {
            v.extend(["--epsilon".into(), e.to_string()]);
        }
        if let Some(o) = &self.out {
            v.extend(["--out".into(), o.display().to_string()]);
        }
        if let Some(m) = &self.manifest {
            v.extend(["--manifest".into(), m.display().to_string()]);
        }
        v
    }

    pub fn execute(&self) -> Execution {
        let mut inputs = Vec::new();
        match self.try_execute(&mut inputs) {
            Ok(art) => Execution::ok(vec![art], inputs, String::new()),
            Err(e) => Execution::failed(e, inputs),
        }
    }

    fn try_execute(&self, inputs: &mut Vec<(PathBuf, String)>) -> Result<Artifact, CliError> {
        let set = read_key_set(&self.file, inputs)?;
        let n = set.n();
        if n > MAX_KEY_QUBITS {
            return Err(CliError::config(format!("n = {n} exceeds the bias-scan cap of {MAX_KEY_QUBITS}")));
        }
        let profile = bias_profile(&set)?;
        let epsilon = self.epsilon.or(set.meta.epsilon);
        let threshold = epsilon.map(|e| bias_threshold(n, e));
        let beta_max = profile.beta_max();
        let verdict = match threshold {
            Some(t) if beta_max <= t => "PASS",
            Some(_) => "FAIL",
            None => "n/a",
        };
        let width = n.div_ceil(4).max(1);
        let mask = (1u64 << n) - 1;
        let rows = profile.betas().into_iter().enumerate().map(|(i, beta)| {
            let i = i as u64;
            (format!("{:0width$x}", i >> n), format!("{:0width$x}", i & mask), beta)
        });

        let bytes = match self.format {
            TableFormat::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(["a", "b", "beta"]).map_err(csv_err)?;
                for (a, b, beta) in rows {
                    w.write_record([a, b, sig(beta)]).map_err(csv_err)?;
                }
                let mut bytes = w.into_inner().map_err(|e| CliError::config(e.to_string()))?;
                let opt = |x: Option<f64>| x.map_or_else(|| "n/a".to_string(), sig);
                bytes.extend(
                    format!(
                        "# beta_max={} epsilon={} threshold={} verdict={verdict}\n",
                        sig(beta_max),
                        opt(epsilon),
                        opt(threshold)
                    )
                    .into_bytes(),
                );
                bytes
            }
            TableFormat::Json => {
                let doc = ScanJson {
                    n,
                    size: set.len(),
                    epsilon,
                    threshold,
                    beta_max,
                    verdict,
                    profile: rows.map(|(a, b, beta)| Row { a, b, beta }).collect(),
                };
                (qstlab::json::to_string_sig17(&doc).map_err(qstlab::Error::from)? + "\n").into_bytes()
            }
        };
        Ok(Artifact::to(self.out.as_deref(), bytes))
    }
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::config(format!("csv: {e}"))
}
