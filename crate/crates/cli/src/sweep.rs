use std::path::PathBuf;

use clap::Args;
use qstlab::protocol::{HopKeys, ProtocolConfig};
use qstlab::randomizer::{bias_threshold, certify, dn_key_length, per_hop_threshold, verify_epsilon, CertifyParams, KeySet};
use qstlab::security::{Ensemble, SecurityReport};
use qstlab::state::LogBase;
use serde::Serialize;

use crate::exit::CliError;
use crate::flags::{self, EpsilonList, QubitRange, TableFormat, DEFAULT_SEED, MAX_DENSE_QUBITS, MAX_SET_BITS};
use crate::output::{sig, Artifact, Execution};

/// Tabulate key length, bias, measured distance and Holevo χ over (n, ε).
#[derive(Args, Clone, Debug)]
pub(crate) struct SweepArgs {
    #[arg(long, default_value = "1-8")]
    pub n_range: QubitRange,
    #[arg(long, value_parser = flags::epsilon_list, default_value = "1,0.8,0.5,0.25,0.1")]
    pub epsilons: EpsilonList,
    /// Certify per-hop sets for a chain of this many parties instead of one set at ε·2^(−n/2).
    #[arg(long, value_parser = flags::parties)]
    pub m: Option<usize>,
    #[arg(long, default_value_t = 50)]
    pub trials: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = 20)]
    pub max_retries: usize,
    /// Output file (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
    pub format: TableFormat,
    /// Manifest path (default: `<out>.manifest.json`; none for stdout).
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

const COLUMNS: [&str; 14] = [
    "n",
    "epsilon",
    "n_dn",
    "two_n",
    "n_dn_below_2n",
    "parties",
    "hop_key_bits",
    "beta_max",
    "threshold",
    "certified",
    "max_distance",
    "holevo_chi",
    "holevo_bound",
    "status",
];

#[derive(Clone, Debug, Default, Serialize)]
pub(crate) struct SweepRow {
    pub n: usize,
    pub epsilon: Option<f64>,
    pub n_dn: Option<u32>,
    pub two_n: usize,
    pub n_dn_below_2n: Option<bool>,
    pub parties: usize,
    pub hop_key_bits: Option<u32>,
    pub beta_max: Option<f64>,
    pub threshold: Option<f64>,
    pub certified: Option<bool>,
    pub max_distance: Option<f64>,
    pub holevo_chi: Option<f64>,
    pub holevo_bound: Option<f64>,
    pub status: String,
}

impl SweepRow {
    fn record(&self) -> Vec<String> {
        let f = |x: Option<f64>| x.map_or_else(String::new, sig);
        let d = |x: Option<String>| x.unwrap_or_default();
        vec![
            self.n.to_string(),
            f(self.epsilon),
            d(self.n_dn.map(|v| v.to_string())),
            self.two_n.to_string(),
            d(self.n_dn_below_2n.map(|v| v.to_string())),
            self.parties.to_string(),
            d(self.hop_key_bits.map(|v| v.to_string())),
            f(self.beta_max),
            f(self.threshold),
            d(self.certified.map(|v| v.to_string())),
            f(self.max_distance),
            f(self.holevo_chi),
            f(self.holevo_bound),
            self.status.clone(),
        ]
    }
}

impl SweepArgs {
    pub fn to_args(&self) -> Vec<String> {
        let mut v = vec![
            "--n-range".into(),
            self.n_range.to_string(),
            "--epsilons".into(),
            self.epsilons.to_string(),
            "--trials".into(),
            self.trials.to_string(),
            "--seed".into(),
            self.seed.to_string(),
            "--max-retries".into(),
            self.max_retries.to_string(),
            "--format".into(),
            flags::value_name(&self.format),
        ];
        if let Some(m) = self.m {
            v.extend(["--m".into(), m.to_string()]);
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
        match self.try_execute() {
            Ok(art) => Execution::ok(vec![art], Vec::new(), String::new()),
            Err(e) => Execution::failed(e, Vec::new()),
        }
    }

    fn row(&self, n: usize, epsilon: f64) -> Result<SweepRow, CliError> {
        let m = self.parties();
        let n_dn = dn_key_length(n, epsilon)?;
        let (hop_bits, threshold) = match self.m {
            Some(m) => (dn_key_length(n, epsilon.powf(1.0 / m as f64))?, per_hop_threshold(n, epsilon, m)),
            None => (n_dn, bias_threshold(n, epsilon)),
        };
        let mut row = SweepRow {
            n,
            epsilon: Some(epsilon),
            n_dn: Some(n_dn),
            two_n: 2 * n,
            n_dn_below_2n: Some((n_dn as usize) < 2 * n),
            parties: m,
            hop_key_bits: Some(hop_bits),
            threshold: Some(threshold),
            ..SweepRow::default()
        };
        if n > MAX_DENSE_QUBITS || hop_bits > MAX_SET_BITS {
            row.status = "skipped".into();
            return Ok(row);
        }
        let mut certified = true;
        let sets = (1..m)
            .map(|hop| {
                let params = match self.m {
                    Some(m) => CertifyParams::hop(n, epsilon, m, hop, self.seed, self.max_retries)?,
                    None => CertifyParams::single(n, epsilon, self.seed, self.max_retries)?,
                };
                let outcome = certify(&params)?;
                certified &= outcome.certified;
                Ok((outcome.best.set, "sampled".to_string()))
            })
            .collect::<qstlab::Result<Vec<_>>>()?;
        let config = ProtocolConfig::build(m, n, epsilon, self.seed, HopKeys::Given(sets))?;
        let holevo_ok = self.measure(&mut row, &config, epsilon)?;
        row.certified = Some(certified);
        let ok = row.max_distance.is_some_and(|d| d <= epsilon) && holevo_ok;
        row.status = match (certified, ok) {
            (false, _) => "uncertified",
            (true, true) => "ok",
            (true, false) => "fail",
        }
        .into();
        Ok(row)
    }

    /// Fills the measured columns and returns whether χ stayed within its bound.
    fn measure(&self, row: &mut SweepRow, config: &ProtocolConfig, epsilon: f64) -> Result<bool, CliError> {
        let chain = config.channel();
        row.beta_max = Some(chain.composed_beta_max()?);
        row.max_distance = Some(verify_epsilon(chain, epsilon, self.trials, self.seed)?.max_distance);
        let holevo = SecurityReport::evaluate(&Ensemble::computational_basis(config.n())?, chain, epsilon, LogBase::Two)?;
        row.holevo_chi = Some(holevo.chi);
        row.holevo_bound = Some(holevo.bound);
        Ok(holevo.pass)
    }

    fn control_row(&self, n: usize) -> Result<SweepRow, CliError> {
        let full = KeySet::full(n)?;
        let sets = (1..self.parties()).map(|_| (full.clone(), "full".to_string())).collect();
        let config = ProtocolConfig::build(self.parties(), n, 1.0, self.seed, HopKeys::Given(sets))?;
        let mut row = SweepRow {
            n,
            two_n: 2 * n,
            parties: self.parties(),
            hop_key_bits: Some(2 * n as u32),
            certified: Some(true),
            status: "control".into(),
            ..SweepRow::default()
        };
        self.measure(&mut row, &config, 1.0)?;
        row.holevo_bound = None;
        Ok(row)
    }

    fn parties(&self) -> usize {
        self.m.unwrap_or(2)
    }

    pub(crate) fn rows(&self) -> Result<Vec<SweepRow>, CliError> {
        let mut rows = Vec::new();
        for n in self.n_range.lo..=self.n_range.hi {
            for &eps in &self.epsilons.0 {
                rows.push(self.row(n, eps)?);
            }
        }
        if self.n_range.lo <= MAX_DENSE_QUBITS {
            rows.push(self.control_row(self.n_range.lo)?);
        }
        Ok(rows)
    }

    fn try_execute(&self) -> Result<Artifact, CliError> {
        let rows = self.rows()?;
        let bytes = match self.format {
            TableFormat::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(COLUMNS).map_err(|e| CliError::config(e.to_string()))?;
                for row in &rows {
                    w.write_record(row.record()).map_err(|e| CliError::config(e.to_string()))?;
                }
                w.into_inner().map_err(|e| CliError::config(e.to_string()))?
            }
            TableFormat::Json => (qstlab::json::to_string_sig17(&rows).map_err(qstlab::Error::from)? + "\n").into_bytes(),
        };
        Ok(Artifact::to(self.out.as_deref(), bytes))
    }
}
