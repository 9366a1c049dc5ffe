use std::fmt::Write as _;
use std::path::PathBuf;

use clap::Args;
use qstlab::protocol::{
    keygen_correlated, run_with_keys, security_report, HopKeys, ProtocolConfig, RunOptions, TranscriptDocument,
};
use qstlab::rng::{self, domain};
use qstlab::state::{random_pure_state_with, PureState};

use crate::exit::{CliError, CONFIG, OK};
use crate::flags::{self, DEFAULT_SEED};
use crate::output::{read_input, read_key_set, sig, Artifact, Execution};

/// Run the m-party chain end to end and report decode fidelity and security.
#[derive(Args, Clone, Debug)]
pub(crate) struct RunArgs {
    /// Number of parties (m − 1 hops).
    #[arg(long, value_parser = flags::parties)]
    pub m: usize,
    #[arg(long, value_parser = flags::dense_qubits)]
    pub n: usize,
    #[arg(long, value_parser = flags::epsilon)]
    pub epsilon: f64,
    /// One key set file per hop, in hop order; sampled and certified when omitted.
    #[arg(long, num_args = 1..)]
    pub keys: Vec<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// `zero`, `random`, or a path to a state JSON file.
    #[arg(long, default_value = "zero")]
    pub state: String,
    #[arg(long)]
    pub transcript_out: Option<PathBuf>,
    /// Include every hop's ciphertext in the transcript.
    #[arg(long)]
    pub record_states: bool,
    /// Flip one bit of the final party's key so the keys no longer cancel.
    #[arg(long)]
    pub break_keys: bool,
    /// Random inputs for the Monte-Carlo security check.
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 50)]
    pub max_retries: usize,
    /// Comma-separated tapped hops (default: all).
    #[arg(long, value_parser = flags::taps)]
    pub taps: Option<Vec<usize>>,
    /// Manifest path (default: `<transcript-out>.manifest.json`).
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

impl RunArgs {
    pub fn to_args(&self) -> Vec<String> {
        let mut v = vec![
            "--m".into(),
            self.m.to_string(),
            "--n".into(),
            self.n.to_string(),
            "--epsilon".into(),
            self.epsilon.to_string(),
        ];
        if !self.keys.is_empty() {
            v.push("--keys".into());
            v.extend(self.keys.iter().map(|k| k.display().to_string()));
        }
        v.extend([
            "--seed".into(),
            self.seed.to_string(),
            "--state".into(),
            self.state.clone(),
            "--trials".into(),
            self.trials.to_string(),
            "--max-retries".into(),
            self.max_retries.to_string(),
        ]);
        if let Some(t) = &self.transcript_out {
            v.extend(["--transcript-out".into(), t.display().to_string()]);
        }
        if self.record_states {
            v.push("--record-states".into());
        }
        if self.break_keys {
            v.push("--break-keys".into());
        }
        if let Some(taps) = &self.taps {
            let list: Vec<String> = taps.iter().map(|t| t.to_string()).collect();
            v.push(format!("--taps={}", list.join(",")));
        }
        if let Some(m) = &self.manifest {
            v.extend(["--manifest".into(), m.display().to_string()]);
        }
        v
    }

    pub fn execute(&self) -> Execution {
        let mut inputs = Vec::new();
        match self.try_execute(&mut inputs) {
            Ok(exec) => exec,
            Err(e) => Execution::failed(e, inputs),
        }
    }

    fn input_state(&self, inputs: &mut Vec<(PathBuf, String)>) -> Result<PureState, CliError> {
        match self.state.as_str() {
            "zero" => Ok(PureState::basis(self.n, 0)?),
            "random" => Ok(random_pure_state_with(self.n, &mut rng::stream(self.seed, domain::INPUT, 0))?),
            path => {
                let text = read_input(path.as_ref(), inputs)?;
                let state: PureState =
                    serde_json::from_str(&text).map_err(|e| CliError::parse(format!("{path}: {e}")))?;
                if state.n() != self.n {
                    return Err(CliError::config(format!("{path} holds {} qubits, expected {}", state.n(), self.n)));
                }
                Ok(state)
            }
        }
    }

    fn try_execute(&self, inputs: &mut Vec<(PathBuf, String)>) -> Result<Execution, CliError> {
        let hop_keys = if self.keys.is_empty() {
            HopKeys::Certified { max_retries: self.max_retries }
        } else {
            let sets = self
                .keys
                .iter()
                .map(|p| Ok((read_key_set(p, inputs)?, p.display().to_string())))
                .collect::<Result<Vec<_>, CliError>>()?;
            HopKeys::Given(sets)
        };
        let config = ProtocolConfig::build(self.m, self.n, self.epsilon, self.seed, hop_keys)?;
        let input = self.input_state(inputs)?;

        let mut keys = keygen_correlated(&config);
        if self.break_keys {
            keys = keys.with_flipped_bit(self.m, 0)?;
        }
        let options = RunOptions { taps: self.taps.clone() };
        let transcript = run_with_keys(&config, &keys, &input, &options)?;
        let report = security_report(&config, self.trials, self.seed)?;

        let verdict = |ok: bool| if ok { "PASS" } else { "FAIL" };
        let passed = transcript.outcome.decoded_ok && report.pass;
        let mut summary = String::new();
        let w = &mut summary;
        writeln!(w, "parties={} n={} epsilon={}", self.m, self.n, sig(self.epsilon)).unwrap();
        for hop in &report.hops {
            writeln!(
                w,
                "hop {}: beta_max={} threshold={} certified={} adversary_max_distance={}",
                hop.hop,
                sig(hop.beta_max),
                sig(hop.threshold),
                hop.certified,
                sig(hop.adversary_max_distance)
            )
            .unwrap();
        }
        writeln!(
            w,
            "fidelity={} keys_xor_zero={} decode={}",
            sig(transcript.outcome.fidelity),
            transcript.keys_xor_zero,
            verdict(transcript.outcome.decoded_ok)
        )
        .unwrap();
        writeln!(
            w,
            "composed_max_distance={} epsilon={} security={}",
            sig(report.composed.max_distance),
            sig(self.epsilon),
            verdict(report.composed.pass)
        )
        .unwrap();
        writeln!(w, "holevo_chi={} bound={} holevo={}", sig(report.holevo.chi), sig(report.holevo.bound), verdict(report.holevo.pass))
            .unwrap();
        writeln!(w, "result={}", verdict(passed)).unwrap();

        let mut artifacts = Vec::new();
        if let Some(path) = &self.transcript_out {
            let doc = TranscriptDocument::new(&config, &transcript, report, self.record_states);
            artifacts.push(Artifact::file(path, doc.to_json()?));
        }
        let mut exec = Execution::ok(artifacts, std::mem::take(inputs), summary);
        exec.code = if passed { OK } else { CONFIG };
        Ok(exec)
    }
}
