//! The `qstlab` command line: key-set generation, bias scans, chain runs,
//! sweeps and manifest replay.

mod bias_scan;
mod exit;
mod flags;
mod gen_keys;
mod manifest;
mod output;
mod replay;
mod run;
mod sweep;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use crate::exit::CONFIG;
use crate::manifest::RunManifest;
use crate::output::{with_suffix, Execution};

#[derive(Parser, Debug)]
#[command(name = "qstlab", version, about = "Private quantum channels from Pauli keys: key sets, bias scans, chain runs")]
pub(crate) struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub(crate) enum Command {
    GenKeys(gen_keys::GenKeysArgs),
    BiasScan(bias_scan::BiasScanArgs),
    Run(run::RunArgs),
    Sweep(sweep::SweepArgs),
    Replay(replay::ReplayArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::GenKeys(_) => "gen-keys",
            Command::BiasScan(_) => "bias-scan",
            Command::Run(_) => "run",
            Command::Sweep(_) => "sweep",
            Command::Replay(_) => "replay",
        }
    }

    fn to_args(&self) -> Vec<String> {
        match self {
            Command::GenKeys(a) => a.to_args(),
            Command::BiasScan(a) => a.to_args(),
            Command::Run(a) => a.to_args(),
            Command::Sweep(a) => a.to_args(),
            Command::Replay(_) => Vec::new(),
        }
    }

    fn seed(&self) -> Option<u64> {
        match self {
            Command::GenKeys(a) => Some(a.seed),
            Command::Run(a) => Some(a.seed),
            Command::Sweep(a) => Some(a.seed),
            Command::BiasScan(_) | Command::Replay(_) => None,
        }
    }

    fn manifest_path(&self) -> Option<PathBuf> {
        let (explicit, primary) = match self {
            Command::GenKeys(a) => (a.manifest.clone(), Some(a.out.clone())),
            Command::BiasScan(a) => (a.manifest.clone(), a.out.clone()),
            Command::Run(a) => (a.manifest.clone(), a.transcript_out.clone()),
            Command::Sweep(a) => (a.manifest.clone(), a.out.clone()),
            Command::Replay(_) => (None, None),
        };
        explicit.or_else(|| primary.map(|p| with_suffix(&p, ".manifest.json")))
    }

    pub(crate) fn execute(&self) -> Execution {
        match self {
            Command::GenKeys(a) => a.execute(),
            Command::BiasScan(a) => a.execute(),
            Command::Run(a) => a.execute(),
            Command::Sweep(a) => a.execute(),
            Command::Replay(_) => unreachable!("replay is dispatched separately"),
        }
    }
}

/// Applies `QSTLAB_THREADS` to the global rayon pool.
pub fn configure_threads() -> Result<(), String> {
    let Ok(value) = std::env::var("QSTLAB_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&t| t >= 1)
        .ok_or_else(|| format!("QSTLAB_THREADS must be a positive integer, got `{value}`"))?;
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global().map_err(|e| e.to_string())
}

fn run_command(command: &Command) -> u8 {
    let exec = command.execute();
    if let Some(err) = &exec.error {
        eprintln!("error: {err}");
    }
    if let Err(e) = exec.commit() {
        eprintln!("error: writing outputs: {e}");
        return CONFIG;
    }
    if let Some(path) = command.manifest_path() {
        let manifest = RunManifest::new(command.name(), command.to_args(), command.seed(), &exec);
        if let Err(e) = std::fs::write(&path, manifest.to_json()) {
            eprintln!("error: writing {}: {e}", path.display());
            return CONFIG;
        }
    }
    exec.code
}

/// Parses `args` (program name first), runs the command and returns its exit code.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => CONFIG,
            };
            let _ = e.print();
            return code;
        }
    };
    match &cli.command {
        Command::Replay(args) => replay::replay(args),
        command => run_command(command),
    }
}
