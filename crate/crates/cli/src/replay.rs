use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser};

use crate::exit::{CliError, CONFIG, OK, PARSE};
use crate::manifest::{output_hashes, RunManifest};
use crate::output::sha256_hex;
use crate::{Cli, Command};

/// Rerun the command recorded in a manifest and compare outputs.
#[derive(Args, Clone, Debug)]
pub(crate) struct ReplayArgs {
    pub manifest: PathBuf,
    /// Also rewrite the outputs.
    #[arg(long)]
    pub write: bool,
}

pub(crate) fn replay(args: &ReplayArgs) -> u8 {
    match try_replay(args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.code
        }
    }
}

fn try_replay(args: &ReplayArgs) -> Result<u8, CliError> {
    let text = fs::read_to_string(&args.manifest)
        .map_err(|e| CliError::parse(format!("cannot read {}: {e}", args.manifest.display())))?;
    let manifest: RunManifest =
        serde_json::from_str(&text).map_err(|e| CliError { code: PARSE, message: format!("{}: {e}", args.manifest.display()) })?;
    if manifest.version != env!("CARGO_PKG_VERSION") {
        eprintln!("warning: manifest written by version {}, replaying with {}", manifest.version, env!("CARGO_PKG_VERSION"));
    }
    for input in &manifest.inputs {
        let bytes = fs::read(&input.path).map_err(|e| CliError::config(format!("input {}: {e}", input.path)))?;
        if sha256_hex(&bytes) != input.sha256 {
            return Err(CliError::config(format!("input {} changed since the manifest was written", input.path)));
        }
    }
    let argv = ["qstlab".to_string(), manifest.command.clone()].into_iter().chain(manifest.args.iter().cloned());
    let cli = Cli::try_parse_from(argv).map_err(|e| CliError::config(format!("manifest arguments: {e}")))?;
    if matches!(cli.command, Command::Replay(_)) {
        return Err(CliError::config("a manifest cannot record a replay"));
    }
    let exec = cli.command.execute();
    let produced = output_hashes(&exec);

    let mut matches = exec.code == manifest.exit_code;
    println!(
        "exit code: recorded {} replayed {} {}",
        manifest.exit_code,
        exec.code,
        if exec.code == manifest.exit_code { "ok" } else { "MISMATCH" }
    );
    if produced.len() != manifest.outputs.len() {
        matches = false;
        println!("output count: recorded {} replayed {} MISMATCH", manifest.outputs.len(), produced.len());
    }
    for (want, got) in manifest.outputs.iter().zip(&produced) {
        let same = want == got;
        matches &= same;
        println!("{}: {}", want.path, if same { "identical" } else { "MISMATCH" });
    }
    if args.write {
        exec.commit().map_err(|e| CliError::config(format!("writing outputs: {e}")))?;
    }
    Ok(if matches { OK } else { CONFIG })
}
