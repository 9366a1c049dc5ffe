use std::process::ExitCode;

fn main() -> ExitCode {
    if let Err(e) = qstlab_cli::configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(4);
    }
    ExitCode::from(qstlab_cli::run(std::env::args_os()))
}
