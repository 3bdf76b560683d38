use std::io::Write;
use std::process::ExitCode;

use archslice::cli::{run, CliArgs};
use clap::Parser;

fn main() -> ExitCode {
    let config = CliArgs::parse().into_config();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let code = run(&config, &mut stdout.lock(), &mut stderr.lock());
    let _ = stdout.lock().flush();
    ExitCode::from(code as u8)
}
