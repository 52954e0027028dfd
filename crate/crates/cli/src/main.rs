use std::process::ExitCode;

use clap::Parser;
use vbcomp::cli::Cli;
use vbcomp::error::exit;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::USAGE } else { exit::SUCCESS });
        }
    };
    match vbcomp::run(&cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("vbcomp {}: {e}", cli.command.name());
            ExitCode::from(e.exit_code())
        }
    }
}
