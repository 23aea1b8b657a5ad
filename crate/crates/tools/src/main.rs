use std::process::ExitCode;

use gec_tools::cli::{parse, CliError};
use gec_tools::commands;

fn main() -> ExitCode {
    let cli = match parse(std::env::args_os().collect()) {
        Ok(cli) => cli,
        Err(CliError::Clap(e)) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
        Err(CliError::Tool(e)) => {
            eprintln!("gec: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("gec: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
