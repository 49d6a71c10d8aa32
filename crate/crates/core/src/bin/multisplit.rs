use std::process::ExitCode;

use multisplit::cli::{execute, parse_args, CliError};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();

    let inv = match parse_args(std::env::args_os()) {
        Ok(inv) => inv,
        Err(CliError::Parse(e)) => e.exit(),
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match execute(&inv) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}: {e}", inv.subcommand());
            ExitCode::from(1)
        }
    }
}
