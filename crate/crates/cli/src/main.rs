use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use coopbasis::{run, Cli, CliError};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|outcome| {
        match &cli.global.out {
            Some(path) => std::fs::write(path, &outcome.text).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?,
            None => {
                // A closed pipe is not worth a panic.
                let _ = std::io::stdout().write_all(outcome.text.as_bytes());
            }
        }
        Ok(outcome.pass)
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
