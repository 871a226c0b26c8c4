mod args;
mod commands;
mod error;
mod output;
mod plotdata;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};
use error::CliError;

const THREADS_VAR: &str = "ILLUSION_SIM_THREADS";

fn init_threads() -> Result<(), CliError> {
    let threads = match std::env::var(THREADS_VAR) {
        Ok(v) => v.trim().parse::<usize>().map_err(|_| {
            CliError::Usage(format!(
                "{THREADS_VAR} must be a non-negative integer, got `{v}`"
            ))
        })?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Contract(format!("thread pool: {e}")))
}

fn run(cli: Cli) -> Result<(), CliError> {
    init_threads()?;
    match &cli.command {
        Command::Sample(a) => commands::sample(cli.seed, a),
        Command::Partition(a) => commands::partition_cmd(cli.seed, a),
        Command::Illusion(a) => commands::illusion(cli.seed, a),
        Command::Convert(a) => commands::convert(a),
        Command::Plotdata(a) => {
            plotdata::plotdata(&a.results, a.out.as_deref().unwrap_or(&a.results))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("illusion-sim: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
