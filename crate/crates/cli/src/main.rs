mod args;
mod compare;
mod run;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use psmesh::refine::Status;

use args::Cli;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    let result = if cli.compare { compare::run_compare(&cli) } else { run::run(&cli) };
    match result {
        Ok(Status::Converged) => ExitCode::SUCCESS,
        Ok(Status::PointLimit) => {
            eprintln!("warning: point limit reached; the partial mesh was written");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
