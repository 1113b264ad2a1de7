//! `retrokit`: command-line front end for corpus assembly, network training,
//! evaluation and multistep retrobiosynthesis search.

mod args;
mod commands;
mod error;
mod io;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command, FileConfig};
use error::CliError;

fn run(cli: Cli) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let seed = cli.seed.or(file.seed).unwrap_or(0);
    if let Some(threads) = cli.threads.or(file.threads) {
        if threads == 0 {
            return Err(CliError::Input("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Invariant(e.to_string()))?;
    }
    match cli.command {
        Command::Synth(a) => commands::synth(a.merge(file.synth), seed),
        Command::Ingest(a) => commands::ingest(a.merge(file.ingest)),
        Command::Augment(a) => commands::augment(a.merge(file.augment), seed),
        Command::Train(a) => commands::train_model(a.merge(file.train), seed),
        Command::Eval(a) => commands::eval(a.merge(file.eval)),
        Command::Retro(a) => commands::retro(a.merge(file.retro)),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("retrokit: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
