//! `bkmatch`: build background packs, match ontologies against them and
//! evaluate the resulting alignments.

mod commands;
mod config;
mod error;
mod inputs;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "bkmatch", version, about = "Ontology matching with background knowledge")]
struct Cli {
    /// Worker threads for parallel stages; defaults to the number of cores.
    /// Results do not depend on this value.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Materialize a background pack directory from N-Triples dumps.
    BuildPack(commands::build_pack::Args),
    /// Match two ontologies with one or more background packs.
    Match(commands::matching::Args),
    /// Score system alignments against references.
    Eval(commands::eval::Args),
    /// Count significantly different test cases for every pair of runs.
    Significance(commands::significance::Args),
    /// Impact of varying the strategy or the source over a run grid.
    Impact(commands::impact::Args),
    /// Write a random-walk corpus for embedding training.
    Walks(commands::walks::Args),
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("cannot start thread pool: {e}")))?;
    }
    match cli.command {
        Command::BuildPack(a) => commands::build_pack::run(a),
        Command::Match(a) => commands::matching::run(a),
        Command::Eval(a) => commands::eval::run(a),
        Command::Significance(a) => commands::significance::run(a),
        Command::Impact(a) => commands::impact::run(a),
        Command::Walks(a) => commands::walks::run(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version go to stdout and succeed; usage errors are
            // configuration errors.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("bkmatch: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
