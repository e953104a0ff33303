//! `ctrlrob`: generate networks, simulate attacks, build datasets, train
//! the predictor, and evaluate or plot the results, reproducibly.

mod args;
mod commands;
mod config;
mod errors;
mod svg;

use clap::Parser;

use crate::args::{Cli, Command};
use crate::errors::CliError;

fn main() {
    // --version prints the build plus a fingerprint of all built-in
    // defaults, so runs can be tied to the exact default set
    let mut argv = std::env::args();
    let _ = argv.next();
    if matches!(argv.next().as_deref(), Some("--version" | "-V")) {
        println!(
            "ctrlrob {} (defaults {:016x})",
            env!("CARGO_PKG_VERSION"),
            config::defaults_fingerprint()
        );
        return;
    }

    let cli = Cli::parse(); // usage errors exit with code 2
    if let Err(err) = run(cli) {
        eprintln!("error: {}", err.message);
        std::process::exit(err.code);
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file_config = config::load_config_file(cli.config.as_deref())?;
    match cli.command {
        Command::Generate(args) => commands::generate::run(args, &file_config),
        Command::Simulate(args) => commands::simulate::run(args, &file_config),
        Command::Dataset(args) => commands::dataset::run(args, &file_config),
        Command::Train(args) => commands::train::run(args, &file_config),
        Command::Predict(args) => commands::predict::run(args, &file_config),
        Command::Evaluate(args) => commands::evaluate::run(args, &file_config),
        Command::Plot(args) => commands::plot::run(args, &file_config),
    }
}
