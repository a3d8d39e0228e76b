//! Batch caption-evaluation CLI: `evaluate`, `parse` and `consistency`.
//!
//! Exit codes: 0 on success, 1 for usage or configuration problems, 2 for
//! data or runtime failures.

mod commands;
mod config;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{RunConfig, SharedArgs};

#[derive(Parser)]
#[command(
    name = "capture",
    version,
    about = "Detail-caption evaluation: element matching plus n-gram baselines"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Score candidate captions against references over a benchmark file
    Evaluate(SharedArgs),
    /// Extract object/attribute/relation tuples from captions
    Parse(SharedArgs),
    /// Measure metric agreement with expert scores
    Consistency(SharedArgs),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help and version are not errors
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let args = match &cli.command {
        Command::Evaluate(a) | Command::Parse(a) | Command::Consistency(a) => a,
    };
    let config = match RunConfig::resolve(args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    };
    if args.print_config {
        print!("{}", config.to_toml());
        return ExitCode::SUCCESS;
    }
    capture::init_thread_pool(config.jobs);

    let result = match &cli.command {
        Command::Evaluate(_) => commands::cmd_evaluate(&config),
        Command::Parse(_) => commands::cmd_parse(&config),
        Command::Consistency(_) => commands::cmd_consistency(&config),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
