//! `fex`: facial expression recognition on PGM images, as subcommands
//! over the pipeline stages: extract features, train, predict, evaluate,
//! annotate, and generate a synthetic corpus.

mod commands;
mod config;
mod error;
mod opts;
mod output;
mod pipeline;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{annotate, evaluate, extract, gen_synthetic, predict, train};
use config::Config;
use error::CliError;

#[derive(Parser)]
#[command(
    name = "fex",
    version,
    about = "Facial expression recognition on PGM images"
)]
struct Cli {
    /// Read option defaults from a key=value file; command-line flags win.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Locate facial features in images and write a feature table.
    Extract(extract::ExtractArgs),
    /// Fit the classifier to a labeled feature table.
    Train(train::TrainArgs),
    /// Classify an image, or feature rows with --row.
    Predict(predict::PredictArgs),
    /// Score a model against a labeled feature table.
    Evaluate(evaluate::EvaluateArgs),
    /// Write the enlarged face crop with located feature boxes drawn in.
    Annotate(annotate::AnnotateArgs),
    /// Generate a corpus of schematic face images with known labels.
    GenSynthetic(gen_synthetic::GenSyntheticArgs),
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::empty(),
    };
    match &cli.command {
        Command::Extract(args) => extract::run(args, &cfg),
        Command::Train(args) => train::run(args, &cfg),
        Command::Predict(args) => predict::run(args, &cfg),
        Command::Evaluate(args) => evaluate::run(args, &cfg),
        Command::Annotate(args) => annotate::run(args, &cfg),
        Command::GenSynthetic(args) => gen_synthetic::run(args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
