//! `fex evaluate`: accuracy and a confusion matrix over a labeled table.

use std::path::PathBuf;

use anyhow::anyhow;
use clap::Args;
use fex::{load_model, predict, read_features, ExpressionLabel};

use crate::config::Config;
use crate::error::{with_path, CliError};
use crate::output;

#[derive(Args, Debug)]
pub struct EvaluateArgs {
    /// Trained model file.
    #[arg(long, value_name = "FILE")]
    model: PathBuf,

    /// Labeled feature table to score.
    #[arg(long, value_name = "FILE")]
    features: PathBuf,
}

pub fn run(args: &EvaluateArgs, _cfg: &Config) -> Result<(), CliError> {
    let model = with_path(load_model(&args.model), &args.model)?;
    let rows = with_path(read_features(&args.features), &args.features)?;
    if rows.is_empty() {
        return Err(CliError::Domain(anyhow!(
            "{}: no feature rows to score",
            args.features.display()
        )));
    }

    let n = ExpressionLabel::ALL.len();
    let mut confusion = vec![vec![0usize; n]; n];
    let mut correct = 0usize;
    for (idx, (vector, label)) in rows.iter().enumerate() {
        let label = label.ok_or_else(|| {
            anyhow!(
                "{}: row {} has no label; evaluation needs labeled rows",
                args.features.display(),
                idx + 1
            )
        })?;
        let (guess, _) = predict(&model, vector.as_slice())?;
        confusion[label.index()][guess.index()] += 1;
        if guess == label {
            correct += 1;
        }
    }

    output::line(format!(
        "accuracy: {:.6} ({}/{})",
        correct as f64 / rows.len() as f64,
        correct,
        rows.len()
    ))?;
    output::line("confusion matrix, rows true, columns predicted:")?;
    let mut header = String::from("        ");
    for label in ExpressionLabel::ALL {
        header.push_str(&format!("{:>9}", label.name()));
    }
    output::line(header)?;
    for (t, row) in confusion.iter().enumerate() {
        let mut line = format!("{:>8}", ExpressionLabel::ALL[t].name());
        for count in row {
            line.push_str(&format!("{count:>9}"));
        }
        output::line(line)?;
    }
    Ok(())
}
