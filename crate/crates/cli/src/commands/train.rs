//! `fex train`: labeled feature table in, model file and loss curve out.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use anyhow::anyhow;
use clap::Args;
use fex::{init_model, read_features, save_model, train, ExpressionLabel};

use crate::config::Config;
use crate::error::{with_path, CliError};
use crate::opts::TrainFlags;
use crate::output;

/// Layer sizes of the classifier: 15 measurements in, two hidden layers,
/// one output per expression.
pub const MODEL_DIMS: [usize; 4] = [15, 15, 7, 7];

#[derive(Args, Debug)]
pub struct TrainArgs {
    /// Labeled feature table to fit.
    #[arg(long, value_name = "FILE")]
    features: PathBuf,

    /// Where to write the trained model.
    #[arg(long, value_name = "FILE")]
    model_out: PathBuf,

    /// Where to write the epoch,mse curve [default: <model-out>.history.csv].
    #[arg(long, value_name = "FILE")]
    history: Option<PathBuf>,

    #[command(flatten)]
    train: TrainFlags,
}

pub fn run(args: &TrainArgs, cfg: &Config) -> Result<(), CliError> {
    let config = args.train.resolve(cfg)?;
    let rows = with_path(read_features(&args.features), &args.features)?;
    let mut data = Vec::with_capacity(rows.len());
    for (idx, (vector, label)) in rows.iter().enumerate() {
        let label = label.ok_or_else(|| {
            anyhow!(
                "{}: row {} has no label; training needs labeled rows",
                args.features.display(),
                idx + 1
            )
        })?;
        data.push((vector.as_slice().to_vec(), label));
    }

    let mut model = init_model(&MODEL_DIMS, &ExpressionLabel::ALL, config.seed)?;
    let report = train(&mut model, &data, &config)?;
    with_path(save_model(&model, &args.model_out), &args.model_out)?;

    let history_path = args
        .history
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}.history.csv", args.model_out.display())));
    let mut curve = String::from("epoch,mse\n");
    for (epoch, mse) in report.history.iter().enumerate() {
        writeln!(curve, "{},{:.16e}", epoch + 1, mse).expect("string write");
    }
    with_path(fs::write(&history_path, curve), &history_path)?;

    output::line(format!(
        "trained {} epochs, final mse {:.6e}, model in {}",
        report.epochs,
        report.final_mse,
        args.model_out.display()
    ))?;
    Ok(())
}
