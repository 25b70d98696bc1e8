//! `fex predict`: one line per input, the label then the seven scores.

use std::path::PathBuf;

use anyhow::anyhow;
use clap::Args;
use fex::{load_model, predict, read_features, ExpressionLabel, MlpModel};

use crate::config::Config;
use crate::error::{with_path, CliError};
use crate::opts::PipelineFlags;
use crate::output;
use crate::pipeline::process_image;

#[derive(Args, Debug)]
pub struct PredictArgs {
    /// Image to classify, or a feature table with --row.
    #[arg(value_name = "INPUT")]
    input: PathBuf,

    /// Trained model file.
    #[arg(long, value_name = "FILE")]
    model: PathBuf,

    /// Treat INPUT as a feature table and classify every row.
    #[arg(long)]
    row: bool,

    #[command(flatten)]
    pipeline: PipelineFlags,
}

pub fn run(args: &PredictArgs, cfg: &Config) -> Result<(), CliError> {
    let model = with_path(load_model(&args.model), &args.model)?;
    if args.row {
        let rows = with_path(read_features(&args.input), &args.input)?;
        if rows.is_empty() {
            return Err(CliError::Domain(anyhow!(
                "{}: no feature rows",
                args.input.display()
            )));
        }
        for (vector, _) in &rows {
            output::line(prediction_line(&model, vector.as_slice())?)?;
        }
    } else {
        let settings = args.pipeline.resolve(cfg)?;
        let (_, _, vector) = with_path(process_image(&args.input, &settings), &args.input)?;
        output::line(prediction_line(&model, vector.as_slice())?)?;
    }
    Ok(())
}

/// The winning label, then one score per expression in the fixed order.
fn prediction_line(model: &MlpModel, input: &[f64; 15]) -> Result<String, CliError> {
    let (label, scores) = predict(model, input)?;
    let mut line = label.name().to_string();
    for want in ExpressionLabel::ALL {
        let idx = model
            .labels
            .iter()
            .position(|&l| l == want)
            .ok_or_else(|| anyhow!("model has no output for {want}"))?;
        line.push_str(&format!(" {:.6}", scores[idx]));
    }
    Ok(line)
}
