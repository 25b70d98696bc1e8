//! `fex extract`: images in, feature table out.

use std::fs;
use std::path::PathBuf;

use anyhow::anyhow;
use clap::Args;
use fex::{label_from_filename, load_manifest, write_features, ExpressionLabel, FeatureVector};

use crate::config::Config;
use crate::error::{with_path, CliError};
use crate::opts::PipelineFlags;
use crate::output;
use crate::pipeline::process_image;

#[derive(Args, Debug)]
pub struct ExtractArgs {
    /// Images to process; the code in each file name supplies its label.
    #[arg(
        value_name = "IMAGE",
        required_unless_present = "manifest",
        conflicts_with = "manifest"
    )]
    images: Vec<PathBuf>,

    /// Two-column path,label listing used instead of positional images.
    #[arg(long, value_name = "FILE")]
    manifest: Option<PathBuf>,

    /// Output feature table.
    #[arg(long, value_name = "FILE")]
    out: PathBuf,

    /// Failed-image report, one `path: reason` line each [default: <out>.skip].
    #[arg(long, value_name = "FILE")]
    skip_log: Option<PathBuf>,

    #[command(flatten)]
    pipeline: PipelineFlags,
}

pub fn run(args: &ExtractArgs, cfg: &Config) -> Result<(), CliError> {
    let settings = args.pipeline.resolve(cfg)?;
    let inputs: Vec<(PathBuf, Option<ExpressionLabel>)> = match &args.manifest {
        Some(path) => with_path(load_manifest(path), path)?
            .into_iter()
            .map(|entry| (entry.path, Some(entry.label)))
            .collect(),
        None => args
            .images
            .iter()
            .map(|path| {
                let name = path.file_name().map(|n| n.to_string_lossy().into_owned());
                (path.clone(), name.as_deref().and_then(label_from_filename))
            })
            .collect(),
    };
    if inputs.is_empty() {
        return Err(CliError::usage(
            "no input images; pass image paths or a non-empty --manifest",
        ));
    }

    // Rows keep the input order; failures go to the skip log instead.
    let mut rows: Vec<(FeatureVector, Option<ExpressionLabel>)> = Vec::new();
    let mut skipped: Vec<String> = Vec::new();
    for (path, label) in &inputs {
        match process_image(path, &settings) {
            Ok((_, _, vector)) => rows.push((vector, *label)),
            Err(err) => skipped.push(format!("{}: {err}", path.display())),
        }
    }

    let skip_path = args
        .skip_log
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}.skip", args.out.display())));
    let mut log = skipped.join("\n");
    if !log.is_empty() {
        log.push('\n');
    }
    with_path(fs::write(&skip_path, log), &skip_path)?;
    if !skipped.is_empty() {
        eprintln!(
            "skipped {} of {} images, reasons in {}",
            skipped.len(),
            inputs.len(),
            skip_path.display()
        );
    }

    if rows.is_empty() {
        return Err(CliError::Domain(anyhow!(
            "no image yielded a feature row (see {})",
            skip_path.display()
        )));
    }
    with_path(write_features(&args.out, &rows), &args.out)?;
    output::line(format!(
        "wrote {} rows to {}",
        rows.len(),
        args.out.display()
    ))?;
    Ok(())
}
