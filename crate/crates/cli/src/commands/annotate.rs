//! `fex annotate`: burn the located feature boxes into the face crop.

use std::path::PathBuf;

use clap::Args;
use fex::{write_image, BBox, GrayImage};

use crate::config::Config;
use crate::error::{with_path, CliError};
use crate::opts::PipelineFlags;
use crate::pipeline::process_image;

#[derive(Args, Debug)]
pub struct AnnotateArgs {
    /// Image to process.
    #[arg(value_name = "IMAGE")]
    image: PathBuf,

    /// Where to write the annotated crop.
    #[arg(long, value_name = "FILE")]
    out: PathBuf,

    #[command(flatten)]
    pipeline: PipelineFlags,
}

pub fn run(args: &AnnotateArgs, cfg: &Config) -> Result<(), CliError> {
    let settings = args.pipeline.resolve(cfg)?;
    let (crop, features, _) = with_path(process_image(&args.image, &settings), &args.image)?;
    let mut out = crop.clone();
    for bbox in [
        features.left_eyebrow,
        features.left_eye,
        features.right_eyebrow,
        features.right_eye,
        features.nose,
        features.mouth,
    ] {
        outline(&crop, &mut out, &bbox);
    }
    with_path(write_image(&args.out, &out), &args.out)?;
    Ok(())
}

/// Trace the 1-px box border: white over dark pixels, black over bright
/// ones, so the outline shows on any background.
fn outline(original: &GrayImage, out: &mut GrayImage, bbox: &BBox) {
    let mut mark = |x: u32, y: u32| {
        let v = if original.get(x, y) >= 128 { 0 } else { 255 };
        out.set(x, y, v);
    };
    let (x1, y1) = (bbox.right() - 1, bbox.bottom() - 1);
    for x in bbox.x..=x1 {
        mark(x, bbox.y);
        mark(x, y1);
    }
    for y in bbox.y..=y1 {
        mark(bbox.x, y);
        mark(x1, y);
    }
}
