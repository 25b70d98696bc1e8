//! `fex gen-synthetic`: a labeled corpus of schematic face images.

use std::fs;
use std::path::PathBuf;

use clap::Args;
use fex::{synth_face, write_image, ExpressionLabel};

use crate::error::{with_path, CliError};
use crate::output;

#[derive(Args, Debug)]
pub struct GenSyntheticArgs {
    /// Directory for the images and their manifest.csv.
    #[arg(long, value_name = "DIR")]
    out_dir: PathBuf,

    /// How many images to write, cycling through the seven expressions.
    #[arg(long, value_name = "N", default_value_t = 140)]
    count: usize,

    /// Base seed; image i is drawn with seed + i.
    #[arg(long, value_name = "N", default_value_t = 0)]
    seed: u64,
}

pub fn run(args: &GenSyntheticArgs) -> Result<(), CliError> {
    with_path(fs::create_dir_all(&args.out_dir), &args.out_dir)?;
    let mut manifest = String::from("path,label\n");
    for i in 0..args.count {
        let label = ExpressionLabel::ALL[i % ExpressionLabel::ALL.len()];
        let face = synth_face(label, args.seed.wrapping_add(i as u64));
        let name = format!("{}_{:04}.pgm", label.name(), i);
        let path = args.out_dir.join(&name);
        with_path(write_image(&path, &face.image), &path)?;
        manifest.push_str(&format!("{name},{label}\n"));
    }
    let manifest_path = args.out_dir.join("manifest.csv");
    with_path(fs::write(&manifest_path, manifest), &manifest_path)?;
    output::line(format!(
        "wrote {} images and manifest.csv to {}",
        args.count,
        args.out_dir.display()
    ))?;
    Ok(())
}
