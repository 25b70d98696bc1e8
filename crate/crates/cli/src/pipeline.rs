//! The image-to-vector path shared by extract, predict and annotate.

use std::path::Path;

use fex::{
    crop_and_enlarge, extract, localize_face, read_image, FacialFeatures, FeatureVector, GrayImage,
};

use crate::opts::PipelineSettings;

// Library errors carry their causes in the message; drop the source chain
// so reports do not repeat themselves.
fn flat(err: fex::Error) -> anyhow::Error {
    anyhow::anyhow!("{err}")
}

/// Run the full pipeline on one image file: enhance, localize the face,
/// crop and enlarge it, extract the features. Returns the enlarged crop
/// alongside the boxes and the vector. The error does not name the file;
/// callers add that.
pub fn process_image(
    path: &Path,
    settings: &PipelineSettings,
) -> anyhow::Result<(GrayImage, FacialFeatures, FeatureVector)> {
    let image = read_image(path).map_err(flat)?;
    let (enhanced, bbox) =
        localize_face(&image, &settings.localize, &settings.clahe).map_err(flat)?;
    let crop = crop_and_enlarge(&enhanced, &bbox, settings.localize.resize_scale).map_err(flat)?;
    let params = settings.extract_params(crop.width, crop.height);
    let (features, vector) = extract(&crop, &settings.susan, &params).map_err(flat)?;
    Ok((crop, features, vector))
}
