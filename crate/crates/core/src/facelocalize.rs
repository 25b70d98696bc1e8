//! Find the face region in an enhanced image.
//!
//! The image is thresholded into face and background, small clutter is
//! knocked out by an opening and brought back only where it reconstructs
//! from the opened marker, components touching the border are cleared, and
//! the largest surviving component's bounding box is the face.

use crate::error::{Error, Result};
use crate::img::{crop, resize_bilinear, BBox, BinaryMask, GrayImage};
use crate::morphology::{clear_border, dilate, disk_se, erode, reconstruct, regional_maxima};
use crate::preprocess::{clahe, ClaheParams};

/// How the face/background threshold is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Threshold {
    /// Pick the level that best separates the histogram into two classes.
    Otsu,
    /// Use this level as-is.
    Fixed(u8),
}

/// Which side of the threshold is the face.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarity {
    /// Face pixels are at or below the threshold.
    Dark,
    /// Face pixels are above the threshold.
    Light,
}

/// Tuning knobs for localization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalizeParams {
    pub threshold: Threshold,
    pub polarity: Polarity,
    /// Disk radius for the opening that removes clutter.
    pub se_radius: u32,
    /// Enlargement factor applied by [`crop_and_enlarge`].
    pub resize_scale: f64,
    /// Reconstruct from intensity peaks instead of the opened mask. The
    /// peaks of the complement (for dark faces) sit on the darkest patches,
    /// which for a face are the features themselves.
    pub use_regional_maxima: bool,
}

impl Default for LocalizeParams {
    fn default() -> Self {
        LocalizeParams {
            threshold: Threshold::Otsu,
            polarity: Polarity::Dark,
            se_radius: 3,
            resize_scale: 2.0,
            use_regional_maxima: false,
        }
    }
}

/// Threshold level maximizing the between-class variance of the histogram.
///
/// A pixel belongs to the low class when its value is at or below the
/// level. Ties go to the lowest level, and a constant image yields its own
/// value.
pub fn otsu_threshold(image: &GrayImage) -> u8 {
    let mut hist = [0u64; 256];
    for &p in &image.pixels {
        hist[p as usize] += 1;
    }
    let total = image.pixels.len() as f64;
    let total_sum: f64 = hist
        .iter()
        .enumerate()
        .map(|(v, &c)| v as f64 * c as f64)
        .sum();
    let mut best = 0u8;
    let mut best_var = -1.0;
    let mut count0 = 0.0;
    let mut sum0 = 0.0;
    for (t, &bin) in hist.iter().enumerate() {
        count0 += bin as f64;
        sum0 += t as f64 * bin as f64;
        let count1 = total - count0;
        if count0 == 0.0 {
            continue;
        }
        if count1 == 0.0 {
            // From here on one class is empty; nothing can improve.
            if best_var < 0.0 {
                best = t as u8;
            }
            break;
        }
        let mean0 = sum0 / count0;
        let mean1 = (total_sum - sum0) / count1;
        let var = count0 * count1 * (mean0 - mean1) * (mean0 - mean1);
        if var > best_var {
            best_var = var;
            best = t as u8;
        }
    }
    best
}

/// Split the image at `level` according to `polarity`.
pub fn binarize(image: &GrayImage, level: u8, polarity: Polarity) -> BinaryMask {
    let mut mask = BinaryMask::new(image.width, image.height, false).unwrap();
    for y in 0..image.height {
        for x in 0..image.width {
            let v = image.get(x, y);
            let set = match polarity {
                Polarity::Dark => v <= level,
                Polarity::Light => v > level,
            };
            mask.set(x, y, set);
        }
    }
    mask
}

fn invert_gray(image: &GrayImage) -> GrayImage {
    let pixels = image.pixels.iter().map(|&p| 255 - p).collect();
    GrayImage::from_pixels(image.width, image.height, pixels).unwrap()
}

fn mask_and(a: &BinaryMask, b: &BinaryMask) -> BinaryMask {
    let mut out = BinaryMask::new(a.width, a.height, false).unwrap();
    for i in 0..out.bits.len() {
        out.bits[i] = a.bits[i] && b.bits[i];
    }
    out
}

/// Locate the face box in an already contrast-enhanced image.
pub fn localize_enhanced(enhanced: &GrayImage, params: &LocalizeParams) -> Result<BBox> {
    let level = match params.threshold {
        Threshold::Otsu => otsu_threshold(enhanced),
        Threshold::Fixed(v) => v,
    };
    let binarized = binarize(enhanced, level, params.polarity);
    if binarized.is_empty() {
        return Err(Error::NoFaceFound);
    }
    let marker = if params.use_regional_maxima {
        let peaks = match params.polarity {
            Polarity::Dark => regional_maxima(&invert_gray(enhanced)),
            Polarity::Light => regional_maxima(enhanced),
        };
        mask_and(&peaks, &binarized)
    } else {
        let se = disk_se(params.se_radius as f64);
        dilate(&erode(&binarized, &se), &se)
    };
    let rebuilt = reconstruct(&marker, &binarized)?;
    if rebuilt.is_empty() {
        return Err(Error::NoFaceFound);
    }
    // Clearing border-connected components can wipe the mask entirely when
    // the face itself leans on the frame; fall back to the uncleared mask.
    let cleared = clear_border(&rebuilt);
    let candidates = if cleared.is_empty() { rebuilt } else { cleared };

    let segments = crate::featureextract::label_components(&candidates);
    segments
        .iter()
        .max_by_key(|s| s.area)
        .map(|s| s.bbox)
        .ok_or(Error::NoFaceFound)
}

/// Enhance contrast, then locate the face. Returns the enhanced image
/// alongside the box so the caller can crop without enhancing twice.
pub fn localize_face(
    image: &GrayImage,
    params: &LocalizeParams,
    clahe_params: &ClaheParams,
) -> Result<(GrayImage, BBox)> {
    let enhanced = clahe(image, clahe_params)?;
    let bbox = localize_enhanced(&enhanced, params)?;
    Ok((enhanced, bbox))
}

/// Crop the box out of the image and blow it up by `scale` with bilinear
/// interpolation. The output dimensions are the box dimensions times the
/// scale, rounded to the nearest pixel.
pub fn crop_and_enlarge(image: &GrayImage, bbox: &BBox, scale: f64) -> Result<GrayImage> {
    if !scale.is_finite() || scale <= 0.0 {
        return Err(Error::Param {
            context: format!("resize scale {scale} (want > 0)"),
        });
    }
    let cropped = crop(image, bbox)?;
    let new_w = ((bbox.w as f64 * scale).round() as u32).max(1);
    let new_h = ((bbox.h as f64 * scale).round() as u32).max(1);
    resize_bilinear(&cropped, new_w, new_h)
}
