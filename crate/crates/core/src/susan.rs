//! Edge detection by local area comparison.
//!
//! Every pixel carries a circular mask; the pixels inside the mask whose
//! brightness is close to the center's form the center's "similar" area.
//! On flat patches that area is large, near an edge it shrinks to roughly
//! half the mask, so `geometric threshold - area` works as edge strength.
//! No image derivatives are involved, which keeps the response stable in
//! the presence of noise.

use crate::error::{Error, Result};
use crate::img::{BinaryMask, GrayImage};
use crate::morphology::disk_se;

/// Tuning knobs for the edge response.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SusanParams {
    /// Brightness difference scale `t`. Differences well below `t` count as
    /// similar, differences well above count as different.
    pub brightness_t: f64,
    /// Fraction of the maximum attainable area used as the geometric
    /// threshold `g`. Lower values keep only stronger edges.
    pub geometric_fraction: f64,
    /// Radius of the circular mask in pixels.
    pub mask_radius: f64,
    /// Replace the smooth similarity curve with a hard cutoff at `t`.
    /// Mostly useful for demonstrating why the smooth curve is better.
    pub hard_comparator: bool,
}

impl Default for SusanParams {
    fn default() -> Self {
        SusanParams {
            brightness_t: 27.0,
            geometric_fraction: 0.75,
            mask_radius: 3.4,
            hard_comparator: false,
        }
    }
}

impl SusanParams {
    fn validate(&self) -> Result<()> {
        if !self.brightness_t.is_finite() || self.brightness_t < 1.0 {
            return Err(Error::Param {
                context: format!("brightness threshold {} (want >= 1)", self.brightness_t),
            });
        }
        if !self.geometric_fraction.is_finite()
            || self.geometric_fraction <= 0.0
            || self.geometric_fraction > 1.0
        {
            return Err(Error::Param {
                context: format!(
                    "geometric fraction {} (want in (0, 1])",
                    self.geometric_fraction
                ),
            });
        }
        if !self.mask_radius.is_finite() || self.mask_radius < 1.0 {
            return Err(Error::Param {
                context: format!("mask radius {} (want >= 1)", self.mask_radius),
            });
        }
        Ok(())
    }
}

/// Per-pixel edge response of an image.
#[derive(Debug, Clone)]
pub struct EdgeStrengthImage {
    pub width: u32,
    pub height: u32,
    /// Row-major strengths, zero on flat patches, larger across edges.
    pub strength: Vec<f64>,
    /// Interior geometric threshold: the strength ceiling away from borders.
    pub geometric_threshold: f64,
}

impl EdgeStrengthImage {
    pub fn get(&self, x: u32, y: u32) -> f64 {
        self.strength[(y as usize) * (self.width as usize) + x as usize]
    }
}

fn similarity(diff: f64, t: f64, hard: bool) -> f64 {
    if hard {
        if diff.abs() <= t {
            1.0
        } else {
            0.0
        }
    } else {
        (-(diff / t).powi(6)).exp()
    }
}

/// Similar-area of the mask centered at `(x, y)`: the sum of similarity
/// scores of every in-bounds mask pixel other than the center itself.
pub fn usan_area(image: &GrayImage, x: u32, y: u32, params: &SusanParams) -> Result<f64> {
    params.validate()?;
    let offsets = disk_se(params.mask_radius).offsets;
    let center = image.get(x, y) as f64;
    let mut area = 0.0;
    for (dx, dy) in offsets {
        if dx == 0 && dy == 0 {
            continue;
        }
        let nx = x as i64 + dx as i64;
        let ny = y as i64 + dy as i64;
        if nx < 0 || ny < 0 || nx >= image.width as i64 || ny >= image.height as i64 {
            continue;
        }
        let v = image.get(nx as u32, ny as u32) as f64;
        area += similarity(v - center, params.brightness_t, params.hard_comparator);
    }
    Ok(area)
}

/// Edge response over the whole image.
///
/// Strength at a pixel is `max(g - n, 0)` where `n` is the similar-area and
/// `g` is `geometric_fraction` times the largest area attainable there. Near
/// the borders the mask is clipped by the image edge, so `g` shrinks with it
/// rather than flagging every border pixel as an edge.
pub fn susan_edge_strength(image: &GrayImage, params: &SusanParams) -> Result<EdgeStrengthImage> {
    params.validate()?;
    let offsets = disk_se(params.mask_radius).offsets;
    let full_count = (offsets.len() - 1) as f64;

    // Brightness differences are integers, so the smooth comparator only
    // ever sees 256 distinct magnitudes. Tabulating them up front keeps
    // exp() out of the inner loop without changing a single bit of output.
    let table: Vec<f64> = (0..256)
        .map(|d| similarity(d as f64, params.brightness_t, params.hard_comparator))
        .collect();

    let w = image.width as i64;
    let h = image.height as i64;
    let mut strength = vec![0.0; (image.width as usize) * (image.height as usize)];
    for y in 0..h {
        for x in 0..w {
            let center = image.get(x as u32, y as u32) as i32;
            let mut n = 0.0;
            let mut in_bounds = 0u32;
            for &(dx, dy) in &offsets {
                if dx == 0 && dy == 0 {
                    continue;
                }
                let nx = x + dx as i64;
                let ny = y + dy as i64;
                if nx < 0 || ny < 0 || nx >= w || ny >= h {
                    continue;
                }
                in_bounds += 1;
                let v = image.get(nx as u32, ny as u32) as i32;
                n += table[(v - center).unsigned_abs() as usize];
            }
            let g = params.geometric_fraction * in_bounds as f64;
            let s = g - n;
            strength[(y * w + x) as usize] = if s > 0.0 { s } else { 0.0 };
        }
    }
    Ok(EdgeStrengthImage {
        width: image.width,
        height: image.height,
        strength,
        geometric_threshold: params.geometric_fraction * full_count,
    })
}

/// Binarize an edge response, keeping pixels with strength above `threshold`.
///
/// With `despeckle` set, a single 3x3 median pass follows: a pixel survives
/// when at least five of the nine pixels in its neighborhood (counting
/// itself, out-of-bounds as clear) were set. That removes isolated
/// responses without eroding edge segments.
pub fn edge_mask(edges: &EdgeStrengthImage, threshold: f64, despeckle: bool) -> BinaryMask {
    let mut mask = BinaryMask::new(edges.width, edges.height, false).unwrap();
    for y in 0..edges.height {
        for x in 0..edges.width {
            if edges.get(x, y) > threshold {
                mask.set(x, y, true);
            }
        }
    }
    if !despeckle {
        return mask;
    }
    let mut out = BinaryMask::new(mask.width, mask.height, false).unwrap();
    for y in 0..mask.height as i64 {
        for x in 0..mask.width as i64 {
            let mut count = 0;
            for dy in -1..=1 {
                for dx in -1..=1 {
                    let nx = x + dx;
                    let ny = y + dy;
                    if nx >= 0
                        && ny >= 0
                        && nx < mask.width as i64
                        && ny < mask.height as i64
                        && mask.get(nx as u32, ny as u32)
                    {
                        count += 1;
                    }
                }
            }
            if count >= 5 {
                out.set(x as u32, y as u32, true);
            }
        }
    }
    out
}
