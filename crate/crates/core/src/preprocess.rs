//! Contrast-limited adaptive histogram equalization.
//!
//! The image is divided into a grid of tiles. Each tile gets a 256-bin
//! histogram, clipped at `clip_limit` times the uniform bin load, with the
//! clipped excess spread evenly back across all bins. The tile's remapping
//! curve is the histogram CDF, normalized so the lowest occupied level maps
//! to 0 and the highest to 255; a tile whose pixels share a single level
//! keeps the identity curve. Output pixels blend the curves of the four
//! nearest tile centers bilinearly, clamping to the nearest tile beyond the
//! border row and column of centers.
//!
//! With a 1x1 grid and an unbounded clip limit this reduces to plain global
//! histogram equalization.

use crate::error::{Error, Result};
use crate::img::GrayImage;

/// Tile grid shape and clip strength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClaheParams {
    pub tiles_x: u32,
    pub tiles_y: u32,
    /// Histogram ceiling as a multiple of the mean bin count; must be at
    /// least 1. `f64::INFINITY` disables clipping.
    pub clip_limit: f64,
}

impl Default for ClaheParams {
    fn default() -> Self {
        ClaheParams {
            tiles_x: 8,
            tiles_y: 8,
            clip_limit: 2.0,
        }
    }
}

/// Clips `hist` at `clip_limit` times the mean bin load of a tile holding
/// `tile_pixels` samples, then redistributes the removed mass uniformly.
///
/// The ceiling is `max(1, floor(clip_limit * tile_pixels / 256))`. Uniform
/// redistribution adds `excess / 256` to every bin and walks the remainder
/// across the histogram in evenly spaced single counts, so no bin ends more
/// than one count above `ceiling + excess / 256`. Total mass is preserved.
pub fn clip_histogram(hist: &mut [u32; 256], clip_limit: f64, tile_pixels: u32) {
    if !clip_limit.is_finite() {
        return;
    }
    let ceiling_f = clip_limit * tile_pixels as f64 / 256.0;
    if ceiling_f >= tile_pixels as f64 {
        return;
    }
    let ceiling = (ceiling_f.floor() as u32).max(1);
    let mut excess: u32 = 0;
    for h in hist.iter_mut() {
        if *h > ceiling {
            excess += *h - ceiling;
            *h = ceiling;
        }
    }
    if excess == 0 {
        return;
    }
    let base = excess / 256;
    let mut rem = (excess % 256) as usize;
    if base > 0 {
        for h in hist.iter_mut() {
            *h += base;
        }
    }
    if let Some(step) = 256usize.checked_div(rem) {
        let step = step.max(1);
        let mut i = 0;
        while i < 256 && rem > 0 {
            hist[i] += 1;
            rem -= 1;
            i += step;
        }
    }
}

/// Remapping curve for one tile: CDF equalization anchored so the lowest
/// occupied level maps to 0 and the highest to 255. A single-level tile
/// keeps the identity curve.
fn tile_lut(hist: &[u32; 256], tile_pixels: u32) -> [u8; 256] {
    let mut lut = [0u8; 256];
    let occupied = hist.iter().filter(|&&h| h > 0).count();
    if occupied <= 1 {
        for (v, slot) in lut.iter_mut().enumerate() {
            *slot = v as u8;
        }
        return lut;
    }
    let cdf_min = *hist.iter().find(|&&h| h > 0).unwrap();
    let denom = (tile_pixels - cdf_min) as f64;
    let mut cum: u32 = 0;
    for v in 0..256 {
        cum += hist[v];
        let scaled = if cum <= cdf_min {
            0.0
        } else {
            255.0 * (cum - cdf_min) as f64 / denom
        };
        lut[v] = (scaled + 0.5).floor().clamp(0.0, 255.0) as u8;
    }
    lut
}

/// Tile boundaries along one axis: `tiles + 1` cut positions covering
/// `extent` as evenly as integer division allows.
fn cuts(extent: u32, tiles: u32) -> Vec<u32> {
    (0..=tiles)
        .map(|k| ((k as u64 * extent as u64) / tiles as u64) as u32)
        .collect()
}

struct Axis {
    /// Tile index for each pixel coordinate.
    tile_of: Vec<usize>,
    /// Continuous center of each tile.
    centers: Vec<f64>,
}

fn axis(extent: u32, tiles: u32) -> Axis {
    let cuts = cuts(extent, tiles);
    let mut tile_of = vec![0usize; extent as usize];
    let mut centers = Vec::with_capacity(tiles as usize);
    for t in 0..tiles as usize {
        for p in cuts[t]..cuts[t + 1] {
            tile_of[p as usize] = t;
        }
        centers.push((cuts[t] as f64 + cuts[t + 1] as f64) / 2.0);
    }
    Axis { tile_of, centers }
}

/// Neighbor pair and blend weight toward the second neighbor, for a pixel
/// center at `pos` inside tile `t`.
fn neighbors(axis: &Axis, t: usize, pos: f64) -> (usize, usize, f64) {
    let last = axis.centers.len() - 1;
    let (lo, hi) = if pos < axis.centers[t] {
        (t.saturating_sub(1), t)
    } else {
        (t, (t + 1).min(last))
    };
    if lo == hi {
        return (lo, hi, 0.0);
    }
    let span = axis.centers[hi] - axis.centers[lo];
    let w = ((pos - axis.centers[lo]) / span).clamp(0.0, 1.0);
    (lo, hi, w)
}

/// Applies contrast-limited adaptive histogram equalization.
///
/// Every tile of the grid must contain at least one pixel, so the grid can
/// be no finer than the image itself. A constant image is returned
/// unchanged.
pub fn clahe(image: &GrayImage, params: &ClaheParams) -> Result<GrayImage> {
    if params.tiles_x == 0
        || params.tiles_y == 0
        || params.tiles_x > image.width
        || params.tiles_y > image.height
    {
        return Err(Error::TileGrid {
            tiles_x: params.tiles_x,
            tiles_y: params.tiles_y,
            width: image.width,
            height: image.height,
        });
    }
    if params.clip_limit.is_nan() || params.clip_limit < 1.0 {
        return Err(Error::NonFinite {
            context: format!("clip limit {} is below 1", params.clip_limit),
        });
    }

    let xcuts = cuts(image.width, params.tiles_x);
    let ycuts = cuts(image.height, params.tiles_y);
    let tx = params.tiles_x as usize;
    let ty = params.tiles_y as usize;

    let mut luts: Vec<[u8; 256]> = Vec::with_capacity(tx * ty);
    for trow in 0..ty {
        for tcol in 0..tx {
            let (x0, x1) = (xcuts[tcol], xcuts[tcol + 1]);
            let (y0, y1) = (ycuts[trow], ycuts[trow + 1]);
            let mut hist = [0u32; 256];
            for y in y0..y1 {
                for x in x0..x1 {
                    hist[image.get(x, y) as usize] += 1;
                }
            }
            let tile_pixels = (x1 - x0) * (y1 - y0);
            // A single-level tile keeps the identity curve; clipping first
            // would smear its spike across the histogram and break that.
            if hist.iter().filter(|&&h| h > 0).count() > 1 {
                clip_histogram(&mut hist, params.clip_limit, tile_pixels);
            }
            luts.push(tile_lut(&hist, tile_pixels));
        }
    }

    let ax = axis(image.width, params.tiles_x);
    let ay = axis(image.height, params.tiles_y);
    let mut out = GrayImage::new(image.width, image.height, 0)?;
    for y in 0..image.height {
        let (t0y, t1y, wy) = neighbors(&ay, ay.tile_of[y as usize], y as f64 + 0.5);
        for x in 0..image.width {
            let (t0x, t1x, wx) = neighbors(&ax, ax.tile_of[x as usize], x as f64 + 0.5);
            let v = image.get(x, y) as usize;
            let m00 = luts[t0y * tx + t0x][v] as f64;
            let m10 = luts[t0y * tx + t1x][v] as f64;
            let m01 = luts[t1y * tx + t0x][v] as f64;
            let m11 = luts[t1y * tx + t1x][v] as f64;
            let top = m00 + (m10 - m00) * wx;
            let bot = m01 + (m11 - m01) * wx;
            let blended = top + (bot - top) * wy;
            out.set(x, y, (blended + 0.5).floor().clamp(0.0, 255.0) as u8);
        }
    }
    Ok(out)
}
