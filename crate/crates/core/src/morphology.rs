//! Binary and grayscale morphology on masks and images.
//!
//! Structuring elements are explicit offset sets; [`disk_se`] builds the
//! digital disk `{(dx, dy) : dx^2 + dy^2 <= r^2}`. Pixels outside the image
//! read as false for both [`dilate`] and [`erode`], so erosion always clears
//! a border band as wide as the element's reach.
//!
//! Connectivity is 8-neighbor throughout: reconstruction, border clearing,
//! and regional maxima all treat diagonal neighbors as adjacent.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::img::{BinaryMask, GrayImage};

/// Set of pixel offsets probed by a morphological operation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructuringElement {
    pub offsets: Vec<(i32, i32)>,
}

impl StructuringElement {
    /// True when `(0, 0)` is part of the element.
    pub fn contains_origin(&self) -> bool {
        self.offsets.contains(&(0, 0))
    }
}

/// Digital disk of the given radius, origin included.
///
/// Radius 0 yields just the origin, radius 1 the 4-neighborhood plus origin
/// (5 offsets), radius 2 a 13-offset disk. The disk is symmetric under
/// negation of its offsets.
pub fn disk_se(radius: f64) -> StructuringElement {
    let r = radius.max(0.0);
    let reach = r.floor() as i32;
    let r2 = r * r;
    let mut offsets = Vec::new();
    for dy in -reach..=reach {
        for dx in -reach..=reach {
            if (dx * dx + dy * dy) as f64 <= r2 {
                offsets.push((dx, dy));
            }
        }
    }
    StructuringElement { offsets }
}

const NEIGHBORS_8: [(i32, i32); 8] = [
    (-1, -1),
    (0, -1),
    (1, -1),
    (-1, 0),
    (1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
];

#[inline]
fn shifted(mask: &BinaryMask, x: u32, y: u32, dx: i32, dy: i32) -> bool {
    let nx = x as i64 + dx as i64;
    let ny = y as i64 + dy as i64;
    if nx < 0 || ny < 0 || nx >= mask.width as i64 || ny >= mask.height as i64 {
        false
    } else {
        mask.get(nx as u32, ny as u32)
    }
}

/// Union of the mask translated by every element offset.
pub fn dilate(mask: &BinaryMask, se: &StructuringElement) -> BinaryMask {
    let mut out = BinaryMask::new(mask.width, mask.height, false).unwrap();
    for y in 0..mask.height {
        for x in 0..mask.width {
            if !mask.get(x, y) {
                continue;
            }
            for &(dx, dy) in &se.offsets {
                let nx = x as i64 + dx as i64;
                let ny = y as i64 + dy as i64;
                if nx >= 0 && ny >= 0 && nx < mask.width as i64 && ny < mask.height as i64 {
                    out.set(nx as u32, ny as u32, true);
                }
            }
        }
    }
    out
}

/// Pixels whose entire translated element lies on set mask pixels.
pub fn erode(mask: &BinaryMask, se: &StructuringElement) -> BinaryMask {
    let mut out = BinaryMask::new(mask.width, mask.height, false).unwrap();
    for y in 0..mask.height {
        'px: for x in 0..mask.width {
            for &(dx, dy) in &se.offsets {
                if !shifted(mask, x, y, dx, dy) {
                    continue 'px;
                }
            }
            out.set(x, y, true);
        }
    }
    out
}

/// Pointwise logical negation.
pub fn complement(mask: &BinaryMask) -> BinaryMask {
    BinaryMask {
        width: mask.width,
        height: mask.height,
        bits: mask.bits.iter().map(|&b| !b).collect(),
    }
}

fn check_same_size(a_w: u32, a_h: u32, b_w: u32, b_h: u32) -> Result<()> {
    if a_w != b_w || a_h != b_h {
        return Err(Error::SizeMismatch { a_w, a_h, b_w, b_h });
    }
    Ok(())
}

/// Morphological reconstruction of `mask` from `marker`.
///
/// The marker is first intersected with the mask; the result is the union of
/// the mask's 8-connected components that contain at least one marker pixel.
/// This is the fixpoint of repeatedly dilating the marker with the
/// 8-neighbor elementary element and intersecting with the mask.
pub fn reconstruct(marker: &BinaryMask, mask: &BinaryMask) -> Result<BinaryMask> {
    check_same_size(marker.width, marker.height, mask.width, mask.height)?;
    let mut out = BinaryMask::new(mask.width, mask.height, false).unwrap();
    let mut queue = VecDeque::new();
    for y in 0..mask.height {
        for x in 0..mask.width {
            if marker.get(x, y) && mask.get(x, y) {
                out.set(x, y, true);
                queue.push_back((x, y));
            }
        }
    }
    while let Some((x, y)) = queue.pop_front() {
        for &(dx, dy) in &NEIGHBORS_8 {
            let nx = x as i64 + dx as i64;
            let ny = y as i64 + dy as i64;
            if nx < 0 || ny < 0 || nx >= mask.width as i64 || ny >= mask.height as i64 {
                continue;
            }
            let (nx, ny) = (nx as u32, ny as u32);
            if mask.get(nx, ny) && !out.get(nx, ny) {
                out.set(nx, ny, true);
                queue.push_back((nx, ny));
            }
        }
    }
    Ok(out)
}

/// Removes every 8-connected component that touches the image border.
pub fn clear_border(mask: &BinaryMask) -> BinaryMask {
    let mut border = BinaryMask::new(mask.width, mask.height, false).unwrap();
    for x in 0..mask.width {
        border.set(x, 0, mask.get(x, 0));
        border.set(x, mask.height - 1, mask.get(x, mask.height - 1));
    }
    for y in 0..mask.height {
        border.set(0, y, mask.get(0, y));
        border.set(mask.width - 1, y, mask.get(mask.width - 1, y));
    }
    let touched = reconstruct(&border, mask).unwrap();
    BinaryMask {
        width: mask.width,
        height: mask.height,
        bits: mask
            .bits
            .iter()
            .zip(&touched.bits)
            .map(|(&m, &t)| m && !t)
            .collect(),
    }
}

/// Grayscale reconstruction of `mask` from `marker` under pointwise minimum.
///
/// The marker is first capped at the mask. Iterates 8-neighbor grayscale
/// dilation followed by pointwise minimum with the mask to the exact
/// fixpoint, implemented as alternating forward and backward raster sweeps
/// until no pixel changes.
pub fn reconstruct_gray(marker: &GrayImage, mask: &GrayImage) -> Result<GrayImage> {
    check_same_size(marker.width, marker.height, mask.width, mask.height)?;
    let w = mask.width as i64;
    let h = mask.height as i64;
    let mut m: Vec<u8> = marker
        .pixels
        .iter()
        .zip(&mask.pixels)
        .map(|(&a, &b)| a.min(b))
        .collect();
    let at = |buf: &[u8], x: i64, y: i64| -> u8 {
        if x < 0 || y < 0 || x >= w || y >= h {
            0
        } else {
            buf[(y * w + x) as usize]
        }
    };
    loop {
        let mut changed = false;
        for y in 0..h {
            for x in 0..w {
                let i = (y * w + x) as usize;
                let mut best = m[i];
                for (dx, dy) in [(-1i64, 0i64), (-1, -1), (0, -1), (1, -1)] {
                    best = best.max(at(&m, x + dx, y + dy));
                }
                let v = best.min(mask.pixels[i]);
                if v != m[i] {
                    m[i] = v;
                    changed = true;
                }
            }
        }
        for y in (0..h).rev() {
            for x in (0..w).rev() {
                let i = (y * w + x) as usize;
                let mut best = m[i];
                for (dx, dy) in [(1i64, 0i64), (1, 1), (0, 1), (-1, 1)] {
                    best = best.max(at(&m, x + dx, y + dy));
                }
                let v = best.min(mask.pixels[i]);
                if v != m[i] {
                    m[i] = v;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    GrayImage::from_pixels(mask.width, mask.height, m)
}

/// Marks 8-connected plateaus with no strictly brighter neighbor.
///
/// Computed as `image - reconstruct_gray(image - 1, image) > 0`, the unit
/// h-maxima transform.
pub fn regional_maxima(image: &GrayImage) -> BinaryMask {
    let marker = GrayImage {
        width: image.width,
        height: image.height,
        pixels: image.pixels.iter().map(|&p| p.saturating_sub(1)).collect(),
    };
    let rec = reconstruct_gray(&marker, image).unwrap();
    BinaryMask {
        width: image.width,
        height: image.height,
        bits: image
            .pixels
            .iter()
            .zip(&rec.pixels)
            .map(|(&v, &r)| v > r)
            .collect(),
    }
}
