//! 8-bit grayscale raster, binary mask, box geometry, and PGM reading/writing.
//!
//! Images are row-major with `(0, 0)` at the top-left corner. The PGM reader
//! accepts both the binary (`P5`) and plain-text (`P2`) variants with
//! `maxval <= 255`; the writer always emits binary `P5` with maxval 255.

use crate::error::{Error, Result};

/// Row-major 8-bit grayscale image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    pub width: u32,
    pub height: u32,
    pub pixels: Vec<u8>,
}

impl GrayImage {
    /// Creates an image filled with `fill`.
    pub fn new(width: u32, height: u32, fill: u8) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::ZeroDimension { width, height });
        }
        Ok(GrayImage {
            width,
            height,
            pixels: vec![fill; width as usize * height as usize],
        })
    }

    /// Wraps an existing pixel buffer; `pixels.len()` must equal `width * height`.
    pub fn from_pixels(width: u32, height: u32, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::ZeroDimension { width, height });
        }
        if pixels.len() != width as usize * height as usize {
            return Err(Error::DimensionMismatch {
                context: format!(
                    "pixel buffer holds {} samples, {}x{} needs {}",
                    pixels.len(),
                    width,
                    height,
                    width as usize * height as usize
                ),
            });
        }
        Ok(GrayImage {
            width,
            height,
            pixels,
        })
    }

    #[inline]
    pub fn idx(&self, x: u32, y: u32) -> usize {
        debug_assert!(x < self.width && y < self.height);
        y as usize * self.width as usize + x as usize
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> u8 {
        self.pixels[self.idx(x, y)]
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, v: u8) {
        let i = self.idx(x, y);
        self.pixels[i] = v;
    }
}

/// Row-major boolean mask with the same layout as [`GrayImage`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    pub width: u32,
    pub height: u32,
    pub bits: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: u32, height: u32, fill: bool) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::ZeroDimension { width, height });
        }
        Ok(BinaryMask {
            width,
            height,
            bits: vec![fill; width as usize * height as usize],
        })
    }

    #[inline]
    pub fn idx(&self, x: u32, y: u32) -> usize {
        debug_assert!(x < self.width && y < self.height);
        y as usize * self.width as usize + x as usize
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> bool {
        self.bits[self.idx(x, y)]
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, v: bool) {
        let i = self.idx(x, y);
        self.bits[i] = v;
    }

    /// Number of set pixels.
    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// True when no pixel is set.
    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }
}

/// Axis-aligned box: top-left corner plus strictly positive extent, in pixels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BBox {
    pub x: u32,
    pub y: u32,
    pub w: u32,
    pub h: u32,
}

impl BBox {
    pub fn new(x: u32, y: u32, w: u32, h: u32) -> Self {
        BBox { x, y, w, h }
    }

    /// One past the rightmost column.
    #[inline]
    pub fn right(&self) -> u32 {
        self.x + self.w
    }

    /// One past the bottom row.
    #[inline]
    pub fn bottom(&self) -> u32 {
        self.y + self.h
    }

    /// Box center in continuous pixel coordinates.
    pub fn center(&self) -> (f64, f64) {
        (
            self.x as f64 + self.w as f64 / 2.0,
            self.y as f64 + self.h as f64 / 2.0,
        )
    }

    /// Smallest box covering both operands.
    pub fn union(&self, other: &BBox) -> BBox {
        let x0 = self.x.min(other.x);
        let y0 = self.y.min(other.y);
        let x1 = self.right().max(other.right());
        let y1 = self.bottom().max(other.bottom());
        BBox::new(x0, y0, x1 - x0, y1 - y0)
    }

    /// Intersection-over-union; 0.0 when the boxes are disjoint.
    pub fn iou(&self, other: &BBox) -> f64 {
        let ix0 = self.x.max(other.x);
        let iy0 = self.y.max(other.y);
        let ix1 = self.right().min(other.right());
        let iy1 = self.bottom().min(other.bottom());
        if ix1 <= ix0 || iy1 <= iy0 {
            return 0.0;
        }
        let inter = (ix1 - ix0) as f64 * (iy1 - iy0) as f64;
        let a = self.w as f64 * self.h as f64;
        let b = other.w as f64 * other.h as f64;
        inter / (a + b - inter)
    }
}

const MAGIC_BINARY: u8 = b'5';
const MAGIC_PLAIN: u8 = b'2';

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Cursor { bytes, pos: 0 }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let b = self.peek();
        if b.is_some() {
            self.pos += 1;
        }
        b
    }

    /// Skips whitespace runs and `#` comments (comment runs to end of line).
    fn skip_space_and_comments(&mut self) {
        loop {
            match self.peek() {
                Some(b) if b.is_ascii_whitespace() => {
                    self.pos += 1;
                }
                Some(b'#') => {
                    while let Some(b) = self.bump() {
                        if b == b'\n' {
                            break;
                        }
                    }
                }
                _ => return,
            }
        }
    }

    /// Reads one unsigned decimal token, reporting its starting byte offset.
    fn read_number(&mut self, what: &str) -> Result<(u32, usize)> {
        self.skip_space_and_comments();
        let start = self.pos;
        let mut value: u64 = 0;
        let mut digits = 0;
        while let Some(b) = self.peek() {
            if b.is_ascii_digit() {
                value = value * 10 + u64::from(b - b'0');
                if value > u64::from(u32::MAX) {
                    return Err(Error::PgmHeader {
                        offset: start,
                        reason: format!("{what} value overflows"),
                    });
                }
                digits += 1;
                self.pos += 1;
            } else {
                break;
            }
        }
        if digits == 0 {
            return Err(Error::PgmHeader {
                offset: start,
                reason: format!("expected {what}"),
            });
        }
        Ok((value as u32, start))
    }
}

/// Parses a PGM byte stream (`P5` binary or `P2` plain, maxval up to 255).
///
/// Sample values are taken verbatim; images with maxval below 255 are not
/// rescaled. Errors carry the byte offset of the offending input.
pub fn decode_pgm(bytes: &[u8]) -> Result<GrayImage> {
    let mut cur = Cursor::new(bytes);
    if cur.bump() != Some(b'P') {
        return Err(Error::PgmHeader {
            offset: 0,
            reason: "missing P magic".into(),
        });
    }
    let kind = match cur.bump() {
        Some(k @ (MAGIC_BINARY | MAGIC_PLAIN)) => k,
        other => {
            return Err(Error::PgmHeader {
                offset: 1,
                reason: format!("unsupported PGM variant {:?}", other.map(char::from)),
            });
        }
    };
    let (width, w_off) = cur.read_number("width")?;
    let (height, h_off) = cur.read_number("height")?;
    let (maxval, m_off) = cur.read_number("maxval")?;
    if width == 0 || height == 0 {
        return Err(Error::PgmHeader {
            offset: w_off.min(h_off),
            reason: format!("zero dimension {width}x{height}"),
        });
    }
    if maxval == 0 || maxval > 255 {
        return Err(Error::PgmMaxval {
            offset: m_off,
            maxval,
        });
    }
    let expected = width as usize * height as usize;

    if kind == MAGIC_BINARY {
        // A single whitespace byte separates the header from the raster.
        cur.skip_space_and_comments_before_raster()?;
        let start = cur.pos;
        let available = bytes.len().saturating_sub(start);
        if available < expected {
            return Err(Error::PgmTruncated {
                offset: bytes.len(),
                expected,
                actual: available,
            });
        }
        let mut pixels = bytes[start..start + expected].to_vec();
        if maxval < 255 {
            for p in &mut pixels {
                if u32::from(*p) > maxval {
                    return Err(Error::PgmSample {
                        offset: start,
                        reason: format!("sample {} exceeds maxval {}", p, maxval),
                    });
                }
            }
        }
        GrayImage::from_pixels(width, height, pixels)
    } else {
        let mut pixels = Vec::with_capacity(expected);
        while pixels.len() < expected {
            cur.skip_space_and_comments();
            if cur.peek().is_none() {
                return Err(Error::PgmTruncated {
                    offset: cur.pos,
                    expected,
                    actual: pixels.len(),
                });
            }
            let (v, off) = match cur.read_number("sample") {
                Ok(t) => t,
                Err(Error::PgmHeader { offset, .. }) => {
                    return Err(Error::PgmSample {
                        offset,
                        reason: "not a decimal sample".into(),
                    });
                }
                Err(e) => return Err(e),
            };
            if v > maxval {
                return Err(Error::PgmSample {
                    offset: off,
                    reason: format!("sample {v} exceeds maxval {maxval}"),
                });
            }
            pixels.push(v as u8);
        }
        GrayImage::from_pixels(width, height, pixels)
    }
}

impl<'a> Cursor<'a> {
    /// After the maxval token: skip comment lines, then consume exactly one
    /// whitespace byte so the raster can begin.
    fn skip_space_and_comments_before_raster(&mut self) -> Result<()> {
        while self.peek() == Some(b'#') {
            while let Some(b) = self.bump() {
                if b == b'\n' {
                    break;
                }
            }
        }
        match self.bump() {
            Some(b) if b.is_ascii_whitespace() => Ok(()),
            _ => Err(Error::PgmHeader {
                offset: self.pos.saturating_sub(1),
                reason: "expected single whitespace before binary raster".into(),
            }),
        }
    }
}

/// Serializes an image as binary PGM: `P5\n{w} {h}\n255\n` followed by the raster.
pub fn encode_pgm(image: &GrayImage) -> Vec<u8> {
    let header = format!("P5\n{} {}\n255\n", image.width, image.height);
    let mut out = Vec::with_capacity(header.len() + image.pixels.len());
    out.extend_from_slice(header.as_bytes());
    out.extend_from_slice(&image.pixels);
    out
}

/// Copies the axis-aligned subimage described by `bbox`.
pub fn crop(image: &GrayImage, bbox: &BBox) -> Result<GrayImage> {
    if bbox.w == 0 || bbox.h == 0 {
        return Err(Error::ZeroDimension {
            width: bbox.w,
            height: bbox.h,
        });
    }
    if bbox.right() > image.width || bbox.bottom() > image.height {
        return Err(Error::CropOutOfBounds {
            x: bbox.x,
            y: bbox.y,
            w: bbox.w,
            h: bbox.h,
            img_w: image.width,
            img_h: image.height,
        });
    }
    let mut pixels = Vec::with_capacity(bbox.w as usize * bbox.h as usize);
    for y in bbox.y..bbox.bottom() {
        let row = image.idx(bbox.x, y);
        pixels.extend_from_slice(&image.pixels[row..row + bbox.w as usize]);
    }
    GrayImage::from_pixels(bbox.w, bbox.h, pixels)
}

#[inline]
fn round_half_up(v: f64) -> u8 {
    ((v + 0.5).floor()).clamp(0.0, 255.0) as u8
}

/// Resamples `image` to `new_w` x `new_h` with corner-aligned bilinear
/// interpolation; ties round upward.
///
/// Output pixel `i` along an axis of `n` samples reads source position
/// `i * (m - 1) / (n - 1)`; a single-sample output axis reads position 0.
/// Resizing to the original dimensions returns an identical copy.
pub fn resize_bilinear(image: &GrayImage, new_w: u32, new_h: u32) -> Result<GrayImage> {
    if new_w == 0 || new_h == 0 {
        return Err(Error::ZeroDimension {
            width: new_w,
            height: new_h,
        });
    }
    if new_w == image.width && new_h == image.height {
        return Ok(image.clone());
    }
    let sx = if new_w > 1 {
        (image.width as f64 - 1.0) / (new_w as f64 - 1.0)
    } else {
        0.0
    };
    let sy = if new_h > 1 {
        (image.height as f64 - 1.0) / (new_h as f64 - 1.0)
    } else {
        0.0
    };
    let mut out = GrayImage::new(new_w, new_h, 0)?;
    for oy in 0..new_h {
        let fy = oy as f64 * sy;
        let y0 = fy.floor() as u32;
        let y1 = (y0 + 1).min(image.height - 1);
        let dy = fy - y0 as f64;
        for ox in 0..new_w {
            let fx = ox as f64 * sx;
            let x0 = fx.floor() as u32;
            let x1 = (x0 + 1).min(image.width - 1);
            let dx = fx - x0 as f64;
            let v00 = image.get(x0, y0) as f64;
            let v10 = image.get(x1, y0) as f64;
            let v01 = image.get(x0, y1) as f64;
            let v11 = image.get(x1, y1) as f64;
            let top = v00 + (v10 - v00) * dx;
            let bot = v01 + (v11 - v01) * dx;
            out.set(ox, oy, round_half_up(top + (bot - top) * dy));
        }
    }
    Ok(out)
}
