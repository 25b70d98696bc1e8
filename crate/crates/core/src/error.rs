//! Crate-wide error and result types.

use thiserror::Error;

/// Any failure produced by this crate.
#[derive(Debug, Error)]
pub enum Error {
    /// PGM header is not well formed (bad magic, missing fields, junk tokens).
    #[error("malformed PGM header at byte {offset}: {reason}")]
    PgmHeader { offset: usize, reason: String },

    /// PGM payload ended before `width * height` samples were read.
    #[error("truncated PGM payload at byte {offset}: expected {expected} samples, got {actual}")]
    PgmTruncated {
        offset: usize,
        expected: usize,
        actual: usize,
    },

    /// PGM maxval is outside the supported 1..=255 range.
    #[error("unsupported PGM maxval {maxval} at byte {offset} (this reader handles 8-bit images)")]
    PgmMaxval { offset: usize, maxval: u32 },

    /// A sample in a plain-text PGM raster could not be parsed or is out of range.
    #[error("bad PGM sample at byte {offset}: {reason}")]
    PgmSample { offset: usize, reason: String },

    /// An image with a zero dimension was requested or supplied.
    #[error("image dimensions must be nonzero (got {width}x{height})")]
    ZeroDimension { width: u32, height: u32 },

    /// A crop box does not lie fully inside the source image.
    #[error("crop box {x},{y} {w}x{h} exceeds image bounds {img_w}x{img_h}")]
    CropOutOfBounds {
        x: u32,
        y: u32,
        w: u32,
        h: u32,
        img_w: u32,
        img_h: u32,
    },

    /// The equalization tile grid does not fit the image.
    #[error("tile grid {tiles_x}x{tiles_y} does not fit a {width}x{height} image")]
    TileGrid {
        tiles_x: u32,
        tiles_y: u32,
        width: u32,
        height: u32,
    },

    /// Two images that must agree in size do not.
    #[error("size mismatch: {a_w}x{a_h} vs {b_w}x{b_h}")]
    SizeMismatch {
        a_w: u32,
        a_h: u32,
        b_w: u32,
        b_h: u32,
    },

    /// Face localization produced an empty mask.
    #[error("no face found")]
    NoFaceFound,

    /// A face region did not resolve to exactly two segments.
    #[error("feature count in {region} region: expected 2 segments, found {found}")]
    FeatureCount { region: String, found: usize },

    /// A numeric input was NaN or infinite where a finite value is required.
    #[error("non-finite input: {context}")]
    NonFinite { context: String },

    /// A tuning parameter is outside its documented domain.
    #[error("invalid parameter: {context}")]
    Param { context: String },

    /// An operation that needs data was given none.
    #[error("empty input: {context}")]
    EmptyInput { context: String },

    /// A vector or matrix had the wrong length for the model it was used with.
    #[error("dimension mismatch: {context}")]
    DimensionMismatch { context: String },

    /// Model file carries an unknown magic line or version.
    #[error("unrecognized model file version: {found:?}")]
    ModelVersion { found: String },

    /// Model file structure disagrees with its declared layer dimensions.
    #[error("model file shape error at line {line}: {reason}")]
    ModelShape { line: usize, reason: String },

    /// Model file contains a token that does not parse as a finite number.
    #[error("model file parse error at line {line}: {reason}")]
    ModelParse { line: usize, reason: String },

    /// A manifest row does not have exactly two columns.
    #[error("malformed manifest row at line {line}: {reason}")]
    ManifestRow { line: usize, reason: String },

    /// A manifest lists the same image path twice.
    #[error("duplicate manifest path at line {line}: {path}")]
    ManifestDuplicate { line: usize, path: String },

    /// A manifest label token is not one of the seven known labels.
    #[error("unknown label {token:?} at line {line}")]
    ManifestLabel { line: usize, token: String },

    /// A feature file header or row is not in the expected form.
    #[error("feature file error at line {line}: {reason}")]
    FeatureFile { line: usize, reason: String },

    /// Underlying I/O failure.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
