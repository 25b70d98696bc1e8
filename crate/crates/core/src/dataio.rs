//! Reading and writing the artifacts around the pipeline: images on disk,
//! dataset manifests, and feature CSV files.

use crate::error::{Error, Result};
use crate::featureextract::{FeatureVector, FEATURE_NAMES};
use crate::img::{decode_pgm, encode_pgm, GrayImage};
use crate::mlp::ExpressionLabel;
use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

/// Load a PGM image from disk.
pub fn read_image(path: &Path) -> Result<GrayImage> {
    decode_pgm(&fs::read(path)?)
}

/// Write an image to disk as binary PGM.
pub fn write_image(path: &Path, image: &GrayImage) -> Result<()> {
    fs::write(path, encode_pgm(image))?;
    Ok(())
}

/// Expression encoded in a dataset file name.
///
/// Names follow the `SUBJECT.EXPR#.NUMBER.pgm` convention: the expression
/// is the first two letters of the second dot-separated token, case
/// insensitive. `KA.AN1.39.pgm` reads as angry.
pub fn label_from_filename(name: &str) -> Option<ExpressionLabel> {
    let file_name = Path::new(name).file_name()?.to_str()?;
    let token = file_name.split('.').nth(1)?;
    let code: String = token.chars().take(2).flat_map(|c| c.to_uppercase()).collect();
    match code.as_str() {
        "AN" => Some(ExpressionLabel::Angry),
        "DI" => Some(ExpressionLabel::Disgust),
        "FE" => Some(ExpressionLabel::Fear),
        "HA" => Some(ExpressionLabel::Happy),
        "NE" => Some(ExpressionLabel::Neutral),
        "SA" => Some(ExpressionLabel::Sad),
        "SU" => Some(ExpressionLabel::Surprise),
        _ => None,
    }
}

/// One image of a labeled dataset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub path: PathBuf,
    pub label: ExpressionLabel,
}

/// Read a `path,label` manifest.
///
/// The label cell may be left empty when the file name already encodes the
/// expression. Relative paths are taken relative to the manifest's own
/// directory, so a manifest can travel with its images.
pub fn load_manifest(path: &Path) -> Result<Vec<ManifestEntry>> {
    let text = fs::read_to_string(path)?;
    let base = path.parent().unwrap_or(Path::new(""));
    let mut lines = text.lines().enumerate();

    match lines.next() {
        Some((_, header)) if header.trim() == "path,label" => {}
        Some((_, header)) => {
            return Err(Error::ManifestRow {
                line: 1,
                reason: format!("expected header 'path,label', found '{}'", header.trim()),
            })
        }
        None => {
            return Err(Error::ManifestRow {
                line: 1,
                reason: "empty manifest".to_string(),
            })
        }
    }

    let mut entries = Vec::new();
    let mut seen = HashSet::new();
    for (idx, raw) in lines {
        let line_no = idx + 1;
        let row = raw.trim();
        if row.is_empty() {
            continue;
        }
        let cells: Vec<&str> = row.split(',').collect();
        if cells.len() != 2 {
            return Err(Error::ManifestRow {
                line: line_no,
                reason: format!("expected 2 cells, found {}", cells.len()),
            });
        }
        let (path_cell, label_cell) = (cells[0].trim(), cells[1].trim());
        if path_cell.is_empty() {
            return Err(Error::ManifestRow {
                line: line_no,
                reason: "empty path".to_string(),
            });
        }
        if !seen.insert(path_cell.to_string()) {
            return Err(Error::ManifestDuplicate {
                line: line_no,
                path: path_cell.to_string(),
            });
        }
        let label = if label_cell.is_empty() {
            label_from_filename(path_cell).ok_or_else(|| Error::ManifestLabel {
                line: line_no,
                token: path_cell.to_string(),
            })?
        } else {
            label_cell.parse().map_err(|_| Error::ManifestLabel {
                line: line_no,
                token: label_cell.to_string(),
            })?
        };
        let full = if Path::new(path_cell).is_absolute() {
            PathBuf::from(path_cell)
        } else {
            base.join(path_cell)
        };
        entries.push(ManifestEntry { path: full, label });
    }
    Ok(entries)
}

/// Write feature vectors as CSV, one row per sample, with the trailing
/// label cell left empty for unlabeled rows.
pub fn write_features(
    path: &Path,
    rows: &[(FeatureVector, Option<ExpressionLabel>)],
) -> Result<()> {
    let mut out = String::new();
    out.push_str(&FEATURE_NAMES.join(","));
    out.push_str(",label\n");
    for (vector, label) in rows {
        let cells: Vec<String> = vector.0.iter().map(|v| format!("{v:.16e}")).collect();
        out.push_str(&cells.join(","));
        out.push(',');
        if let Some(label) = label {
            out.push_str(label.name());
        }
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

/// Read a feature CSV written by [`write_features`]. A file without the
/// label column is accepted; its rows come back unlabeled.
pub fn read_features(path: &Path) -> Result<Vec<(FeatureVector, Option<ExpressionLabel>)>> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();

    let bare_header = FEATURE_NAMES.join(",");
    let labeled_header = format!("{bare_header},label");
    let has_label_column = match lines.next() {
        Some((_, header)) if header.trim() == labeled_header => true,
        Some((_, header)) if header.trim() == bare_header => false,
        Some((_, header)) => {
            return Err(Error::FeatureFile {
                line: 1,
                reason: format!("unrecognized header '{}'", header.trim()),
            })
        }
        None => {
            return Err(Error::FeatureFile {
                line: 1,
                reason: "empty file".to_string(),
            })
        }
    };

    let expected = FEATURE_NAMES.len() + usize::from(has_label_column);
    let mut rows = Vec::new();
    for (idx, raw) in lines {
        let line_no = idx + 1;
        let row = raw.trim();
        if row.is_empty() {
            continue;
        }
        let cells: Vec<&str> = row.split(',').collect();
        if cells.len() != expected {
            return Err(Error::FeatureFile {
                line: line_no,
                reason: format!("expected {expected} cells, found {}", cells.len()),
            });
        }
        let mut vector = [0.0; 15];
        for (slot, cell) in vector.iter_mut().zip(&cells) {
            *slot = cell.trim().parse().map_err(|e| Error::FeatureFile {
                line: line_no,
                reason: format!("bad value '{}': {e}", cell.trim()),
            })?;
        }
        let label = if has_label_column {
            let cell = cells[15].trim();
            if cell.is_empty() {
                None
            } else {
                Some(cell.parse().map_err(|_| Error::FeatureFile {
                    line: line_no,
                    reason: format!("unknown label '{cell}'"),
                })?)
            }
        } else {
            None
        };
        rows.push((FeatureVector(vector), label));
    }
    Ok(rows)
}
