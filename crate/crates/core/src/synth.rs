//! Deterministic schematic face images for tests and demos.
//!
//! Each face is a gray ellipse on a white field with six dark rectangles
//! for eyebrows, eyes, nose and mouth. The expression moves and resizes
//! the rectangles the way real expressions move real features: raised
//! eyebrows, a stretched or dropped mouth, a lengthened nose shadow. A
//! seeded jitter keeps samples of one class from being pixel-identical
//! without ever letting two classes collide.
//!
//! Geometry invariants the rest of the pipeline leans on:
//! - every rectangle sits deep enough inside the ellipse that its edge
//!   ring never touches the ellipse boundary ring;
//! - rectangles never come close enough for their edge rings to touch,
//!   so the edge map yields exactly two components per search window;
//! - rectangles are large enough that the ring around one overlaps the
//!   drawn rectangle at IoU well above 0.7 after 2x enlargement;
//! - for every pair of expressions at least one vector entry has disjoint
//!   ranges across all jitter, which keeps the classes separable.

use crate::img::{BBox, GrayImage};
use crate::mlp::ExpressionLabel;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Side length of generated images.
pub const SYNTH_IMAGE_SIZE: u32 = 200;

const BACKGROUND: u8 = 255;
const FACE_VALUE: u8 = 160;
const BLOB_VALUE: u8 = 30;

// Face ellipse half-extents; the support box is 121 x 157.
const SEMI_X: i64 = 60;
const SEMI_Y: i64 = 78;

// Feature rectangles relative to the face box corner: x, y, w, h.
const L_BROW: (i64, i64, i64, i64) = (24, 40, 26, 11);
const L_EYE: (i64, i64, i64, i64) = (25, 57, 24, 12);
const R_BROW: (i64, i64, i64, i64) = (71, 40, 26, 11);
const R_EYE: (i64, i64, i64, i64) = (72, 57, 24, 12);
const NOSE: (i64, i64, i64, i64) = (52, 82, 16, 18);
const MOUTH: (i64, i64, i64, i64) = (42, 106, 36, 12);

/// A generated face with its ground truth.
#[derive(Debug, Clone)]
pub struct SynthFace {
    pub image: GrayImage,
    /// Bounding box of the face ellipse.
    pub face_box: BBox,
    /// Left eyebrow, left eye, right eyebrow, right eye, nose, mouth.
    pub feature_boxes: [BBox; 6],
    pub label: ExpressionLabel,
}

// How an expression displaces the base rectangles.
#[derive(Default)]
struct Deltas {
    brow_dy: i64,
    eye_dh: i64,
    nose_dh: i64,
    mouth_dx: i64,
    mouth_dy: i64,
    mouth_dw: i64,
    mouth_dh: i64,
}

fn deltas_for(label: ExpressionLabel) -> Deltas {
    match label {
        ExpressionLabel::Neutral => Deltas::default(),
        ExpressionLabel::Surprise => Deltas {
            brow_dy: -10,
            eye_dh: 2,
            mouth_dh: 8,
            ..Deltas::default()
        },
        ExpressionLabel::Fear => Deltas {
            brow_dy: -10,
            eye_dh: 2,
            mouth_dx: 2,
            mouth_dw: -4,
            ..Deltas::default()
        },
        ExpressionLabel::Happy => Deltas {
            mouth_dx: -4,
            mouth_dw: 8,
            mouth_dh: 2,
            ..Deltas::default()
        },
        ExpressionLabel::Sad => Deltas {
            mouth_dx: 4,
            mouth_dw: -8,
            ..Deltas::default()
        },
        ExpressionLabel::Angry => Deltas {
            mouth_dx: 2,
            mouth_dw: -4,
            mouth_dh: 6,
            ..Deltas::default()
        },
        ExpressionLabel::Disgust => Deltas {
            nose_dh: 6,
            mouth_dy: 6,
            ..Deltas::default()
        },
    }
}

/// Generate one face. The seed fixes all jitter, so the same label and
/// seed always produce the same image.
pub fn synth_face(label: ExpressionLabel, seed: u64) -> SynthFace {
    synth_face_shifted(label, seed, 0, 0)
}

/// Generate one face translated by whole pixels. The jitter stream does
/// not depend on the shift, so the shifted image is the unshifted one
/// moved verbatim.
pub fn synth_face_shifted(label: ExpressionLabel, seed: u64, dx: i32, dy: i32) -> SynthFace {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half = SYNTH_IMAGE_SIZE as i64 / 2;
    let cx = half + rng.random_range(-2..=2) + dx as i64;
    let cy = half + rng.random_range(-2..=2) + dy as i64;

    let d = deltas_for(label);
    let base = [
        (L_BROW.0, L_BROW.1 + d.brow_dy, L_BROW.2, L_BROW.3),
        (L_EYE.0, L_EYE.1, L_EYE.2, L_EYE.3 + d.eye_dh),
        (R_BROW.0, R_BROW.1 + d.brow_dy, R_BROW.2, R_BROW.3),
        (R_EYE.0, R_EYE.1, R_EYE.2, R_EYE.3 + d.eye_dh),
        (NOSE.0, NOSE.1, NOSE.2, NOSE.3 + d.nose_dh),
        (
            MOUTH.0 + d.mouth_dx,
            MOUTH.1 + d.mouth_dy,
            MOUTH.2 + d.mouth_dw,
            MOUTH.3 + d.mouth_dh,
        ),
    ];

    let face_x = cx - SEMI_X;
    let face_y = cy - SEMI_Y;
    let mut boxes = [BBox::new(0, 0, 1, 1); 6];
    for (slot, (bx, by, bw, bh)) in boxes.iter_mut().zip(base) {
        let jx = rng.random_range(-1..=1);
        let jy = rng.random_range(-1..=1);
        let jw = rng.random_range(-1..=1);
        let jh = rng.random_range(-1..=1);
        *slot = BBox::new(
            (face_x + bx + jx) as u32,
            (face_y + by + jy) as u32,
            (bw + jw) as u32,
            (bh + jh) as u32,
        );
    }

    let mut image = GrayImage::new(SYNTH_IMAGE_SIZE, SYNTH_IMAGE_SIZE, BACKGROUND).unwrap();
    for y in 0..SYNTH_IMAGE_SIZE as i64 {
        for x in 0..SYNTH_IMAGE_SIZE as i64 {
            let ex = (x - cx) as f64 / SEMI_X as f64;
            let ey = (y - cy) as f64 / SEMI_Y as f64;
            if ex * ex + ey * ey <= 1.0 {
                image.set(x as u32, y as u32, FACE_VALUE);
            }
        }
    }
    for b in &boxes {
        for y in b.y..b.bottom() {
            for x in b.x..b.right() {
                image.set(x, y, BLOB_VALUE);
            }
        }
    }

    SynthFace {
        image,
        face_box: BBox::new(
            face_x as u32,
            face_y as u32,
            (2 * SEMI_X + 1) as u32,
            (2 * SEMI_Y + 1) as u32,
        ),
        feature_boxes: boxes,
        label,
    }
}
