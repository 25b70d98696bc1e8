//! Facial expression recognition for grayscale portraits.
//!
//! The crate is a pipeline of small, independently testable stages:
//!
//! 1. [`img`]: PGM decoding/encoding, cropping, bilinear resizing.
//! 2. [`preprocess`]: contrast-limited adaptive histogram equalization.
//! 3. [`morphology`]: binary and grayscale morphology with disk elements.
//! 4. [`facelocalize`]: Otsu thresholding plus a morphological chain that
//!    finds the face box in a portrait.
//! 5. [`susan`]: nonlinear circular-mask edge response and edge masks.
//! 6. [`featureextract`]: edge segments to six facial feature boxes to a
//!    15-entry numeric feature vector.
//! 7. [`mlp`]: a small feed-forward network trained by online gradient
//!    descent, with a text model format.
//! 8. [`dataio`]: dataset manifests, filename label conventions, and the
//!    feature CSV format.
//! 9. [`synth`]: a deterministic schematic-face generator used for fixtures
//!    and demos.
//!
//! Stages communicate through plain data types (images, masks, boxes,
//! vectors), so each can be driven on its own.

pub mod error;
pub mod img;
pub mod dataio;
pub mod facelocalize;
pub mod featureextract;
pub mod mlp;
pub mod morphology;
pub mod preprocess;
pub mod susan;
pub mod synth;

pub use error::{Error, Result};
pub use img::{crop, decode_pgm, encode_pgm, resize_bilinear, BBox, BinaryMask, GrayImage};
pub use morphology::{
    clear_border, complement, dilate, disk_se, erode, reconstruct, reconstruct_gray,
    regional_maxima, StructuringElement,
};
pub use preprocess::{clahe, ClaheParams};
pub use dataio::{
    label_from_filename, load_manifest, read_features, read_image, write_features, write_image,
    ManifestEntry,
};
pub use facelocalize::{
    binarize, crop_and_enlarge, localize_enhanced, localize_face, otsu_threshold, LocalizeParams,
    Polarity, Threshold,
};
pub use featureextract::{
    assign_features, extract, feature_vector, label_components, merge_to_two, merge_to_two_along,
    partition_regions, remove_small, ExtractParams, FacialFeatures, FeatureVector, NormRect,
    OverlapAxis, Region, RegionWindows, Segment, FEATURE_NAMES,
};
pub use mlp::{
    backprop_epoch, forward, init_model, load_model, predict, save_model, train, ExpressionLabel,
    MlpModel, TrainConfig, TrainReport,
};
pub use susan::{edge_mask, susan_edge_strength, usan_area, EdgeStrengthImage, SusanParams};
pub use synth::{synth_face, synth_face_shifted, SynthFace, SYNTH_IMAGE_SIZE};
