//! From an edge map of a face crop to six feature boxes and a vector.
//!
//! The edge mask is split into connected components, tiny ones are dropped,
//! and the survivors are sorted into three windows: upper-left (left
//! eyebrow and eye), upper-right (right eyebrow and eye) and lower (nose
//! and mouth). Components inside a window are merged until exactly two
//! remain, those two become the region's feature boxes, and the twelve box
//! extents plus three pairwise distances form the feature vector.

use crate::error::{Error, Result};
use crate::img::{BBox, BinaryMask, GrayImage};
use crate::susan::{edge_mask, susan_edge_strength, SusanParams};
use std::collections::VecDeque;

/// Which window a segment was assigned to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    UpperLeft,
    UpperRight,
    Lower,
}

impl Region {
    fn name(self) -> &'static str {
        match self {
            Region::UpperLeft => "upper-left",
            Region::UpperRight => "upper-right",
            Region::Lower => "lower",
        }
    }
}

/// A connected component of the edge mask.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub bbox: BBox,
    /// Number of set pixels, which shrinks relative to the box as
    /// components merge.
    pub area: usize,
    /// Window assignment, `None` until partitioned.
    pub region: Option<Region>,
}

/// An axis-aligned rectangle in coordinates normalized to `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormRect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl NormRect {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        NormRect { x0, y0, x1, y1 }
    }

    fn contains_box(&self, bbox: &BBox, w: u32, h: u32) -> bool {
        let (w, h) = (w as f64, h as f64);
        let bx0 = bbox.x as f64 / w;
        let bx1 = bbox.right() as f64 / w;
        let by0 = bbox.y as f64 / h;
        let by1 = bbox.bottom() as f64 / h;
        self.x0 <= bx0 && bx1 <= self.x1 && self.y0 <= by0 && by1 <= self.y1
    }
}

/// The three search windows, normalized to the crop extent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionWindows {
    pub upper_left: NormRect,
    pub upper_right: NormRect,
    pub lower: NormRect,
}

impl Default for RegionWindows {
    fn default() -> Self {
        RegionWindows {
            upper_left: NormRect::new(0.05, 0.15, 0.45, 0.55),
            upper_right: NormRect::new(0.55, 0.15, 0.95, 0.55),
            lower: NormRect::new(0.25, 0.50, 0.75, 0.95),
        }
    }
}

/// Projection used when deciding that two segments overlap and belong to
/// one feature. Stacked strokes of one feature line up in x, so that is
/// the default; the y reading is kept for experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OverlapAxis {
    #[default]
    X,
    Y,
}

/// Tuning knobs for feature extraction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtractParams {
    /// Components with fewer set pixels than this are discarded as noise.
    pub min_area: usize,
    pub windows: RegionWindows,
    /// Edge strengths must exceed this to enter the mask.
    pub edge_threshold: f64,
    /// Run the median cleanup pass on the edge mask.
    pub despeckle: bool,
    /// Divide the feature vector by the crop diagonal.
    pub normalize: bool,
    /// Projection for the overlap merge phase.
    pub overlap_axis: OverlapAxis,
}

impl Default for ExtractParams {
    fn default() -> Self {
        ExtractParams {
            min_area: 1,
            windows: RegionWindows::default(),
            edge_threshold: 0.0,
            despeckle: true,
            normalize: true,
            overlap_axis: OverlapAxis::X,
        }
    }
}

impl ExtractParams {
    /// Defaults with the noise floor scaled to the crop: half a pixel per
    /// thousand, never below one.
    pub fn for_crop(width: u32, height: u32) -> Self {
        let area = (width as f64) * (height as f64);
        ExtractParams {
            min_area: ((0.0005 * area).round() as usize).max(1),
            ..ExtractParams::default()
        }
    }
}

/// Connected components of `mask` under 8-connectivity, in the order their
/// first pixel appears in a raster scan.
pub fn label_components(mask: &BinaryMask) -> Vec<Segment> {
    let w = mask.width as i64;
    let h = mask.height as i64;
    let mut seen = vec![false; (w * h) as usize];
    let mut out = Vec::new();
    let mut queue = VecDeque::new();
    for y in 0..h {
        for x in 0..w {
            let idx = (y * w + x) as usize;
            if seen[idx] || !mask.get(x as u32, y as u32) {
                continue;
            }
            seen[idx] = true;
            queue.push_back((x, y));
            let (mut x0, mut y0, mut x1, mut y1) = (x, y, x, y);
            let mut area = 0usize;
            while let Some((cx, cy)) = queue.pop_front() {
                area += 1;
                x0 = x0.min(cx);
                y0 = y0.min(cy);
                x1 = x1.max(cx);
                y1 = y1.max(cy);
                for dy in -1..=1 {
                    for dx in -1..=1 {
                        if dx == 0 && dy == 0 {
                            continue;
                        }
                        let nx = cx + dx;
                        let ny = cy + dy;
                        if nx < 0 || ny < 0 || nx >= w || ny >= h {
                            continue;
                        }
                        let nidx = (ny * w + nx) as usize;
                        if !seen[nidx] && mask.get(nx as u32, ny as u32) {
                            seen[nidx] = true;
                            queue.push_back((nx, ny));
                        }
                    }
                }
            }
            out.push(Segment {
                bbox: BBox::new(x0 as u32, y0 as u32, (x1 - x0 + 1) as u32, (y1 - y0 + 1) as u32),
                area,
                region: None,
            });
        }
    }
    out
}

/// Drop segments with fewer than `min_area` pixels.
pub fn remove_small(segments: Vec<Segment>, min_area: usize) -> Vec<Segment> {
    segments.into_iter().filter(|s| s.area >= min_area).collect()
}

/// Sort segments into the three windows.
///
/// The box center picks the candidate window: above the crop midline goes
/// left or right of the vertical midline, at or below goes to the lower
/// window. A segment whose whole box does not fit inside its candidate
/// window is discarded, which is what removes hair, jaw and border clutter.
pub fn partition_regions(
    segments: &[Segment],
    crop_w: u32,
    crop_h: u32,
    windows: &RegionWindows,
) -> (Vec<Segment>, Vec<Segment>, Vec<Segment>) {
    let midx = crop_w as f64 / 2.0;
    let midy = crop_h as f64 / 2.0;
    let mut upper_left = Vec::new();
    let mut upper_right = Vec::new();
    let mut lower = Vec::new();
    for seg in segments {
        let (cx, cy) = seg.bbox.center();
        let (region, window) = if cy < midy {
            if cx < midx {
                (Region::UpperLeft, &windows.upper_left)
            } else {
                (Region::UpperRight, &windows.upper_right)
            }
        } else {
            (Region::Lower, &windows.lower)
        };
        if !window.contains_box(&seg.bbox, crop_w, crop_h) {
            continue;
        }
        let mut seg = *seg;
        seg.region = Some(region);
        match region {
            Region::UpperLeft => upper_left.push(seg),
            Region::UpperRight => upper_right.push(seg),
            Region::Lower => lower.push(seg),
        }
    }
    (upper_left, upper_right, lower)
}

fn overlaps(a: &BBox, b: &BBox, axis: OverlapAxis) -> bool {
    match axis {
        OverlapAxis::X => a.x < b.right() && b.x < a.right(),
        OverlapAxis::Y => a.y < b.bottom() && b.y < a.bottom(),
    }
}

fn merge_pair(a: &Segment, b: &Segment) -> Segment {
    Segment {
        bbox: a.bbox.union(&b.bbox),
        area: a.area + b.area,
        region: a.region,
    }
}

/// Merge a window's segments down to at most two.
///
/// Each round first collapses every group of segments whose boxes overlap
/// in x (transitively) into one. Only when that leaves the list unchanged
/// does it fall back to merging the pair with the closest box centers,
/// breaking ties toward the smaller combined area and then the smaller
/// union-box center. With more than two segments, one of the steps always
/// reduces the count, so the loop terminates; with two or fewer the input
/// comes back untouched.
pub fn merge_to_two(segments: Vec<Segment>) -> Vec<Segment> {
    merge_to_two_along(segments, OverlapAxis::X)
}

/// `merge_to_two` with a chosen overlap projection.
pub fn merge_to_two_along(mut segments: Vec<Segment>, axis: OverlapAxis) -> Vec<Segment> {
    while segments.len() > 2 {
        let merged = merge_overlapping_bands(&segments, axis);
        if merged.len() < segments.len() {
            segments = merged;
            continue;
        }
        segments = merge_nearest_pair(segments);
    }
    segments
}

fn merge_overlapping_bands(segments: &[Segment], axis: OverlapAxis) -> Vec<Segment> {
    let n = segments.len();
    let mut group = (0..n).collect::<Vec<_>>();
    fn find(group: &mut Vec<usize>, i: usize) -> usize {
        if group[i] != i {
            let root = find(group, group[i]);
            group[i] = root;
            root
        } else {
            i
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if overlaps(&segments[i].bbox, &segments[j].bbox, axis) {
                let (a, b) = (find(&mut group, i), find(&mut group, j));
                if a != b {
                    group[b.max(a)] = b.min(a);
                }
            }
        }
    }
    // Emit one segment per group, ordered by each group's first member.
    let mut out: Vec<Option<Segment>> = vec![None; n];
    for (i, seg) in segments.iter().enumerate() {
        let root = find(&mut group, i);
        out[root] = Some(match out[root].take() {
            Some(acc) => merge_pair(&acc, seg),
            None => *seg,
        });
    }
    out.into_iter().flatten().collect()
}

/// Tie-break key for the closest-pair search: squared center distance,
/// combined area, then the union's center.
type PairKey = (f64, usize, f64, f64);

fn merge_nearest_pair(mut segments: Vec<Segment>) -> Vec<Segment> {
    let mut best: Option<(usize, usize, PairKey)> = None;
    for i in 0..segments.len() {
        for j in (i + 1)..segments.len() {
            let (ax, ay) = segments[i].bbox.center();
            let (bx, by) = segments[j].bbox.center();
            let d2 = (ax - bx) * (ax - bx) + (ay - by) * (ay - by);
            let union = segments[i].bbox.union(&segments[j].bbox);
            let (ux, uy) = union.center();
            let key = (d2, segments[i].area + segments[j].area, ux, uy);
            let better = match &best {
                None => true,
                Some((_, _, k)) => key < *k,
            };
            if better {
                best = Some((i, j, key));
            }
        }
    }
    if let Some((i, j, _)) = best {
        segments[i] = merge_pair(&segments[i], &segments[j]);
        segments.remove(j);
    }
    segments
}

/// The six located feature boxes, in crop coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FacialFeatures {
    pub left_eyebrow: BBox,
    pub left_eye: BBox,
    pub right_eyebrow: BBox,
    pub right_eye: BBox,
    pub nose: BBox,
    pub mouth: BBox,
    pub crop_w: u32,
    pub crop_h: u32,
}

/// Pick the two features out of each window.
///
/// Within a window the upper segment (smaller center y, then the flatter
/// box on a tie) is the eyebrow or nose, the other is the eye or mouth.
/// Any window without exactly two segments is a failed extraction.
pub fn assign_features(
    upper_left: &[Segment],
    upper_right: &[Segment],
    lower: &[Segment],
    crop_w: u32,
    crop_h: u32,
) -> Result<FacialFeatures> {
    fn take_pair(segments: &[Segment], region: Region) -> Result<(BBox, BBox)> {
        if segments.len() != 2 {
            return Err(Error::FeatureCount {
                region: region.name().to_string(),
                found: segments.len(),
            });
        }
        let key = |s: &Segment| {
            let (cx, cy) = s.bbox.center();
            (cy, s.bbox.h, s.bbox.y, cx)
        };
        let (a, b) = (&segments[0], &segments[1]);
        if key(a) <= key(b) {
            Ok((a.bbox, b.bbox))
        } else {
            Ok((b.bbox, a.bbox))
        }
    }
    let (left_eyebrow, left_eye) = take_pair(upper_left, Region::UpperLeft)?;
    let (right_eyebrow, right_eye) = take_pair(upper_right, Region::UpperRight)?;
    let (nose, mouth) = take_pair(lower, Region::Lower)?;
    Ok(FacialFeatures {
        left_eyebrow,
        left_eye,
        right_eyebrow,
        right_eye,
        nose,
        mouth,
        crop_w,
        crop_h,
    })
}

/// Column names for the vector entries, in order.
pub const FEATURE_NAMES: [&str; 15] = [
    "h1", "w1", "h2", "w2", "h3", "w3", "h4", "w4", "hn", "wn", "hm", "wm", "d1", "d2", "d3",
];

/// The numeric description of a face: heights and widths of the six boxes
/// (left eyebrow, left eye, right eyebrow, right eye, nose, mouth) followed
/// by the eyebrow-to-eye center distances on each side and the nose-to-mouth
/// center distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureVector(pub [f64; 15]);

impl FeatureVector {
    pub fn as_slice(&self) -> &[f64; 15] {
        &self.0
    }
}

fn center_dist(a: &BBox, b: &BBox) -> f64 {
    let (ax, ay) = a.center();
    let (bx, by) = b.center();
    ((ax - bx) * (ax - bx) + (ay - by) * (ay - by)).sqrt()
}

/// Flatten the boxes into the 15-entry vector. With `normalize` set, every
/// entry is divided by the crop diagonal so the description is independent
/// of the crop scale.
pub fn feature_vector(features: &FacialFeatures, normalize: bool) -> FeatureVector {
    let f = features;
    let raw = [
        f.left_eyebrow.h as f64,
        f.left_eyebrow.w as f64,
        f.left_eye.h as f64,
        f.left_eye.w as f64,
        f.right_eyebrow.h as f64,
        f.right_eyebrow.w as f64,
        f.right_eye.h as f64,
        f.right_eye.w as f64,
        f.nose.h as f64,
        f.nose.w as f64,
        f.mouth.h as f64,
        f.mouth.w as f64,
        center_dist(&f.left_eyebrow, &f.left_eye),
        center_dist(&f.right_eyebrow, &f.right_eye),
        center_dist(&f.nose, &f.mouth),
    ];
    let scale = if normalize {
        let (w, h) = (f.crop_w as f64, f.crop_h as f64);
        (w * w + h * h).sqrt()
    } else {
        1.0
    };
    let mut v = [0.0; 15];
    for (out, r) in v.iter_mut().zip(raw) {
        *out = r / scale;
    }
    FeatureVector(v)
}

/// Run the whole chain on a face crop: edge response, mask, components,
/// window partition, merge, assignment, vector.
pub fn extract(
    crop: &GrayImage,
    susan: &SusanParams,
    params: &ExtractParams,
) -> Result<(FacialFeatures, FeatureVector)> {
    let edges = susan_edge_strength(crop, susan)?;
    let mask = edge_mask(&edges, params.edge_threshold, params.despeckle);
    let segments = remove_small(label_components(&mask), params.min_area);
    let (ul, ur, low) = partition_regions(&segments, crop.width, crop.height, &params.windows);
    let features = assign_features(
        &merge_to_two_along(ul, params.overlap_axis),
        &merge_to_two_along(ur, params.overlap_axis),
        &merge_to_two_along(low, params.overlap_axis),
        crop.width,
        crop.height,
    )?;
    let vector = feature_vector(&features, params.normalize);
    Ok((features, vector))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn seg(x: u32, y: u32, w: u32, h: u32, area: usize) -> Segment {
        Segment {
            bbox: BBox::new(x, y, w, h),
            area,
            region: None,
        }
    }

    #[test]
    fn labels_components_with_diagonal_links() {
        let mut mask = BinaryMask::new(8, 5, false).unwrap();
        // An L shape, a diagonal pair, and a lone pixel.
        for y in 0..3 {
            mask.set(0, y, true);
        }
        mask.set(1, 2, true);
        mask.set(4, 1, true);
        mask.set(5, 2, true);
        mask.set(7, 4, true);
        let segs = label_components(&mask);
        assert_eq!(segs.len(), 3);
        assert_eq!(segs[0].bbox, BBox::new(0, 0, 2, 3));
        assert_eq!(segs[0].area, 4);
        assert_eq!(segs[1].bbox, BBox::new(4, 1, 2, 2));
        assert_eq!(segs[1].area, 2);
        assert_eq!(segs[2].bbox, BBox::new(7, 4, 1, 1));
        assert_eq!(segs[2].area, 1);
    }

    #[test]
    fn discovery_order_is_raster_order() {
        let mut mask = BinaryMask::new(6, 4, false).unwrap();
        mask.set(5, 0, true);
        mask.set(0, 2, true);
        mask.set(2, 2, true);
        let segs = label_components(&mask);
        let xs: Vec<u32> = segs.iter().map(|s| s.bbox.x).collect();
        assert_eq!(xs, vec![5, 0, 2]);
    }

    #[test]
    fn small_segment_filter_keeps_boundary_area() {
        let segs = vec![seg(0, 0, 2, 2, 3), seg(5, 5, 2, 2, 4), seg(9, 9, 1, 1, 5)];
        let kept = remove_small(segs, 4);
        assert_eq!(kept.len(), 2);
        assert!(kept.iter().all(|s| s.area >= 4));
    }

    #[test]
    fn partition_routes_by_center_and_window() {
        let windows = RegionWindows::default();
        // 100x100 crop. One box per window, comfortably inside.
        let segs = vec![
            seg(10, 20, 20, 10, 50),  // center (20, 25): upper left
            seg(60, 20, 20, 10, 50),  // center (70, 25): upper right
            seg(40, 60, 20, 10, 50),  // center (50, 65): lower
            seg(2, 2, 10, 10, 50),    // upper left center but outside window
            seg(30, 45, 40, 20, 50),  // center (50, 55): lower, but spills above 0.50
        ];
        let (ul, ur, low) = partition_regions(&segs, 100, 100, &windows);
        assert_eq!(ul.len(), 1);
        assert_eq!(ul[0].region, Some(Region::UpperLeft));
        assert_eq!(ur.len(), 1);
        assert_eq!(low.len(), 1);
        assert_eq!(low[0].bbox.x, 40);
    }

    #[test]
    fn partition_midline_center_goes_lower() {
        let windows = RegionWindows {
            lower: NormRect::new(0.0, 0.0, 1.0, 1.0),
            ..RegionWindows::default()
        };
        // Center y exactly at the midline.
        let segs = vec![seg(40, 45, 20, 10, 10)];
        let (ul, ur, low) = partition_regions(&segs, 100, 100, &windows);
        assert!(ul.is_empty() && ur.is_empty());
        assert_eq!(low.len(), 1);
    }

    #[test]
    fn window_containment_is_inclusive_at_edges() {
        let windows = RegionWindows::default();
        // Exactly the upper-left window of a 100x100 crop: [5,45]x[15,55]...
        // but a box touching y=55 has center y 35 < 50, so it stays upper.
        let segs = vec![seg(5, 15, 40, 30, 10)];
        let (ul, _, _) = partition_regions(&segs, 100, 100, &windows);
        assert_eq!(ul.len(), 1);
    }

    #[test]
    fn column_overlap_merge_is_transitive() {
        // Three boxes chained by x overlap collapse in one pass.
        let segs = vec![
            seg(0, 0, 5, 2, 4),
            seg(4, 10, 5, 2, 4),
            seg(8, 20, 5, 2, 4),
        ];
        let merged = merge_to_two(segs);
        assert_eq!(merged.len(), 1);
        assert_eq!(merged[0].bbox, BBox::new(0, 0, 13, 22));
        assert_eq!(merged[0].area, 12);
    }

    #[test]
    fn touching_columns_do_not_overlap() {
        // [0,5) and [5,10): adjacent but disjoint, so the nearest-pair rule
        // decides. Three boxes, the left two closest.
        let segs = vec![
            seg(0, 0, 5, 2, 4),
            seg(5, 0, 5, 2, 4),
            seg(20, 0, 5, 2, 4),
        ];
        let merged = merge_to_two(segs);
        assert_eq!(merged.len(), 2);
        assert_eq!(merged[0].bbox, BBox::new(0, 0, 10, 2));
        assert_eq!(merged[1].bbox, BBox::new(20, 0, 5, 2));
    }

    #[test]
    fn row_projection_merges_side_by_side_boxes() {
        // The same three boxes merge differently under the y reading:
        // all share rows 0..2, so one pass collapses them all.
        let segs = vec![
            seg(0, 0, 5, 2, 4),
            seg(5, 0, 5, 2, 4),
            seg(20, 0, 5, 2, 4),
        ];
        let merged = merge_to_two_along(segs, OverlapAxis::Y);
        assert_eq!(merged.len(), 1);
        assert_eq!(merged[0].bbox, BBox::new(0, 0, 25, 2));
    }

    #[test]
    fn nearest_pair_tie_prefers_smaller_area() {
        // Middle box equidistant from both ends; the right pair is lighter.
        let segs = vec![
            seg(0, 0, 4, 4, 40),
            seg(10, 0, 4, 4, 30),
            seg(20, 0, 4, 4, 5),
        ];
        let merged = merge_to_two(segs);
        assert_eq!(merged.len(), 2);
        assert_eq!(merged[0].bbox, BBox::new(0, 0, 4, 4));
        assert_eq!(merged[1].bbox, BBox::new(10, 0, 14, 4));
        assert_eq!(merged[1].area, 35);
    }

    #[test]
    fn two_or_fewer_segments_pass_through() {
        let segs = vec![seg(0, 0, 3, 3, 5), seg(10, 10, 3, 3, 5)];
        assert_eq!(merge_to_two(segs.clone()), segs);
        assert!(merge_to_two(Vec::new()).is_empty());
    }

    // A differently structured implementation of the same merge rules,
    // used to cross-check the fast path on random inputs.
    fn merge_oracle(mut segs: Vec<Segment>) -> Vec<Segment> {
        while segs.len() > 2 {
            // Closure over x overlap via neighbor search from each seed.
            let n = segs.len();
            let mut assigned = vec![usize::MAX; n];
            let mut groups: Vec<Vec<usize>> = Vec::new();
            for i in 0..n {
                if assigned[i] != usize::MAX {
                    continue;
                }
                let g = groups.len();
                let mut stack = vec![i];
                assigned[i] = g;
                let mut members = vec![i];
                while let Some(a) = stack.pop() {
                    for b in 0..n {
                        if assigned[b] == usize::MAX
                            && overlaps(&segs[a].bbox, &segs[b].bbox, OverlapAxis::X)
                        {
                            assigned[b] = g;
                            stack.push(b);
                            members.push(b);
                        }
                    }
                }
                members.sort_unstable();
                groups.push(members);
            }
            groups.sort_by_key(|g| g[0]);
            if groups.len() < n {
                segs = groups
                    .into_iter()
                    .map(|members| {
                        let mut it = members.into_iter().map(|i| segs[i]);
                        let first = it.next().unwrap();
                        it.fold(first, |acc, s| merge_pair(&acc, &s))
                    })
                    .collect();
                continue;
            }
            let mut pairs: Vec<(usize, usize)> = Vec::new();
            for i in 0..n {
                for j in (i + 1)..n {
                    pairs.push((i, j));
                }
            }
            let key = |&(i, j): &(usize, usize)| {
                let (ax, ay) = segs[i].bbox.center();
                let (bx, by) = segs[j].bbox.center();
                let union = segs[i].bbox.union(&segs[j].bbox);
                let (ux, uy) = union.center();
                (
                    (ax - bx) * (ax - bx) + (ay - by) * (ay - by),
                    segs[i].area + segs[j].area,
                    ux,
                    uy,
                )
            };
            let (i, j) = *pairs
                .iter()
                .min_by(|a, b| key(a).partial_cmp(&key(b)).unwrap())
                .unwrap();
            segs[i] = merge_pair(&segs[i], &segs[j]);
            segs.remove(j);
        }
        segs
    }

    proptest! {
        #[test]
        fn merge_matches_oracle(
            boxes in prop::collection::vec((0u32..40, 0u32..40, 1u32..12, 1u32..12, 1usize..50), 0..8)
        ) {
            let segs: Vec<Segment> = boxes
                .into_iter()
                .map(|(x, y, w, h, a)| seg(x, y, w, h, a))
                .collect();
            let fast = merge_to_two(segs.clone());
            let slow = merge_oracle(segs.clone());
            prop_assert_eq!(&fast, &slow);
            if segs.len() > 2 {
                prop_assert!(fast.len() <= 2 && !fast.is_empty());
            } else {
                prop_assert_eq!(&fast, &segs);
            }
            if !segs.is_empty() {
                let total: usize = segs.iter().map(|s| s.area).sum();
                prop_assert_eq!(fast.iter().map(|s| s.area).sum::<usize>(), total);
                let union_in = segs.iter().skip(1).fold(segs[0].bbox, |acc, s| acc.union(&s.bbox));
                let union_out = fast.iter().skip(1).fold(fast[0].bbox, |acc, s| acc.union(&s.bbox));
                prop_assert_eq!(union_in, union_out);
            }
        }
    }

    #[test]
    fn assignment_orders_by_vertical_center() {
        let ul = vec![seg(10, 30, 20, 10, 9), seg(12, 12, 18, 6, 9)];
        let ur = vec![seg(60, 12, 18, 6, 9), seg(60, 30, 20, 10, 9)];
        let low = vec![seg(45, 70, 20, 10, 9), seg(40, 50, 12, 12, 9)];
        let f = assign_features(&ul, &ur, &low, 100, 100).unwrap();
        assert_eq!(f.left_eyebrow, BBox::new(12, 12, 18, 6));
        assert_eq!(f.left_eye, BBox::new(10, 30, 20, 10));
        assert_eq!(f.right_eyebrow, BBox::new(60, 12, 18, 6));
        assert_eq!(f.nose, BBox::new(40, 50, 12, 12));
        assert_eq!(f.mouth, BBox::new(45, 70, 20, 10));
        assert_eq!((f.crop_w, f.crop_h), (100, 100));
    }

    #[test]
    fn assignment_tie_on_center_picks_flatter_box() {
        // Same center y: the 4-tall box wins the eyebrow slot over the
        // 8-tall one.
        let ul = vec![seg(10, 20, 20, 8, 9), seg(32, 22, 20, 4, 9)];
        let ur = vec![seg(60, 12, 18, 6, 9), seg(60, 30, 20, 10, 9)];
        let low = vec![seg(40, 50, 12, 12, 9), seg(45, 70, 20, 10, 9)];
        let f = assign_features(&ul, &ur, &low, 100, 100).unwrap();
        assert_eq!(f.left_eyebrow, BBox::new(32, 22, 20, 4));
    }

    #[test]
    fn wrong_segment_count_names_the_region() {
        let two = vec![seg(10, 10, 5, 5, 9), seg(10, 30, 5, 5, 9)];
        let three = vec![
            seg(40, 50, 5, 5, 9),
            seg(40, 60, 5, 5, 9),
            seg(40, 70, 5, 5, 9),
        ];
        let err = assign_features(&two, &two, &three, 100, 100).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("lower"), "message was: {msg}");
        assert!(msg.contains('3'), "message was: {msg}");
        let err = assign_features(&[], &two, &two, 100, 100).unwrap_err();
        assert!(err.to_string().contains("upper-left"));
    }

    #[test]
    fn vector_layout_and_normalization() {
        // Crop 120x160 gives a diagonal of exactly 200.
        let f = FacialFeatures {
            left_eyebrow: BBox::new(20, 40, 30, 8),
            left_eye: BBox::new(21, 60, 28, 12),
            right_eyebrow: BBox::new(70, 40, 30, 8),
            right_eye: BBox::new(71, 60, 28, 12),
            nose: BBox::new(50, 90, 20, 18),
            mouth: BBox::new(40, 120, 40, 12),
            crop_w: 120,
            crop_h: 160,
        };
        let v = feature_vector(&f, true).0;
        // Eyebrow center (35, 44), eye center (35, 66): distance 22.
        assert_eq!(v[0], 8.0 / 200.0);
        assert_eq!(v[1], 30.0 / 200.0);
        assert_eq!(v[2], 12.0 / 200.0);
        assert_eq!(v[3], 28.0 / 200.0);
        assert_eq!(v[12], 22.0 / 200.0);
        assert_eq!(v[13], 22.0 / 200.0);
        // Nose center (60, 99), mouth center (60, 126): distance 27.
        assert_eq!(v[14], 27.0 / 200.0);
        let raw = feature_vector(&f, false).0;
        assert_eq!(raw[12], 22.0);
        assert_eq!(raw[0], 8.0);
        assert_eq!(FEATURE_NAMES[12], "d1");
        assert_eq!(FEATURE_NAMES.len(), 15);
    }

    #[test]
    fn extracts_six_drawn_features_exactly() {
        // Six dark rectangles on a mid-gray crop, two per window. The edge
        // detector rings each rectangle one pixel outside its border, so
        // every recovered box is the drawn box grown by one on all sides.
        let mut img = GrayImage::new(114, 138, 160).unwrap();
        let boxes = [
            (17u32, 34u32, 26u32, 12u32), // left eyebrow
            (16, 56, 24, 12),             // left eye
            (71, 34, 26, 12),             // right eyebrow
            (73, 56, 24, 12),             // right eye
            (47, 76, 20, 18),             // nose
            (37, 104, 40, 12),            // mouth
        ];
        for &(x, y, w, h) in &boxes {
            for yy in y..y + h {
                for xx in x..x + w {
                    img.set(xx, yy, 30);
                }
            }
        }
        let params = ExtractParams::for_crop(114, 138);
        assert_eq!(params.min_area, 8);
        let (f, v) = extract(&img, &SusanParams::default(), &params).unwrap();
        let grown = |i: usize| {
            let (x, y, w, h) = boxes[i];
            BBox::new(x - 1, y - 1, w + 2, h + 2)
        };
        assert_eq!(f.left_eyebrow, grown(0));
        assert_eq!(f.left_eye, grown(1));
        assert_eq!(f.right_eyebrow, grown(2));
        assert_eq!(f.right_eye, grown(3));
        assert_eq!(f.nose, grown(4));
        assert_eq!(f.mouth, grown(5));
        assert!(v.0.iter().all(|&e| e > 0.0 && e < 1.0));
    }

    #[test]
    fn blank_crop_reports_missing_features() {
        let img = GrayImage::new(64, 64, 200).unwrap();
        let err = extract(&img, &SusanParams::default(), &ExtractParams::default()).unwrap_err();
        assert!(matches!(err, Error::FeatureCount { found: 0, .. }));
    }

    #[test]
    fn doubling_the_crop_changes_entries_under_five_percent() {
        // Bilinear resampling smears each edge over a couple of pixels, so
        // recovered rings wobble by at most two pixels per side. With every
        // rectangle at least 20 pixels tall that wobble stays below 5% of
        // any vector entry.
        let mut img = GrayImage::new(260, 320, 200).unwrap();
        let boxes = [
            (40u32, 70u32, 50u32, 20u32),
            (42, 120, 46, 22),
            (170, 70, 50, 20),
            (172, 120, 46, 22),
            (115, 170, 30, 40),
            (95, 240, 70, 24),
        ];
        for &(x, y, w, h) in &boxes {
            for yy in y..y + h {
                for xx in x..x + w {
                    img.set(xx, yy, 40);
                }
            }
        }
        let susan = SusanParams::default();
        let (_, base) = extract(&img, &susan, &ExtractParams::for_crop(260, 320)).unwrap();
        let doubled = crate::img::resize_bilinear(&img, 520, 640).unwrap();
        let (_, big) = extract(&doubled, &susan, &ExtractParams::for_crop(520, 640)).unwrap();
        for (i, (a, b)) in base.0.iter().zip(big.0).enumerate() {
            let rel = (a - b).abs() / a;
            assert!(rel < 0.05, "entry {i}: {a:.5} vs {b:.5} ({rel:.4} off)");
        }
    }
}
