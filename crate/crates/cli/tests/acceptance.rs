//! End-to-end acceptance checks. Each test pins one externally visible
//! guarantee of the pipeline, from gradient math up to the full
//! train-and-evaluate workflow through the compiled binary, against an
//! oracle implemented independently in this file.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use fex::{
    backprop_epoch, clahe, clear_border, crop_and_enlarge, decode_pgm, dilate, disk_se,
    encode_pgm, erode, extract, forward, init_model, load_manifest, load_model, localize_face,
    read_features, reconstruct, save_model, susan_edge_strength, synth_face, synth_face_shifted,
    train, usan_area, write_features, write_image, BBox, BinaryMask, ClaheParams, ExpressionLabel,
    ExtractParams, FacialFeatures, FeatureVector, GrayImage, LocalizeParams, MlpModel,
    StructuringElement, SusanParams, TrainConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tempfile::TempDir;

// ---------------------------------------------------------------------
// gradient correctness

/// Network error the backward pass minimizes, recomputed from scratch.
fn net_error(model: &MlpModel, input: &[f64], label: ExpressionLabel) -> f64 {
    let output = forward(model, input).unwrap();
    output
        .iter()
        .enumerate()
        .map(|(k, &y)| {
            let t = if model.labels[k] == label { 1.0 } else { 0.0 };
            0.5 * (y - t) * (y - t)
        })
        .sum()
}

#[test]
fn gradients_match_central_finite_differences() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let eps = 1e-5;
    // Learning rate one and no momentum make the weight delta of a single
    // sample pass equal the gradient itself.
    let config = TrainConfig {
        learning_rate: 1.0,
        shuffle: false,
        momentum: 0.0,
        smoothing: 0.0,
        ..TrainConfig::default()
    };

    let mut worst: f64 = 0.0;
    for trial in 0..10u64 {
        let model = init_model(&[15, 15, 7, 7], &ExpressionLabel::ALL, 100 + trial).unwrap();
        let input: Vec<f64> = (0..15).map(|_| rng.random_range(0.05..0.95)).collect();
        let label = ExpressionLabel::ALL[rng.random_range(0..7)];

        let mut stepped = model.clone();
        backprop_epoch(&mut stepped, &[(input.clone(), label)], &config, 0).unwrap();

        let mut check = |analytic: f64, perturb: &dyn Fn(&mut MlpModel, f64)| {
            let mut plus = model.clone();
            perturb(&mut plus, eps);
            let mut minus = model.clone();
            perturb(&mut minus, -eps);
            let numeric =
                (net_error(&plus, &input, label) - net_error(&minus, &input, label)) / (2.0 * eps);
            let scale = analytic.abs().max(numeric.abs());
            if scale > 1e-10 {
                worst = worst.max((analytic - numeric).abs() / scale);
            }
        };

        for l in 0..model.weights.len() {
            for k in 0..model.weights[l].len() {
                let analytic = model.weights[l][k] - stepped.weights[l][k];
                check(analytic, &|m: &mut MlpModel, d: f64| m.weights[l][k] += d);
            }
            for k in 0..model.biases[l].len() {
                let analytic = model.biases[l][k] - stepped.biases[l][k];
                check(analytic, &|m: &mut MlpModel, d: f64| m.biases[l][k] += d);
            }
        }
    }

    println!("worst relative gradient error: {worst:.3e}");
    assert!(worst < 1e-4, "relative gradient error {worst:e} too large");
    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
}

// ---------------------------------------------------------------------
// morphology against literal set definitions

fn in_bounds(mask: &BinaryMask, x: i64, y: i64) -> bool {
    x >= 0 && y >= 0 && x < mask.width as i64 && y < mask.height as i64
}

fn oracle_dilate(mask: &BinaryMask, se: &StructuringElement) -> BinaryMask {
    let mut out = BinaryMask::new(mask.width, mask.height, false).unwrap();
    for y in 0..mask.height {
        for x in 0..mask.width {
            let hit = se.offsets.iter().any(|&(dx, dy)| {
                let (sx, sy) = (x as i64 - dx as i64, y as i64 - dy as i64);
                in_bounds(mask, sx, sy) && mask.get(sx as u32, sy as u32)
            });
            out.set(x, y, hit);
        }
    }
    out
}

fn oracle_erode(mask: &BinaryMask, se: &StructuringElement) -> BinaryMask {
    let mut out = BinaryMask::new(mask.width, mask.height, false).unwrap();
    for y in 0..mask.height {
        for x in 0..mask.width {
            let all = se.offsets.iter().all(|&(dx, dy)| {
                let (sx, sy) = (x as i64 + dx as i64, y as i64 + dy as i64);
                in_bounds(mask, sx, sy) && mask.get(sx as u32, sy as u32)
            });
            out.set(x, y, all);
        }
    }
    out
}

/// Reconstruction as the literal fixpoint of conditional dilation with the
/// full 3x3 element.
fn oracle_reconstruct(marker: &BinaryMask, mask: &BinaryMask) -> BinaryMask {
    let eight = StructuringElement {
        offsets: (-1..=1)
            .flat_map(|dy| (-1..=1).map(move |dx| (dx, dy)))
            .collect(),
    };
    let mut out = BinaryMask::new(mask.width, mask.height, false).unwrap();
    for i in 0..out.bits.len() {
        out.bits[i] = marker.bits[i] && mask.bits[i];
    }
    loop {
        let grown = oracle_dilate(&out, &eight);
        let mut next = out.clone();
        for i in 0..next.bits.len() {
            next.bits[i] = grown.bits[i] && mask.bits[i];
        }
        if next == out {
            return out;
        }
        out = next;
    }
}

fn oracle_clear_border(mask: &BinaryMask) -> BinaryMask {
    let mut seed = BinaryMask::new(mask.width, mask.height, false).unwrap();
    for y in 0..mask.height {
        for x in 0..mask.width {
            let edge = x == 0 || y == 0 || x == mask.width - 1 || y == mask.height - 1;
            seed.set(x, y, edge && mask.get(x, y));
        }
    }
    let touched = oracle_reconstruct(&seed, mask);
    let mut out = mask.clone();
    for i in 0..out.bits.len() {
        out.bits[i] = mask.bits[i] && !touched.bits[i];
    }
    out
}

fn random_mask(rng: &mut ChaCha8Rng, density: f64) -> BinaryMask {
    let mut mask = BinaryMask::new(16, 16, false).unwrap();
    for bit in &mut mask.bits {
        *bit = rng.random_bool(density);
    }
    mask
}

#[test]
fn morphology_agrees_with_brute_force_set_oracles() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let radii = [1.0, 1.5, 2.0, 2.5];

    for trial in 0..100 {
        let mask = random_mask(&mut rng, 0.35);
        let marker = random_mask(&mut rng, 0.08);
        let se = disk_se(radii[trial % radii.len()]);

        assert_eq!(dilate(&mask, &se), oracle_dilate(&mask, &se), "trial {trial}");
        assert_eq!(erode(&mask, &se), oracle_erode(&mask, &se), "trial {trial}");
        assert_eq!(
            reconstruct(&marker, &mask).unwrap(),
            oracle_reconstruct(&marker, &mask),
            "trial {trial}"
        );
        assert_eq!(
            clear_border(&mask),
            oracle_clear_border(&mask),
            "trial {trial}"
        );
    }

    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(5), "took {elapsed:?}");
}

// ---------------------------------------------------------------------
// edge detector fixtures

#[test]
fn edge_response_is_silent_on_flat_and_confined_at_a_step() {
    let started = Instant::now();
    let params = SusanParams::default();

    // Uniform brightness: nothing is an edge, not even at the borders
    // where the mask is clipped.
    let flat = GrayImage::new(20, 20, 80).unwrap();
    let edges = susan_edge_strength(&flat, &params).unwrap();
    for y in 0..20 {
        for x in 0..20 {
            assert_eq!(edges.get(x, y), 0.0, "flat image responded at ({x}, {y})");
        }
    }

    // A hard vertical step between columns 9 and 10. The brightness jump
    // dwarfs t, so only the two columns touching the step lose enough
    // similar area to respond.
    let mut step = GrayImage::new(20, 20, 60).unwrap();
    for y in 0..20 {
        for x in 10..20 {
            step.set(x, y, 180);
        }
    }
    let edges = susan_edge_strength(&step, &params).unwrap();
    for y in 0..20 {
        for x in 0..20 {
            let expect_edge = x == 9 || x == 10;
            assert_eq!(
                edges.get(x, y) > 0.0,
                expect_edge,
                "step response wrong at ({x}, {y}): {}",
                edges.get(x, y)
            );
        }
    }

    // Re-derive the similar-area sums and the thresholding rule from the
    // published formulas and compare against the implementation.
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut noisy = GrayImage::new(20, 20, 0).unwrap();
    for px in &mut noisy.pixels {
        *px = rng.random_range(0..=255u32) as u8;
    }
    let offsets = disk_se(params.mask_radius).offsets;
    for image in [&step, &noisy] {
        let edges = susan_edge_strength(image, &params).unwrap();
        for _ in 0..25 {
            let x = rng.random_range(0..20u32);
            let y = rng.random_range(0..20u32);
            let center = image.get(x, y) as f64;
            let mut area = 0.0;
            let mut visible = 0u32;
            for &(dx, dy) in &offsets {
                if dx == 0 && dy == 0 {
                    continue;
                }
                let (nx, ny) = (x as i64 + dx as i64, y as i64 + dy as i64);
                if nx < 0 || ny < 0 || nx >= 20 || ny >= 20 {
                    continue;
                }
                visible += 1;
                let diff = image.get(nx as u32, ny as u32) as f64 - center;
                area += (-(diff / params.brightness_t).powi(6)).exp();
            }
            let direct = usan_area(image, x, y, &params).unwrap();
            assert!(
                (direct - area).abs() <= 1e-12,
                "similar area at ({x}, {y}): {direct} vs {area}"
            );
            let expected = (params.geometric_fraction * visible as f64 - area).max(0.0);
            assert!(
                (edges.get(x, y) - expected).abs() <= 1e-12,
                "strength at ({x}, {y}): {} vs {expected}",
                edges.get(x, y)
            );
        }
    }

    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
}

// ---------------------------------------------------------------------
// contrast enhancement fixtures

/// Plain global histogram equalization from the textbook CDF formula.
fn global_he(image: &GrayImage) -> GrayImage {
    let mut hist = [0u32; 256];
    for &p in &image.pixels {
        hist[p as usize] += 1;
    }
    let total = image.pixels.len() as u32;
    let cdf_min = *hist.iter().find(|&&h| h > 0).unwrap();
    let mut lut = [0u8; 256];
    if total == cdf_min {
        for (v, slot) in lut.iter_mut().enumerate() {
            *slot = v as u8;
        }
    } else {
        let mut cum = 0u32;
        for v in 0..256 {
            cum += hist[v];
            if cum > cdf_min {
                let mapped = 255.0 * (cum - cdf_min) as f64 / (total - cdf_min) as f64;
                lut[v] = (mapped + 0.5).floor() as u8;
            }
        }
    }
    let pixels = image.pixels.iter().map(|&p| lut[p as usize]).collect();
    GrayImage::from_pixels(image.width, image.height, pixels).unwrap()
}

#[test]
fn equalizer_keeps_constants_and_reduces_to_global_equalization() {
    // Constant images map to themselves whatever the tiling.
    for (w, h, v) in [(16, 16, 77), (33, 17, 190), (8, 64, 0)] {
        let img = GrayImage::new(w, h, v).unwrap();
        assert_eq!(clahe(&img, &ClaheParams::default()).unwrap(), img);
    }

    // One tile and an unbounded clip is exactly global equalization.
    let pixels: Vec<u8> = (0..256).map(|i| if i % 4 == 0 { 50 } else { 200 }).collect();
    let two_level = GrayImage::from_pixels(16, 16, pixels).unwrap();
    let params = ClaheParams {
        tiles_x: 1,
        tiles_y: 1,
        clip_limit: f64::INFINITY,
    };
    assert_eq!(
        clahe(&two_level, &params).unwrap(),
        global_he(&two_level),
        "single unclipped tile diverged from global equalization"
    );
}

// ---------------------------------------------------------------------
// feature recovery on generated faces

fn run_pipeline(image: &GrayImage) -> (BBox, FacialFeatures) {
    let (enhanced, face_box) =
        localize_face(image, &LocalizeParams::default(), &ClaheParams::default()).unwrap();
    let crop = crop_and_enlarge(&enhanced, &face_box, 2.0).unwrap();
    let params = ExtractParams::for_crop(crop.width, crop.height);
    let (features, _) = extract(&crop, &SusanParams::default(), &params).unwrap();
    (face_box, features)
}

fn boxes_of(f: &FacialFeatures) -> [BBox; 6] {
    [
        f.left_eyebrow,
        f.left_eye,
        f.right_eyebrow,
        f.right_eye,
        f.nose,
        f.mouth,
    ]
}

/// Box corners in original image coordinates: the crop doubles the face
/// box, so crop pixels map back at half scale.
fn image_coords(face_box: BBox, b: BBox) -> [f64; 4] {
    [
        face_box.x as f64 + b.x as f64 / 2.0,
        face_box.y as f64 + b.y as f64 / 2.0,
        face_box.x as f64 + b.right() as f64 / 2.0,
        face_box.y as f64 + b.bottom() as f64 / 2.0,
    ]
}

#[test]
fn generated_faces_recover_ground_truth_boxes() {
    let started = Instant::now();
    let names = [
        "left eyebrow",
        "left eye",
        "right eyebrow",
        "right eye",
        "nose",
        "mouth",
    ];

    let mut min_iou: f64 = 1.0;
    for label in ExpressionLabel::ALL {
        for seed in 0..20 {
            let truth = synth_face(label, seed);
            let (face_box, features) = run_pipeline(&truth.image);
            for (name, (found, gt)) in names
                .iter()
                .zip(boxes_of(&features).iter().zip(truth.feature_boxes))
            {
                // Ground truth lives in image coordinates; the recovered
                // box in the doubled crop.
                let in_crop = BBox::new(
                    2 * (gt.x - face_box.x),
                    2 * (gt.y - face_box.y),
                    2 * gt.w,
                    2 * gt.h,
                );
                let iou = found.iou(&in_crop);
                assert!(
                    iou >= 0.7,
                    "{label} seed {seed}: {name} IoU {iou:.3} below 0.7"
                );
                min_iou = min_iou.min(iou);
            }
        }
    }
    println!("minimum IoU over 140 faces: {min_iou:.3}");

    // Translating the input shifts every recovered box by the same offset.
    for label in ExpressionLabel::ALL {
        let base = synth_face(label, 0);
        let (base_box, base_features) = run_pipeline(&base.image);
        for (dx, dy) in [(7i32, 5i32), (-6, 4)] {
            let moved = synth_face_shifted(label, 0, dx, dy);
            let (moved_box, moved_features) = run_pipeline(&moved.image);
            for (name, (b, m)) in names
                .iter()
                .zip(boxes_of(&base_features).iter().zip(boxes_of(&moved_features)))
            {
                let before = image_coords(base_box, *b);
                let after = image_coords(moved_box, m);
                let want = [dx as f64, dy as f64, dx as f64, dy as f64];
                for i in 0..4 {
                    let err = (after[i] - before[i] - want[i]).abs();
                    assert!(
                        err <= 1.0,
                        "{label} shift ({dx}, {dy}): {name} corner {i} moved {} instead of {}",
                        after[i] - before[i],
                        want[i]
                    );
                }
            }
        }
    }

    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(30), "took {elapsed:?}");
}

// ---------------------------------------------------------------------
// full workflow through the binary

fn fex_cmd() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fex"))
}

fn run_ok(cmd: &mut Command) -> Output {
    let out = cmd.output().expect("binary should spawn");
    assert!(
        out.status.success(),
        "command failed: {:?}\nstderr: {}",
        cmd,
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn accuracy_counts(stdout: &[u8]) -> (u64, u64) {
    let text = String::from_utf8_lossy(stdout);
    let line = text
        .lines()
        .find(|l| l.starts_with("accuracy:"))
        .unwrap_or_else(|| panic!("no accuracy line in:\n{text}"));
    let inner = line
        .split('(')
        .nth(1)
        .and_then(|s| s.strip_suffix(')'))
        .unwrap_or_else(|| panic!("unparseable accuracy line: {line}"));
    let mut parts = inner.split('/');
    let correct = parts.next().unwrap().parse().unwrap();
    let total = parts.next().unwrap().parse().unwrap();
    (correct, total)
}

/// Split the generated manifest into train and test halves that live next
/// to the images, so relative paths keep resolving.
fn split_manifest(corpus: &Path, train_n: usize) -> (PathBuf, PathBuf) {
    let text = fs::read_to_string(corpus.join("manifest.csv")).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    let rows: Vec<&str> = lines.collect();
    assert!(rows.len() > train_n, "not enough rows to split");

    let train = corpus.join("train.csv");
    let test = corpus.join("test.csv");
    fs::write(&train, format!("{header}\n{}\n", rows[..train_n].join("\n"))).unwrap();
    fs::write(&test, format!("{header}\n{}\n", rows[train_n..].join("\n"))).unwrap();
    (train, test)
}

#[test]
fn generated_corpus_trains_to_the_accuracy_floors() {
    let started = Instant::now();
    let dir = TempDir::new().unwrap();
    let corpus = dir.path().join("faces");

    run_ok(fex_cmd()
        .arg("gen-synthetic")
        .arg("--out-dir")
        .arg(&corpus)
        .args(["--count", "150", "--seed", "0"]));
    let (train_m, test_m) = split_manifest(&corpus, 120);

    let train_f = dir.path().join("train.csv");
    let test_f = dir.path().join("test.csv");
    run_ok(fex_cmd()
        .arg("extract")
        .arg("--manifest")
        .arg(&train_m)
        .arg("--out")
        .arg(&train_f));
    run_ok(fex_cmd()
        .arg("extract")
        .arg("--manifest")
        .arg(&test_m)
        .arg("--out")
        .arg(&test_f));
    assert_eq!(read_features(&train_f).unwrap().len(), 120);
    assert_eq!(read_features(&test_f).unwrap().len(), 30);

    let model = dir.path().join("model.txt");
    run_ok(fex_cmd()
        .arg("train")
        .arg("--features")
        .arg(&train_f)
        .arg("--model-out")
        .arg(&model)
        .args(["--seed", "1"]));

    let out = run_ok(fex_cmd()
        .arg("evaluate")
        .arg("--model")
        .arg(&model)
        .arg("--features")
        .arg(&train_f));
    let (correct, total) = accuracy_counts(&out.stdout);
    assert_eq!((correct, total), (120, 120), "training set not memorized");

    let out = run_ok(fex_cmd()
        .arg("evaluate")
        .arg("--model")
        .arg(&model)
        .arg("--features")
        .arg(&test_f));
    let (correct, total) = accuracy_counts(&out.stdout);
    assert_eq!(total, 30);
    assert!(
        correct as f64 / total as f64 >= 0.9,
        "held-out accuracy {correct}/{total} below 0.9"
    );
    println!("held-out accuracy: {correct}/{total}");

    // The same seed reproduces the exact model file.
    let again = dir.path().join("model2.txt");
    run_ok(fex_cmd()
        .arg("train")
        .arg("--features")
        .arg(&train_f)
        .arg("--model-out")
        .arg(&again)
        .args(["--seed", "1"]));
    assert_eq!(
        fs::read(&model).unwrap(),
        fs::read(&again).unwrap(),
        "same seed produced different model files"
    );

    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(120), "took {elapsed:?}");
}

// ---------------------------------------------------------------------
// determinism and lossless persistence

#[test]
fn training_is_deterministic_and_files_round_trip_losslessly() {
    let dir = TempDir::new().unwrap();

    // Identical configs walk to identical weights.
    let data: Vec<(Vec<f64>, ExpressionLabel)> = (0..21)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(500 + i);
            let row: Vec<f64> = (0..15).map(|_| rng.random_range(0.0..1.0)).collect();
            (row, ExpressionLabel::ALL[i as usize % 7])
        })
        .collect();
    let config = TrainConfig {
        max_epochs: 300,
        ..TrainConfig::default()
    };
    let mut first = init_model(&[15, 15, 7, 7], &ExpressionLabel::ALL, 9).unwrap();
    let report_a = train(&mut first, &data, &config).unwrap();
    let mut second = init_model(&[15, 15, 7, 7], &ExpressionLabel::ALL, 9).unwrap();
    let report_b = train(&mut second, &data, &config).unwrap();
    assert_eq!(first, second, "identical runs diverged");
    assert_eq!(report_a, report_b);

    // Model files: save, load, save again; values and bytes both survive.
    let path_a = dir.path().join("model-a.txt");
    let path_b = dir.path().join("model-b.txt");
    save_model(&first, &path_a).unwrap();
    let reloaded = load_model(&path_a).unwrap();
    assert_eq!(reloaded, first, "model changed across save/load");
    save_model(&reloaded, &path_b).unwrap();
    assert_eq!(fs::read(&path_a).unwrap(), fs::read(&path_b).unwrap());

    // Feature files, including awkward values and a missing label.
    let mut gnarly = [0.0f64; 15];
    for (i, v) in gnarly.iter_mut().enumerate() {
        *v = match i % 5 {
            0 => 0.0,
            1 => 1.0 / 3.0,
            2 => 1e-17,
            3 => 0.999_999_999_999_999_9,
            _ => 0.25 + i as f64 * 1e-13,
        };
    }
    let rows = vec![
        (FeatureVector(gnarly), Some(ExpressionLabel::Fear)),
        (FeatureVector([0.5; 15]), None),
    ];
    let feats_a = dir.path().join("rows-a.csv");
    let feats_b = dir.path().join("rows-b.csv");
    write_features(&feats_a, &rows).unwrap();
    let read_back = read_features(&feats_a).unwrap();
    assert_eq!(read_back.len(), rows.len());
    for ((va, la), (vb, lb)) in rows.iter().zip(&read_back) {
        assert_eq!(la, lb);
        for (x, y) in va.0.iter().zip(&vb.0) {
            assert_eq!(x.to_bits(), y.to_bits(), "feature value drifted: {x} vs {y}");
        }
    }
    write_features(&feats_b, &read_back).unwrap();
    assert_eq!(fs::read(&feats_a).unwrap(), fs::read(&feats_b).unwrap());

    // Images: binary PGM survives a write/read cycle bit for bit, and the
    // plain-text variant decodes to the same pixels.
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut image = GrayImage::new(31, 22, 0).unwrap();
    for px in &mut image.pixels {
        *px = rng.random_range(0..=255u32) as u8;
    }
    let img_path = dir.path().join("noise.pgm");
    write_image(&img_path, &image).unwrap();
    let decoded = fex::read_image(&img_path).unwrap();
    assert_eq!(decoded, image);
    assert_eq!(encode_pgm(&decoded), encode_pgm(&image));
    let plain = format!(
        "P2\n3 2\n255\n{} {} {}\n{} {} {}\n",
        9, 8, 7, 250, 0, 128
    );
    let from_plain = decode_pgm(plain.as_bytes()).unwrap();
    assert_eq!(from_plain.pixels, vec![9, 8, 7, 250, 0, 128]);

    // Manifests: what was written is what comes back, labels filled in
    // from the file name when the cell is blank.
    let manifest = dir.path().join("manifest.csv");
    fs::write(
        &manifest,
        "path,label\nfirst.pgm,happy\nKA.SA1.2.pgm,\n",
    )
    .unwrap();
    let entries = load_manifest(&manifest).unwrap();
    assert_eq!(entries.len(), 2);
    assert_eq!(entries[0].path, dir.path().join("first.pgm"));
    assert_eq!(entries[0].label, ExpressionLabel::Happy);
    assert_eq!(entries[1].label, ExpressionLabel::Sad);
}

// ---------------------------------------------------------------------
// externally supplied corpus, names in the usual subject.code.number form

fn expression_code(label: ExpressionLabel) -> &'static str {
    match label {
        ExpressionLabel::Angry => "AN",
        ExpressionLabel::Disgust => "DI",
        ExpressionLabel::Fear => "FE",
        ExpressionLabel::Happy => "HA",
        ExpressionLabel::Neutral => "NE",
        ExpressionLabel::Sad => "SA",
        ExpressionLabel::Surprise => "SU",
    }
}

#[test]
fn external_style_corpus_runs_end_to_end() {
    let dir = TempDir::new().unwrap();
    let subjects = ["KA", "KM"];

    // Fourteen images named like a hand-converted corpus, two per
    // expression. The manifest leaves every label cell blank so the
    // names themselves have to carry the labels.
    let mut manifest = String::from("path,label\n");
    let mut one_image = PathBuf::new();
    for (i, &label) in ExpressionLabel::ALL.iter().enumerate() {
        for (j, subject) in subjects.iter().enumerate() {
            let n = i * 2 + j + 1;
            let name = format!("{subject}.{}{}.{n}.pgm", expression_code(label), j + 1);
            let face = synth_face(label, 400 + n as u64);
            write_image(&dir.path().join(&name), &face.image).unwrap();
            manifest.push_str(&format!("{name},\n"));
            one_image = dir.path().join(&name);
        }
    }
    let manifest_path = dir.path().join("manifest.csv");
    fs::write(&manifest_path, &manifest).unwrap();

    let feats = dir.path().join("rows.csv");
    run_ok(fex_cmd()
        .arg("extract")
        .arg("--manifest")
        .arg(&manifest_path)
        .arg("--out")
        .arg(&feats));
    let rows = read_features(&feats).unwrap();
    assert_eq!(rows.len(), 14);
    assert!(rows.iter().all(|(_, l)| l.is_some()), "a label went missing");

    let model = dir.path().join("model.txt");
    run_ok(fex_cmd()
        .arg("train")
        .arg("--features")
        .arg(&feats)
        .arg("--model-out")
        .arg(&model)
        .args(["--epochs", "800", "--goal-mse", "0.02", "--seed", "2"]));

    // The report only has to come out well formed here: an accuracy line
    // and a labeled seven by seven count table.
    let out = run_ok(fex_cmd()
        .arg("evaluate")
        .arg("--model")
        .arg(&model)
        .arg("--features")
        .arg(&feats));
    let text = String::from_utf8_lossy(&out.stdout).into_owned();
    let (_, total) = accuracy_counts(&out.stdout);
    assert_eq!(total, 14);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 10, "report:\n{text}");
    assert!(lines[1].contains("confusion matrix"));
    let header: Vec<&str> = lines[2].split_whitespace().collect();
    assert_eq!(header.len(), 7);
    for (line, &name) in lines[3..].iter().zip(&header) {
        let cells: Vec<&str> = line.split_whitespace().collect();
        assert_eq!(cells.len(), 8, "matrix row: {line}");
        assert_eq!(cells[0], name);
        let row_total: u64 = cells[1..].iter().map(|c| c.parse::<u64>().unwrap()).sum();
        assert_eq!(row_total, 2, "each expression appears twice");
    }

    let out = run_ok(fex_cmd().arg("predict").arg(&one_image).arg("--model").arg(&model));
    let line = String::from_utf8_lossy(&out.stdout).into_owned();
    let parts: Vec<&str> = line.split_whitespace().collect();
    assert_eq!(parts.len(), 8, "prediction line: {line}");
    assert!(ExpressionLabel::ALL.iter().any(|l| l.name() == parts[0]));
}
