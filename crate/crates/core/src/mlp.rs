//! A small fully connected network for classifying feature vectors.
//!
//! Logistic units throughout, squared-error loss, plain online gradient
//! descent with optional momentum. Layer sizes are free, the default
//! topology for 15-entry face vectors is 15-15-7-7. Training is seeded and
//! single-threaded on purpose: the same data and config always produce the
//! same weights, which makes regressions diffable.

use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

/// The seven expression classes, in the canonical output order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExpressionLabel {
    Surprise,
    Neutral,
    Sad,
    Disgust,
    Fear,
    Happy,
    Angry,
}

impl ExpressionLabel {
    pub const ALL: [ExpressionLabel; 7] = [
        ExpressionLabel::Surprise,
        ExpressionLabel::Neutral,
        ExpressionLabel::Sad,
        ExpressionLabel::Disgust,
        ExpressionLabel::Fear,
        ExpressionLabel::Happy,
        ExpressionLabel::Angry,
    ];

    pub fn index(self) -> usize {
        Self::ALL.iter().position(|&l| l == self).unwrap()
    }

    pub fn name(self) -> &'static str {
        match self {
            ExpressionLabel::Surprise => "surprise",
            ExpressionLabel::Neutral => "neutral",
            ExpressionLabel::Sad => "sad",
            ExpressionLabel::Disgust => "disgust",
            ExpressionLabel::Fear => "fear",
            ExpressionLabel::Happy => "happy",
            ExpressionLabel::Angry => "angry",
        }
    }
}

impl fmt::Display for ExpressionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExpressionLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|l| l.name() == s)
            .ok_or_else(|| Error::Param {
                context: format!("unknown expression label '{s}'"),
            })
    }
}

/// Weights of the network. `weights[l]` maps layer `l` activations to layer
/// `l + 1` pre-activations, stored row-major: one row per output unit.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel {
    pub dims: Vec<usize>,
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
    /// Meaning of each output unit; length equals the last dim.
    pub labels: Vec<ExpressionLabel>,
}

/// Training schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub max_epochs: usize,
    /// Stop once the epoch error drops to this.
    pub goal_mse: f64,
    pub seed: u64,
    /// Visit samples in a fresh random order each epoch.
    pub shuffle: bool,
    pub momentum: f64,
    /// Target smoothing: on-targets become `1 - smoothing`, off-targets
    /// `smoothing`. Zero keeps hard 0/1 targets.
    pub smoothing: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.5,
            max_epochs: 10_000,
            goal_mse: 0.001,
            seed: 0,
            shuffle: true,
            momentum: 0.0,
            smoothing: 0.0,
        }
    }
}

impl TrainConfig {
    fn validate(&self) -> Result<()> {
        if !self.learning_rate.is_finite() || self.learning_rate < 0.0 {
            return Err(Error::Param {
                context: format!("learning rate {} (want >= 0)", self.learning_rate),
            });
        }
        if !self.momentum.is_finite() || self.momentum < 0.0 || self.momentum >= 1.0 {
            return Err(Error::Param {
                context: format!("momentum {} (want in [0, 1))", self.momentum),
            });
        }
        if !self.smoothing.is_finite() || self.smoothing < 0.0 || self.smoothing >= 0.5 {
            return Err(Error::Param {
                context: format!("target smoothing {} (want in [0, 0.5))", self.smoothing),
            });
        }
        if !self.goal_mse.is_finite() || self.goal_mse < 0.0 {
            return Err(Error::Param {
                context: format!("goal error {} (want >= 0)", self.goal_mse),
            });
        }
        Ok(())
    }
}

/// What [`train`] did.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    pub epochs: usize,
    pub final_mse: f64,
    /// Epoch error, one entry per epoch run.
    pub history: Vec<f64>,
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Fresh model with weights and biases drawn uniformly from `[-0.5, 0.5)`,
/// layer by layer, weights before biases. The same seed always produces
/// the same model.
pub fn init_model(dims: &[usize], labels: &[ExpressionLabel], seed: u64) -> Result<MlpModel> {
    if dims.len() < 2 || dims.contains(&0) {
        return Err(Error::Param {
            context: format!("layer dims {dims:?} (want at least two nonzero entries)"),
        });
    }
    if labels.is_empty() || labels.len() != *dims.last().unwrap() {
        return Err(Error::Param {
            context: format!(
                "{} labels for {} output units",
                labels.len(),
                dims.last().unwrap()
            ),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut weights = Vec::new();
    let mut biases = Vec::new();
    for l in 0..dims.len() - 1 {
        let (fan_in, fan_out) = (dims[l], dims[l + 1]);
        let w: Vec<f64> = (0..fan_in * fan_out)
            .map(|_| rng.random_range(-0.5..0.5))
            .collect();
        let b: Vec<f64> = (0..fan_out).map(|_| rng.random_range(-0.5..0.5)).collect();
        weights.push(w);
        biases.push(b);
    }
    Ok(MlpModel {
        dims: dims.to_vec(),
        weights,
        biases,
        labels: labels.to_vec(),
    })
}

fn check_input(model: &MlpModel, input: &[f64]) -> Result<()> {
    if input.len() != model.dims[0] {
        return Err(Error::DimensionMismatch {
            context: format!(
                "input has {} entries, model expects {}",
                input.len(),
                model.dims[0]
            ),
        });
    }
    if input.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            context: "feature vector entry".to_string(),
        });
    }
    Ok(())
}

// Activations of every layer, input first, output last.
fn forward_layers(model: &MlpModel, input: &[f64]) -> Vec<Vec<f64>> {
    let mut acts = Vec::with_capacity(model.dims.len());
    acts.push(input.to_vec());
    for l in 0..model.weights.len() {
        let fan_in = model.dims[l];
        let fan_out = model.dims[l + 1];
        let prev = &acts[l];
        let mut next = Vec::with_capacity(fan_out);
        for j in 0..fan_out {
            let row = &model.weights[l][j * fan_in..(j + 1) * fan_in];
            let z: f64 = row.iter().zip(prev).map(|(w, a)| w * a).sum::<f64>()
                + model.biases[l][j];
            next.push(sigmoid(z));
        }
        acts.push(next);
    }
    acts
}

/// Output activations for one input vector.
pub fn forward(model: &MlpModel, input: &[f64]) -> Result<Vec<f64>> {
    check_input(model, input)?;
    Ok(forward_layers(model, input).pop().unwrap())
}

fn target_for(model: &MlpModel, label: ExpressionLabel, smoothing: f64) -> Result<Vec<f64>> {
    let idx = model
        .labels
        .iter()
        .position(|&l| l == label)
        .ok_or_else(|| Error::Param {
            context: format!("label '{label}' is not among the model outputs"),
        })?;
    let n = model.labels.len();
    let mut t = vec![smoothing; n];
    t[idx] = 1.0 - smoothing;
    Ok(t)
}

fn shuffled_order(n: usize, config: &TrainConfig, epoch: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    if config.shuffle {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(epoch as u64));
        for i in (1..n).rev() {
            let j = rng.random_range(0..=i);
            order.swap(i, j);
        }
    }
    order
}

// One pass over the data in the given order, updating weights sample by
// sample. Returns the mean of the per-sample errors, each measured on the
// weights as they stood when that sample was presented.
fn epoch_pass(
    model: &mut MlpModel,
    data: &[(Vec<f64>, ExpressionLabel)],
    config: &TrainConfig,
    epoch: usize,
    vel_w: &mut [Vec<f64>],
    vel_b: &mut [Vec<f64>],
) -> Result<f64> {
    let order = shuffled_order(data.len(), config, epoch);
    let layers = model.weights.len();
    let mut error_sum = 0.0;
    for &idx in &order {
        let (input, label) = &data[idx];
        check_input(model, input)?;
        let target = target_for(model, *label, config.smoothing)?;
        let acts = forward_layers(model, input);
        let output = acts.last().unwrap();

        error_sum += output
            .iter()
            .zip(&target)
            .map(|(y, t)| 0.5 * (y - t) * (y - t))
            .sum::<f64>();

        // Output delta, then pull it back through the layers.
        let mut deltas: Vec<Vec<f64>> = vec![Vec::new(); layers];
        deltas[layers - 1] = output
            .iter()
            .zip(&target)
            .map(|(y, t)| (y - t) * y * (1.0 - y))
            .collect();
        for l in (0..layers - 1).rev() {
            let fan_in = model.dims[l + 1];
            let fan_out = model.dims[l + 2];
            let next = &deltas[l + 1];
            let mut d = Vec::with_capacity(fan_in);
            for (i, &a) in acts[l + 1].iter().enumerate() {
                let back: f64 = (0..fan_out)
                    .map(|j| model.weights[l + 1][j * fan_in + i] * next[j])
                    .sum();
                d.push(back * a * (1.0 - a));
            }
            deltas[l] = d;
        }

        for l in 0..layers {
            let fan_in = model.dims[l];
            for j in 0..model.dims[l + 1] {
                let dj = deltas[l][j];
                let row = j * fan_in;
                for (i, &a) in acts[l].iter().enumerate() {
                    let k = row + i;
                    let v =
                        config.momentum * vel_w[l][k] + config.learning_rate * dj * a;
                    vel_w[l][k] = v;
                    model.weights[l][k] -= v;
                }
                let v = config.momentum * vel_b[l][j] + config.learning_rate * dj;
                vel_b[l][j] = v;
                model.biases[l][j] -= v;
            }
        }
    }
    Ok(error_sum / data.len() as f64)
}

fn zero_like(model: &MlpModel) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let w = model.weights.iter().map(|w| vec![0.0; w.len()]).collect();
    let b = model.biases.iter().map(|b| vec![0.0; b.len()]).collect();
    (w, b)
}

/// Run a single training epoch and return its mean error. The `epoch`
/// number seeds the shuffle so repeated calls walk the data differently.
pub fn backprop_epoch(
    model: &mut MlpModel,
    data: &[(Vec<f64>, ExpressionLabel)],
    config: &TrainConfig,
    epoch: usize,
) -> Result<f64> {
    config.validate()?;
    if data.is_empty() {
        return Err(Error::EmptyInput {
            context: "training data".to_string(),
        });
    }
    let (mut vel_w, mut vel_b) = zero_like(model);
    epoch_pass(model, data, config, epoch, &mut vel_w, &mut vel_b)
}

/// Train until the epoch error reaches `goal_mse` or `max_epochs` passes.
pub fn train(
    model: &mut MlpModel,
    data: &[(Vec<f64>, ExpressionLabel)],
    config: &TrainConfig,
) -> Result<TrainReport> {
    config.validate()?;
    if data.is_empty() {
        return Err(Error::EmptyInput {
            context: "training data".to_string(),
        });
    }
    let (mut vel_w, mut vel_b) = zero_like(model);
    let mut history = Vec::new();
    for epoch in 0..config.max_epochs {
        let mse = epoch_pass(model, data, config, epoch, &mut vel_w, &mut vel_b)?;
        history.push(mse);
        if mse <= config.goal_mse {
            break;
        }
    }
    Ok(TrainReport {
        epochs: history.len(),
        final_mse: history.last().copied().unwrap_or(f64::INFINITY),
        history,
    })
}

/// Classify one input: the label of the strongest output unit, ties going
/// to the earlier unit, along with all output scores.
pub fn predict(model: &MlpModel, input: &[f64]) -> Result<(ExpressionLabel, Vec<f64>)> {
    let output = forward(model, input)?;
    let mut best = 0;
    for (i, &v) in output.iter().enumerate() {
        if v > output[best] {
            best = i;
        }
    }
    Ok((model.labels[best], output))
}

const MODEL_MAGIC: &str = "fex-mlp 1";

/// Write the model as a line-oriented text file. Floats are printed with
/// enough digits to survive a read back bit for bit.
pub fn save_model(model: &MlpModel, path: &Path) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "{MODEL_MAGIC}")?;
    let dims: Vec<String> = model.dims.iter().map(|d| d.to_string()).collect();
    writeln!(out, "dims {}", dims.join(" "))?;
    let labels: Vec<String> = model.labels.iter().map(|l| l.to_string()).collect();
    writeln!(out, "labels {}", labels.join(" "))?;
    for l in 0..model.weights.len() {
        let fan_in = model.dims[l];
        for j in 0..model.dims[l + 1] {
            let row: Vec<String> = model.weights[l][j * fan_in..(j + 1) * fan_in]
                .iter()
                .map(|v| format!("{v:.16e}"))
                .collect();
            writeln!(out, "{}", row.join(" "))?;
        }
        let row: Vec<String> = model.biases[l].iter().map(|v| format!("{v:.16e}")).collect();
        writeln!(out, "{}", row.join(" "))?;
    }
    out.flush()?;
    Ok(())
}

/// Read a model written by [`save_model`].
pub fn load_model(path: &Path) -> Result<MlpModel> {
    let reader = BufReader::new(File::open(path)?);
    let mut lines = reader.lines().enumerate();

    let mut next_line = |expect: &str| -> Result<(usize, String)> {
        match lines.next() {
            Some((i, line)) => Ok((i + 1, line?)),
            None => Err(Error::ModelShape {
                line: 0,
                reason: format!("file ended before {expect}"),
            }),
        }
    };

    let (_, magic) = next_line("the format line")?;
    if magic.trim() != MODEL_MAGIC {
        return Err(Error::ModelVersion {
            found: magic.trim().to_string(),
        });
    }

    let (line_no, dims_line) = next_line("the dims line")?;
    let mut parts = dims_line.split_whitespace();
    if parts.next() != Some("dims") {
        return Err(Error::ModelShape {
            line: line_no,
            reason: "expected a dims line".to_string(),
        });
    }
    let dims: Vec<usize> = parts
        .map(|p| {
            p.parse::<usize>().map_err(|e| Error::ModelParse {
                line: line_no,
                reason: format!("bad dimension '{p}': {e}"),
            })
        })
        .collect::<Result<_>>()?;
    if dims.len() < 2 || dims.contains(&0) {
        return Err(Error::ModelShape {
            line: line_no,
            reason: format!("unusable dims {dims:?}"),
        });
    }

    let (line_no, labels_line) = next_line("the labels line")?;
    let mut parts = labels_line.split_whitespace();
    if parts.next() != Some("labels") {
        return Err(Error::ModelShape {
            line: line_no,
            reason: "expected a labels line".to_string(),
        });
    }
    let labels: Vec<ExpressionLabel> = parts
        .map(|p| {
            p.parse().map_err(|_| Error::ModelParse {
                line: line_no,
                reason: format!("unknown label '{p}'"),
            })
        })
        .collect::<Result<_>>()?;
    if labels.len() != *dims.last().unwrap() {
        return Err(Error::ModelShape {
            line: line_no,
            reason: format!(
                "{} labels for {} output units",
                labels.len(),
                dims.last().unwrap()
            ),
        });
    }

    let mut parse_row = |expect_len: usize, what: &str| -> Result<Vec<f64>> {
        let (line_no, row_line) = next_line(what)?;
        let row: Vec<f64> = row_line
            .split_whitespace()
            .map(|p| {
                p.parse::<f64>().map_err(|e| Error::ModelParse {
                    line: line_no,
                    reason: format!("bad value '{p}': {e}"),
                })
            })
            .collect::<Result<_>>()?;
        if row.len() != expect_len {
            return Err(Error::ModelShape {
                line: line_no,
                reason: format!("{what} has {} values, expected {expect_len}", row.len()),
            });
        }
        Ok(row)
    };

    let mut weights = Vec::new();
    let mut biases = Vec::new();
    for l in 0..dims.len() - 1 {
        let mut w = Vec::with_capacity(dims[l] * dims[l + 1]);
        for _ in 0..dims[l + 1] {
            w.extend(parse_row(dims[l], "a weight row")?);
        }
        weights.push(w);
        biases.push(parse_row(dims[l + 1], "a bias row")?);
    }
    Ok(MlpModel {
        dims,
        weights,
        biases,
        labels,
    })
}
