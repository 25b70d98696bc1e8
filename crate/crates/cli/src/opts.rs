//! Shared flag groups and their resolution against a config file.
//!
//! Every tunable is a three-way choice: an explicit flag wins, otherwise a
//! config-file value applies, otherwise the library default stands.

use std::str::FromStr;

use clap::{ArgAction, Args};
use fex::{
    ClaheParams, ExtractParams, LocalizeParams, NormRect, OverlapAxis, Polarity, RegionWindows,
    SusanParams, Threshold, TrainConfig,
};

use crate::config::Config;
use crate::error::CliError;

/// `otsu` or a fixed gray level.
#[derive(Debug, Clone, Copy)]
pub struct ThresholdSpec(pub Threshold);

impl FromStr for ThresholdSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("otsu") {
            return Ok(ThresholdSpec(Threshold::Otsu));
        }
        s.parse::<u8>()
            .map(|level| ThresholdSpec(Threshold::Fixed(level)))
            .map_err(|_| format!("expected 'otsu' or a level 0-255, found '{s}'"))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PolaritySpec(pub Polarity);

impl FromStr for PolaritySpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "dark" => Ok(PolaritySpec(Polarity::Dark)),
            "light" => Ok(PolaritySpec(Polarity::Light)),
            _ => Err(format!("expected 'dark' or 'light', found '{s}'")),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct AxisSpec(pub OverlapAxis);

impl FromStr for AxisSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "x" => Ok(AxisSpec(OverlapAxis::X)),
            "y" => Ok(AxisSpec(OverlapAxis::Y)),
            _ => Err(format!("expected 'x' or 'y', found '{s}'")),
        }
    }
}

/// Image pipeline tuning, shared by every command that reads images.
#[derive(Args, Debug, Default)]
pub struct PipelineFlags {
    /// Contrast equalization tile grid.
    #[arg(long, num_args = 2, value_names = ["X", "Y"], action = ArgAction::Set)]
    clahe_tiles: Option<Vec<u32>>,

    /// Histogram clip limit as a multiple of the mean bin load.
    #[arg(long, value_name = "F")]
    clahe_clip: Option<f64>,

    /// Disk radius of the opening that removes clutter before localization.
    #[arg(long, value_name = "R")]
    se_radius: Option<u32>,

    /// Crop enlargement factor.
    #[arg(long, value_name = "F")]
    resize_scale: Option<f64>,

    /// Face threshold: 'otsu' or a fixed level 0-255.
    #[arg(long, value_name = "T")]
    threshold: Option<ThresholdSpec>,

    /// Which side of the threshold holds the face: dark or light.
    #[arg(long, value_name = "SIDE")]
    polarity: Option<PolaritySpec>,

    /// Reconstruct the face from intensity peaks instead of the opening.
    #[arg(long)]
    regional_maxima: bool,

    /// Brightness difference scale of the edge detector.
    #[arg(long, value_name = "T")]
    susan_t: Option<f64>,

    /// Geometric threshold as a fraction of the largest window area.
    #[arg(long, value_name = "F")]
    susan_g_frac: Option<f64>,

    /// Edge detector window radius in pixels.
    #[arg(long, value_name = "R")]
    susan_radius: Option<f64>,

    /// Keep only edge responses above this.
    #[arg(long, value_name = "F")]
    edge_thresh: Option<f64>,

    /// Skip the median cleanup pass on the edge mask.
    #[arg(long)]
    no_despeckle: bool,

    /// Use the hard brightness cutoff instead of the smooth curve.
    #[arg(long)]
    hard_comparator: bool,

    /// Drop components smaller than this fraction of the crop area.
    #[arg(long, value_name = "F")]
    min_area_frac: Option<f64>,

    /// Report feature sizes in pixels instead of fractions of the crop diagonal.
    #[arg(long)]
    no_normalize: bool,

    /// Merge feature fragments that overlap along this axis: x or y.
    #[arg(long, value_name = "AXIS")]
    merge_overlap: Option<AxisSpec>,
}

/// Fully resolved pipeline tuning.
#[derive(Debug, Clone, Copy)]
pub struct PipelineSettings {
    pub clahe: ClaheParams,
    pub localize: LocalizeParams,
    pub susan: SusanParams,
    pub windows: RegionWindows,
    pub min_area_frac: f64,
    pub edge_threshold: f64,
    pub despeckle: bool,
    pub normalize: bool,
    pub overlap_axis: OverlapAxis,
}

impl PipelineSettings {
    /// Extraction parameters for a crop of the given size, with the noise
    /// floor scaled to its area.
    pub fn extract_params(&self, crop_w: u32, crop_h: u32) -> ExtractParams {
        let area = f64::from(crop_w) * f64::from(crop_h);
        ExtractParams {
            min_area: ((self.min_area_frac * area).round() as usize).max(1),
            windows: self.windows,
            edge_threshold: self.edge_threshold,
            despeckle: self.despeckle,
            normalize: self.normalize,
            overlap_axis: self.overlap_axis,
        }
    }
}

fn pick<T>(flag: Option<T>, file: Option<T>) -> Option<T> {
    flag.or(file)
}

fn margin_rect(key: &str, r: [f64; 4]) -> Result<NormRect, CliError> {
    let ordered = r[0] <= r[2] && r[1] <= r[3];
    let bounded = r.iter().all(|v| (0.0..=1.0).contains(v));
    if !ordered || !bounded {
        return Err(CliError::usage(format!(
            "config key {key}: margins must be x0 y0 x1 y1 with 0 <= x0 <= x1 <= 1 and 0 <= y0 <= y1 <= 1"
        )));
    }
    Ok(NormRect::new(r[0], r[1], r[2], r[3]))
}

impl PipelineFlags {
    pub fn resolve(&self, cfg: &Config) -> Result<PipelineSettings, CliError> {
        let mut clahe = ClaheParams::default();
        let tiles = match &self.clahe_tiles {
            Some(v) => Some([v[0], v[1]]),
            None => cfg.get_list::<u32, 2>("clahe-tiles")?,
        };
        if let Some([x, y]) = tiles {
            clahe.tiles_x = x;
            clahe.tiles_y = y;
        }
        if let Some(clip) = pick(self.clahe_clip, cfg.get("clahe-clip")?) {
            clahe.clip_limit = clip;
        }

        let mut localize = LocalizeParams::default();
        if let Some(r) = pick(self.se_radius, cfg.get("se-radius")?) {
            localize.se_radius = r;
        }
        if let Some(s) = pick(self.resize_scale, cfg.get("resize-scale")?) {
            localize.resize_scale = s;
        }
        if let Some(t) = pick(self.threshold, cfg.get("threshold")?) {
            localize.threshold = t.0;
        }
        if let Some(p) = pick(self.polarity, cfg.get("polarity")?) {
            localize.polarity = p.0;
        }
        localize.use_regional_maxima =
            self.regional_maxima || cfg.get("regional-maxima")?.unwrap_or(false);

        let mut susan = SusanParams::default();
        if let Some(t) = pick(self.susan_t, cfg.get("susan-t")?) {
            susan.brightness_t = t;
        }
        if let Some(g) = pick(self.susan_g_frac, cfg.get("susan-g-frac")?) {
            susan.geometric_fraction = g;
        }
        if let Some(r) = pick(self.susan_radius, cfg.get("susan-radius")?) {
            susan.mask_radius = r;
        }
        susan.hard_comparator =
            self.hard_comparator || cfg.get("hard-comparator")?.unwrap_or(false);

        let mut windows = RegionWindows::default();
        if let Some(r) = cfg.get_list("upper-left-margins")? {
            windows.upper_left = margin_rect("upper-left-margins", r)?;
        }
        if let Some(r) = cfg.get_list("upper-right-margins")? {
            windows.upper_right = margin_rect("upper-right-margins", r)?;
        }
        if let Some(r) = cfg.get_list("lower-margins")? {
            windows.lower = margin_rect("lower-margins", r)?;
        }

        let min_area_frac =
            pick(self.min_area_frac, cfg.get("min-area-frac")?).unwrap_or(0.0005);
        if !min_area_frac.is_finite() || !(0.0..=1.0).contains(&min_area_frac) {
            return Err(CliError::usage(format!(
                "min-area-frac {min_area_frac} must lie in [0, 1]"
            )));
        }

        Ok(PipelineSettings {
            clahe,
            localize,
            susan,
            windows,
            min_area_frac,
            edge_threshold: pick(self.edge_thresh, cfg.get("edge-thresh")?).unwrap_or(0.0),
            despeckle: if self.no_despeckle {
                false
            } else {
                cfg.get("despeckle")?.unwrap_or(true)
            },
            normalize: if self.no_normalize {
                false
            } else {
                cfg.get("normalize")?.unwrap_or(true)
            },
            overlap_axis: pick(self.merge_overlap, cfg.get("merge-overlap")?)
                .map_or(OverlapAxis::X, |a| a.0),
        })
    }
}

/// Training schedule overrides, applied over the built-in defaults.
#[derive(Args, Debug, Default)]
pub struct TrainFlags {
    /// Gradient step size.
    #[arg(long, value_name = "F")]
    lr: Option<f64>,

    /// Epoch budget.
    #[arg(long, value_name = "N")]
    epochs: Option<usize>,

    /// Stop once the epoch error drops this low.
    #[arg(long, value_name = "F")]
    goal_mse: Option<f64>,

    /// Weight initialization and shuffle seed.
    #[arg(long, value_name = "N")]
    seed: Option<u64>,

    /// Momentum coefficient in [0, 1).
    #[arg(long, value_name = "F")]
    momentum: Option<f64>,

    /// Soften the 0/1 training targets by this much.
    #[arg(long, value_name = "F")]
    smoothing: Option<f64>,

    /// Visit samples in file order every epoch.
    #[arg(long)]
    no_shuffle: bool,
}

impl TrainFlags {
    pub fn resolve(&self, cfg: &Config) -> Result<TrainConfig, CliError> {
        let mut config = TrainConfig::default();
        if let Some(v) = pick(self.lr, cfg.get("lr")?) {
            config.learning_rate = v;
        }
        if let Some(v) = pick(self.epochs, cfg.get("epochs")?) {
            config.max_epochs = v;
        }
        if let Some(v) = pick(self.goal_mse, cfg.get("goal-mse")?) {
            config.goal_mse = v;
        }
        if let Some(v) = pick(self.seed, cfg.get("seed")?) {
            config.seed = v;
        }
        if let Some(v) = pick(self.momentum, cfg.get("momentum")?) {
            config.momentum = v;
        }
        if let Some(v) = pick(self.smoothing, cfg.get("smoothing")?) {
            config.smoothing = v;
        }
        config.shuffle = if self.no_shuffle {
            false
        } else {
            cfg.get("shuffle")?.unwrap_or(true)
        };
        Ok(config)
    }
}
