//! Pipeline configuration: defaults, a flat sectioned text format, and
//! deterministic echoing for manifests.
//!
//! The config file is plain `key = value` lines grouped under `[section]`
//! headers, with `#` comments. Unknown keys are rejected so typos fail
//! loudly. CLI flags override file values after parsing.

use std::path::PathBuf;

use thiserror::Error;

use crate::raster::StyleParams;
use crate::segment::{RootPolicy, SegmentorParams};
use crate::synthesis::{Box3, RadiusParams, ScaParams};

/// Raster settings for pipeline outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct RenderConfig {
    pub width: usize,
    pub height: usize,
    /// mm per pixel; derived from the synthesis domain when absent.
    pub pixel_size: Option<f64>,
    pub mask_threshold: f64,
    pub bits: u8,
}

impl Default for RenderConfig {
    fn default() -> Self {
        Self {
            width: 512,
            height: 512,
            pixel_size: None,
            mask_threshold: 0.5,
            bits: 8,
        }
    }
}

/// Everything the full pipeline needs.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub synthesis: ScaParams,
    pub radius: RadiusParams,
    pub style: StyleParams,
    pub segmentor: SegmentorParams,
    pub render: RenderConfig,
    /// Ratio defining synthesis-time main-vessel truth.
    pub truth_ratio: f64,
    pub out_dir: PathBuf,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            synthesis: ScaParams::default(),
            radius: RadiusParams::default(),
            style: StyleParams::default(),
            segmentor: SegmentorParams::default(),
            render: RenderConfig::default(),
            truth_ratio: 0.2,
            out_dir: PathBuf::from("out"),
        }
    }
}

impl PipelineConfig {
    /// Override every seed from one master value. Sub-seeds are decorrelated
    /// by fixed offsets.
    pub fn set_master_seed(&mut self, seed: u64) {
        self.synthesis.seed = seed;
        self.style.seed = seed.wrapping_add(1);
    }

    /// Effective mm-per-pixel for rendering.
    pub fn pixel_size(&self) -> f64 {
        self.render.pixel_size.unwrap_or_else(|| {
            let e = self.synthesis.domain.extent();
            e[0].max(e[1]) / self.render.width as f64
        })
    }

    /// Deterministic `section.key = value` echo, one line each, for
    /// embedding in manifests.
    pub fn echo(&self) -> String {
        let d = &self.synthesis.domain;
        let root_policy = match self.segmentor.root_policy {
            RootPolicy::MaxRadius => "max-radius".to_string(),
            RootPolicy::ExplicitId(id) => format!("id:{id}"),
            RootPolicy::RegionCenter { cx, cy, radius } => {
                format!("region:{cx},{cy},{radius}")
            }
        };
        let mut s = String::new();
        let mut line = |k: &str, v: String| {
            s.push_str(k);
            s.push_str(" = ");
            s.push_str(&v);
            s.push('\n');
        };
        line("synthesis.influence_radius", self.synthesis.influence_radius.to_string());
        line("synthesis.kill_distance", self.synthesis.kill_distance.to_string());
        line("synthesis.step_length", self.synthesis.step_length.to_string());
        line("synthesis.max_iterations", self.synthesis.max_iterations.to_string());
        line("synthesis.target_nodes", self.synthesis.target_nodes.to_string());
        line(
            "synthesis.domain",
            format!(
                "{} {} {} {} {} {}",
                d.min[0], d.min[1], d.min[2], d.max[0], d.max[1], d.max[2]
            ),
        );
        line("synthesis.seed", self.synthesis.seed.to_string());
        line("radius.gamma", self.radius.gamma.to_string());
        line("radius.r_leaf", self.radius.r_leaf.to_string());
        line("style.vessel_gain", self.style.vessel_gain.to_string());
        line(
            "style.background_capillary_density",
            self.style.background_capillary_density.to_string(),
        );
        line("style.speckle_sigma", self.style.speckle_sigma.to_string());
        line("style.contrast_gamma", self.style.contrast_gamma.to_string());
        line("style.seed", self.style.seed.to_string());
        line("segmentor.r_min_ratio", self.segmentor.r_min_ratio.to_string());
        line(
            "segmentor.connectivity_radius",
            self.segmentor.connectivity_radius.to_string(),
        );
        line("segmentor.root_policy", root_policy);
        line("render.width", self.render.width.to_string());
        line("render.height", self.render.height.to_string());
        line("render.pixel_size", self.pixel_size().to_string());
        line("render.mask_threshold", self.render.mask_threshold.to_string());
        line("render.bits", self.render.bits.to_string());
        line("truth_ratio", self.truth_ratio.to_string());
        s
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {detail}")]
    Syntax { line: usize, detail: String },
    #[error("line {line}: unknown key '{key}'")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: bad value for '{key}': {detail}")]
    BadValue {
        line: usize,
        key: String,
        detail: String,
    },
}

/// Parse the flat sectioned config format on top of defaults.
pub fn parse_config(text: &str) -> Result<PipelineConfig, ConfigError> {
    let mut cfg = PipelineConfig::default();
    let mut section = String::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let trimmed = raw.split('#').next().unwrap_or("").trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(name) = trimmed.strip_prefix('[') {
            let name = name.strip_suffix(']').ok_or_else(|| ConfigError::Syntax {
                line,
                detail: "unterminated section header".into(),
            })?;
            section = name.trim().to_ascii_lowercase();
            continue;
        }
        let Some((key, value)) = trimmed.split_once('=') else {
            return Err(ConfigError::Syntax {
                line,
                detail: format!("expected 'key = value', got '{trimmed}'"),
            });
        };
        let key = key.trim().to_ascii_lowercase();
        let value = value.trim();
        let qualified = if section.is_empty() {
            key.clone()
        } else {
            format!("{section}.{key}")
        };
        apply_key(&mut cfg, &qualified, value, line)?;
    }
    Ok(cfg)
}

fn apply_key(
    cfg: &mut PipelineConfig,
    key: &str,
    value: &str,
    line: usize,
) -> Result<(), ConfigError> {
    let bad = |detail: String| ConfigError::BadValue {
        line,
        key: key.to_string(),
        detail,
    };
    let parse_f64 = |v: &str| v.parse::<f64>().map_err(|e| bad(e.to_string()));
    let parse_usize = |v: &str| v.parse::<usize>().map_err(|e| bad(e.to_string()));
    let parse_u64 = |v: &str| v.parse::<u64>().map_err(|e| bad(e.to_string()));
    match key {
        "synthesis.influence_radius" => cfg.synthesis.influence_radius = parse_f64(value)?,
        "synthesis.kill_distance" => cfg.synthesis.kill_distance = parse_f64(value)?,
        "synthesis.step_length" => cfg.synthesis.step_length = parse_f64(value)?,
        "synthesis.max_iterations" => cfg.synthesis.max_iterations = parse_usize(value)?,
        "synthesis.target_nodes" => cfg.synthesis.target_nodes = parse_usize(value)?,
        "synthesis.seed" => cfg.synthesis.seed = parse_u64(value)?,
        "synthesis.domain" => {
            let parts: Vec<f64> = value
                .split_whitespace()
                .map(|p| p.parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|e| bad(e.to_string()))?;
            if parts.len() != 6 {
                return Err(bad("expected 6 numbers: min_x min_y min_z max_x max_y max_z".into()));
            }
            cfg.synthesis.domain = Box3::new(
                [parts[0], parts[1], parts[2]],
                [parts[3], parts[4], parts[5]],
            );
        }
        "radius.gamma" => cfg.radius.gamma = parse_f64(value)?,
        "radius.r_leaf" => cfg.radius.r_leaf = parse_f64(value)?,
        "style.vessel_gain" => cfg.style.vessel_gain = parse_f64(value)?,
        "style.background_capillary_density" => {
            cfg.style.background_capillary_density = parse_f64(value)?
        }
        "style.speckle_sigma" => cfg.style.speckle_sigma = parse_f64(value)?,
        "style.contrast_gamma" => cfg.style.contrast_gamma = parse_f64(value)?,
        "style.seed" => cfg.style.seed = parse_u64(value)?,
        "segmentor.r_min_ratio" => cfg.segmentor.r_min_ratio = parse_f64(value)?,
        "segmentor.connectivity_radius" => {
            cfg.segmentor.connectivity_radius = parse_f64(value)?
        }
        "segmentor.root_policy" => {
            cfg.segmentor.root_policy = parse_root_policy(value).map_err(bad)?
        }
        "render.width" => cfg.render.width = parse_usize(value)?,
        "render.height" => cfg.render.height = parse_usize(value)?,
        "render.pixel_size" => cfg.render.pixel_size = Some(parse_f64(value)?),
        "render.mask_threshold" => cfg.render.mask_threshold = parse_f64(value)?,
        "render.bits" => {
            let bits = value.parse::<u8>().map_err(|e| bad(e.to_string()))?;
            if bits != 8 && bits != 16 {
                return Err(bad("bits must be 8 or 16".into()));
            }
            cfg.render.bits = bits;
        }
        "truth_ratio" | "pipeline.truth_ratio" => cfg.truth_ratio = parse_f64(value)?,
        "out_dir" | "output.dir" | "pipeline.out_dir" => cfg.out_dir = PathBuf::from(value),
        _ => {
            return Err(ConfigError::UnknownKey {
                line,
                key: key.to_string(),
            })
        }
    }
    Ok(())
}

/// Root policy syntax: `max-radius`, `id:<n>`, or `region:<cx>,<cy>,<r>`.
pub fn parse_root_policy(text: &str) -> Result<RootPolicy, String> {
    let t = text.trim();
    if t.eq_ignore_ascii_case("max-radius") {
        return Ok(RootPolicy::MaxRadius);
    }
    if let Some(id) = t.strip_prefix("id:") {
        return id
            .trim()
            .parse::<u32>()
            .map(RootPolicy::ExplicitId)
            .map_err(|e| e.to_string());
    }
    if let Some(rest) = t.strip_prefix("region:") {
        let parts: Vec<&str> = rest.split(',').collect();
        if parts.len() != 3 {
            return Err("region policy needs cx,cy,radius".into());
        }
        let nums: Result<Vec<f64>, _> = parts.iter().map(|p| p.trim().parse::<f64>()).collect();
        let nums = nums.map_err(|e| e.to_string())?;
        return Ok(RootPolicy::RegionCenter {
            cx: nums[0],
            cy: nums[1],
            radius: nums[2],
        });
    }
    Err(format!(
        "unknown root policy '{t}' (expected max-radius, id:<n>, or region:cx,cy,r)"
    ))
}
