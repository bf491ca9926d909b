//! Every tunable of the pipeline, with a flat `key = value` file format.
//!
//! Lines are `key = value`; blank lines and lines starting with `#` are
//! ignored. Unknown keys and unparsable values are errors. See
//! [`Config::KEYS`] for the full list.

use std::str::FromStr;

use thiserror::Error;

use crate::deskew::SkewParams;
use crate::geometry::Tolerances;
use crate::synth::SynthParams;
use crate::text::TextParams;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: bad value `{value}` for `{key}`")]
    BadValue { line: usize, key: String, value: String },
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Config {
    pub tol: Tolerances,
    pub text: TextParams,
    pub skew: SkewParams,
    pub binarize_window: usize,
    pub binarize_offset: i32,
    pub min_len_frac: f64,
    /// Rasterization resolution for PDF pages and the assumed resolution of
    /// image inputs.
    pub dpi: f64,
    pub deskew: bool,
    /// Estimated skew below this magnitude is left uncorrected.
    pub deskew_min_angle: f64,
    pub auto_orientation: bool,
    pub iou_thresh: f64,
    /// Filled or stroked rectangles thinner than this become rules.
    pub thin_rule_pt: f64,
    pub synth: SynthParams,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            tol: Tolerances::default(),
            text: TextParams::default(),
            skew: SkewParams::default(),
            binarize_window: 31,
            binarize_offset: 10,
            min_len_frac: 0.04,
            dpi: 150.0,
            deskew: true,
            deskew_min_angle: 0.05,
            auto_orientation: false,
            iou_thresh: 0.5,
            thin_rule_pt: 3.0,
            synth: SynthParams::default(),
        }
    }
}

fn parse<T: FromStr>(line: usize, key: &str, value: &str) -> Result<T, ConfigError> {
    value.parse().map_err(|_| ConfigError::BadValue { line, key: key.into(), value: value.into() })
}

impl Config {
    pub const KEYS: &'static [&'static str] = &[
        "line_snap_tol",
        "edge_cover_ratio",
        "join_tol",
        "overlap_frac",
        "newline_frac",
        "line_gap_frac",
        "para_gap_frac",
        "para_overlap",
        "binarize_window",
        "binarize_offset",
        "min_len_frac",
        "dpi",
        "deskew",
        "deskew_min_angle",
        "skew_range",
        "skew_coarse_step",
        "skew_fine_step",
        "auto_orientation",
        "orientation_ratio",
        "iou_thresh",
        "thin_rule_pt",
        "synth.max_rows",
        "synth.max_cols",
        "synth.merge_prob",
        "synth.skew_deg",
        "synth.dpi",
        "synth.text_fill",
        "synth.noise_sigma",
        "synth.page_width",
        "synth.page_height",
        "synth.margin",
        "synth.min_cell",
    ];

    /// Applies one setting.
    pub fn set(&mut self, key: &str, value: &str, line: usize) -> Result<(), ConfigError> {
        let v = value.trim();
        match key {
            "line_snap_tol" => self.tol.line_snap_tol = parse(line, key, v)?,
            "edge_cover_ratio" => self.tol.edge_cover_ratio = parse(line, key, v)?,
            "join_tol" => self.tol.join_tol = parse(line, key, v)?,
            "overlap_frac" => self.tol.overlap_frac = parse(line, key, v)?,
            "newline_frac" => self.text.newline_frac = parse(line, key, v)?,
            "line_gap_frac" => self.text.line_gap_frac = parse(line, key, v)?,
            "para_gap_frac" => self.text.para_gap_frac = parse(line, key, v)?,
            "para_overlap" => self.text.para_overlap = parse(line, key, v)?,
            "binarize_window" => self.binarize_window = parse(line, key, v)?,
            "binarize_offset" => self.binarize_offset = parse(line, key, v)?,
            "min_len_frac" => self.min_len_frac = parse(line, key, v)?,
            "dpi" => self.dpi = parse(line, key, v)?,
            "deskew" => self.deskew = parse(line, key, v)?,
            "deskew_min_angle" => self.deskew_min_angle = parse(line, key, v)?,
            "skew_range" => self.skew.range_deg = parse(line, key, v)?,
            "skew_coarse_step" => self.skew.coarse_step = parse(line, key, v)?,
            "skew_fine_step" => self.skew.fine_step = parse(line, key, v)?,
            "auto_orientation" => self.auto_orientation = parse(line, key, v)?,
            "orientation_ratio" => self.skew.orientation_ratio = parse(line, key, v)?,
            "iou_thresh" => self.iou_thresh = parse(line, key, v)?,
            "thin_rule_pt" => self.thin_rule_pt = parse(line, key, v)?,
            "synth.max_rows" => self.synth.max_rows = parse(line, key, v)?,
            "synth.max_cols" => self.synth.max_cols = parse(line, key, v)?,
            "synth.merge_prob" => self.synth.merge_prob = parse(line, key, v)?,
            "synth.skew_deg" => self.synth.skew_deg = parse(line, key, v)?,
            "synth.dpi" => self.synth.dpi = parse(line, key, v)?,
            "synth.text_fill" => self.synth.text_fill = parse(line, key, v)?,
            "synth.noise_sigma" => self.synth.noise_sigma = parse(line, key, v)?,
            "synth.page_width" => self.synth.page_width = parse(line, key, v)?,
            "synth.page_height" => self.synth.page_height = parse(line, key, v)?,
            "synth.margin" => self.synth.margin = parse(line, key, v)?,
            "synth.min_cell" => self.synth.min_cell = parse(line, key, v)?,
            _ => return Err(ConfigError::UnknownKey { line, key: key.into() }),
        }
        Ok(())
    }

    /// Overlays the settings in `text` on `self` and validates the result.
    pub fn apply_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (key, value) = trimmed.split_once('=').ok_or(ConfigError::Syntax { line })?;
            self.set(key.trim(), value, line)?;
        }
        self.validate()
    }

    pub fn from_text(text: &str) -> Result<Self, ConfigError> {
        let mut c = Config::default();
        c.apply_text(text)?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |m: &str| Err(ConfigError::Invalid(m.into()));
        self.tol.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        if self.binarize_window.is_multiple_of(2) {
            return invalid("binarize_window must be odd");
        }
        let positive = [
            ("min_len_frac", self.min_len_frac),
            ("dpi", self.dpi),
            ("skew_coarse_step", self.skew.coarse_step),
            ("skew_fine_step", self.skew.fine_step),
            ("orientation_ratio", self.skew.orientation_ratio),
            ("thin_rule_pt", self.thin_rule_pt),
            ("newline_frac", self.text.newline_frac),
            ("line_gap_frac", self.text.line_gap_frac),
            ("para_gap_frac", self.text.para_gap_frac),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return invalid(&format!("{name} must be positive"));
            }
        }
        if !(0.0..=45.0).contains(&self.skew.range_deg) {
            return invalid("skew_range must lie in [0, 45]");
        }
        if !(0.0..=1.0).contains(&self.iou_thresh) || !(0.0..=1.0).contains(&self.text.para_overlap) {
            return invalid("iou_thresh and para_overlap must lie in [0, 1]");
        }
        if self.deskew_min_angle.is_nan() || self.deskew_min_angle < 0.0 {
            return invalid("deskew_min_angle must be non-negative");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_overrides() {
        let c = Config::from_text(
            "# comment\n\nline_snap_tol = 1.5\nbinarize_window=21\ndeskew = false\nsynth.max_rows = 6\n",
        )
        .unwrap();
        assert_eq!(c.tol.line_snap_tol, 1.5);
        assert_eq!(c.binarize_window, 21);
        assert!(!c.deskew);
        assert_eq!(c.synth.max_rows, 6);
        assert_eq!(c.tol.join_tol, 3.0);
    }

    #[test]
    fn errors() {
        assert_eq!(Config::from_text("nonsense"), Err(ConfigError::Syntax { line: 1 }));
        assert!(matches!(Config::from_text("\nfoo = 1"), Err(ConfigError::UnknownKey { line: 2, .. })));
        assert!(matches!(Config::from_text("dpi = fast"), Err(ConfigError::BadValue { .. })));
        assert!(matches!(Config::from_text("binarize_window = 30"), Err(ConfigError::Invalid(_))));
        assert!(matches!(Config::from_text("edge_cover_ratio = 1.5"), Err(ConfigError::Invalid(_))));
    }

    #[test]
    fn every_key_is_settable() {
        let defaults = Config::default();
        for key in Config::KEYS {
            let mut c = defaults.clone();
            let value = if key.ends_with("deskew") || key.ends_with("orientation") || key.ends_with("text_fill") {
                "true"
            } else {
                "7"
            };
            c.set(key, value, 1).unwrap_or_else(|e| panic!("{key}: {e}"));
        }
    }
}
