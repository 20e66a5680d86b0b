//! Pipeline configuration as flat `key = value` text plus `--key=value`
//! command-line overrides.
//!
//! Recognised keys:
//!
//! | key                   | default | meaning                                     |
//! |-----------------------|---------|---------------------------------------------|
//! | `threshold`           | `mean`  | `mean` or a fixed level 0..=255             |
//! | `edge`                | `canny` | `canny` or `sobel`                          |
//! | `canny.sigma`         | 1.0     | Gaussian sigma                              |
//! | `canny.radius`        | 2       | Gaussian radius                             |
//! | `canny.high`          | 0.20    | seed threshold, fraction of max magnitude   |
//! | `canny.low`           | 0.10    | tracking threshold, fraction                |
//! | `sobel.threshold`     | 0.20    | edge cut for `edge = sobel`, fraction       |
//! | `plate.min_aspect`    | 2.0     |                                             |
//! | `plate.max_aspect`    | 6.0     |                                             |
//! | `plate.min_rect`      | 0.5     | minimum rectangularity                      |
//! | `plate.min_area`      | 0.001   | fraction of the image area                  |
//! | `plate.max_area`      | 0.10    | fraction of the image area                  |
//! | `plate.h_line`        | 15      | horizontal line element length (odd)        |
//! | `plate.v_line`        | 5       | vertical line element length (odd)          |
//! | `open.width`          | 3       | opening box width (odd)                     |
//! | `open.height`         | 3       | opening box height (odd)                    |
//! | `mask`                | none    | P5 mask file; nonzero samples are searched  |
//!
//! Blank lines and lines starting with `#` are ignored.

use std::path::PathBuf;

use platemorph_core::edge::CannyParams;
use platemorph_core::locate::PlateCriteria;
use platemorph_core::preprocess::ThresholdSpec;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("bad value `{value}` for `{key}`")]
    BadValue { key: String, value: String },
    #[error("line {0}: expected `key = value`")]
    Syntax(usize),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EdgeDetector {
    #[default]
    Canny,
    /// Sobel magnitude cut at a fraction of its maximum.
    SobelThreshold,
}

/// Plate shape limits with areas given as fractions of the image.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlateSettings {
    pub min_aspect: f64,
    pub max_aspect: f64,
    pub min_rectangularity: f64,
    pub min_area_frac: f64,
    pub max_area_frac: f64,
    pub h_line_len: usize,
    pub v_line_len: usize,
}

impl Default for PlateSettings {
    fn default() -> Self {
        Self {
            min_aspect: 2.0,
            max_aspect: 6.0,
            min_rectangularity: 0.5,
            min_area_frac: 0.001,
            max_area_frac: 0.10,
            h_line_len: 15,
            v_line_len: 5,
        }
    }
}

impl PlateSettings {
    pub fn criteria(&self, width: usize, height: usize) -> PlateCriteria<f64> {
        PlateCriteria {
            min_aspect: self.min_aspect,
            max_aspect: self.max_aspect,
            min_rectangularity: self.min_rectangularity,
            h_line_len: self.h_line_len,
            v_line_len: self.v_line_len,
            ..PlateCriteria::with_area_fractions(width, height, self.min_area_frac, self.max_area_frac)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub threshold: ThresholdSpec,
    pub canny: CannyParams<f64>,
    pub sobel_threshold: f64,
    pub edge_detector: EdgeDetector,
    pub plate: PlateSettings,
    pub open_width: usize,
    pub open_height: usize,
    pub mask: Option<PathBuf>,
    pub dump_stages: bool,
    pub output_dir: PathBuf,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            threshold: ThresholdSpec::GlobalMean,
            canny: CannyParams::default(),
            sobel_threshold: 0.20,
            edge_detector: EdgeDetector::Canny,
            plate: PlateSettings::default(),
            open_width: 3,
            open_height: 3,
            mask: None,
            dump_stages: false,
            output_dir: PathBuf::from("stages"),
        }
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value.parse().map_err(|_| ConfigError::BadValue {
        key: key.to_string(),
        value: value.to_string(),
    })
}

impl PipelineConfig {
    pub const KEYS: &'static [&'static str] = &[
        "threshold",
        "edge",
        "canny.sigma",
        "canny.radius",
        "canny.high",
        "canny.low",
        "sobel.threshold",
        "plate.min_aspect",
        "plate.max_aspect",
        "plate.min_rect",
        "plate.min_area",
        "plate.max_area",
        "plate.h_line",
        "plate.v_line",
        "open.width",
        "open.height",
        "mask",
    ];

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let value = value.trim();
        match key {
            "threshold" => {
                self.threshold = match value {
                    "mean" => ThresholdSpec::GlobalMean,
                    v => ThresholdSpec::Fixed(parse(key, v)?),
                }
            }
            "edge" => {
                self.edge_detector = match value {
                    "canny" => EdgeDetector::Canny,
                    "sobel" => EdgeDetector::SobelThreshold,
                    _ => {
                        return Err(ConfigError::BadValue {
                            key: key.into(),
                            value: value.into(),
                        })
                    }
                }
            }
            "canny.sigma" => self.canny.sigma = parse(key, value)?,
            "canny.radius" => self.canny.radius = parse(key, value)?,
            "canny.high" => self.canny.high = parse(key, value)?,
            "canny.low" => self.canny.low = parse(key, value)?,
            "sobel.threshold" => self.sobel_threshold = parse(key, value)?,
            "plate.min_aspect" => self.plate.min_aspect = parse(key, value)?,
            "plate.max_aspect" => self.plate.max_aspect = parse(key, value)?,
            "plate.min_rect" => self.plate.min_rectangularity = parse(key, value)?,
            "plate.min_area" => self.plate.min_area_frac = parse(key, value)?,
            "plate.max_area" => self.plate.max_area_frac = parse(key, value)?,
            "plate.h_line" => self.plate.h_line_len = parse(key, value)?,
            "plate.v_line" => self.plate.v_line_len = parse(key, value)?,
            "open.width" => self.open_width = parse(key, value)?,
            "open.height" => self.open_height = parse(key, value)?,
            "mask" => self.mask = Some(PathBuf::from(value)),
            _ => return Err(ConfigError::UnknownKey(key.to_string())),
        }
        Ok(())
    }

    /// Apply every `key = value` line of a config file.
    pub fn apply_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or(ConfigError::Syntax(n + 1))?;
            self.set(key.trim(), value)?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |e: platemorph_core::Error| ConfigError::Invalid(e.to_string());
        self.canny.validate().map_err(invalid)?;
        if !(self.sobel_threshold > 0.0 && self.sobel_threshold < 1.0) {
            return Err(ConfigError::Invalid("sobel.threshold must lie in (0, 1)".into()));
        }
        if !(0.0..=1.0).contains(&self.plate.min_area_frac) || !(0.0..=1.0).contains(&self.plate.max_area_frac) {
            return Err(ConfigError::Invalid("plate area fractions must lie in [0, 1]".into()));
        }
        // area bounds are checked against a nominal frame; real bounds scale with the image
        self.plate.criteria(1000, 1000).validate().map_err(invalid)?;
        if self.open_width.is_multiple_of(2) || self.open_height.is_multiple_of(2) {
            return Err(ConfigError::Invalid("opening box sides must be odd".into()));
        }
        Ok(())
    }
}

/// Split `--key=value` overrides for known config keys out of `args`.
pub fn extract_overrides(args: Vec<String>) -> (Vec<String>, Vec<(String, String)>) {
    let mut rest = Vec::new();
    let mut overrides = Vec::new();
    for arg in args {
        let parsed = arg
            .strip_prefix("--")
            .and_then(|s| s.split_once('='))
            .filter(|(k, _)| k.contains('.') || PipelineConfig::KEYS.contains(k));
        match parsed {
            Some((k, v)) => overrides.push((k.to_string(), v.to_string())),
            None => rest.push(arg),
        }
    }
    (rest, overrides)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let cfg = PipelineConfig::default();
        assert!(cfg.validate().is_ok());
        assert_eq!(cfg.edge_detector, EdgeDetector::Canny);
        let crit = cfg.plate.criteria(640, 480);
        assert_eq!((crit.min_area, crit.max_area), (308, 30720));
        assert_eq!((crit.h_line_len, crit.v_line_len), (15, 5));
    }

    #[test]
    fn file_and_overrides() {
        let mut cfg = PipelineConfig::default();
        cfg.apply_text("# comment\n\nthreshold = 90\nedge=sobel\ncanny.sigma = 1.5\n")
            .unwrap();
        assert_eq!(cfg.threshold, ThresholdSpec::Fixed(90));
        assert_eq!(cfg.edge_detector, EdgeDetector::SobelThreshold);
        assert_eq!(cfg.canny.sigma, 1.5);
        assert_eq!(cfg.apply_text("nonsense"), Err(ConfigError::Syntax(1)));
        assert_eq!(
            cfg.set("canny.bogus", "1"),
            Err(ConfigError::UnknownKey("canny.bogus".into()))
        );
        assert!(matches!(cfg.set("edge", "prewitt"), Err(ConfigError::BadValue { .. })));
        assert!(matches!(cfg.set("threshold", "300"), Err(ConfigError::BadValue { .. })));
    }

    #[test]
    fn validation_catches_bad_combinations() {
        let mut cfg = PipelineConfig::default();
        cfg.canny.low = 0.5;
        assert!(cfg.validate().is_err());
        let mut cfg = PipelineConfig::default();
        cfg.set("plate.h_line", "14").unwrap();
        assert!(cfg.validate().is_err());
        let mut cfg = PipelineConfig::default();
        cfg.set("open.height", "2").unwrap();
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn overrides_are_split_from_other_args() {
        let args = [
            "locate",
            "car.ppm",
            "--dump",
            "--canny.sigma=1.5",
            "--out=x",
            "--edge=sobel",
        ]
        .map(String::from)
        .to_vec();
        let (rest, overrides) = extract_overrides(args);
        assert_eq!(rest, vec!["locate", "car.ppm", "--dump", "--out=x"]);
        assert_eq!(
            overrides,
            vec![("canny.sigma".into(), "1.5".into()), ("edge".into(), "sobel".into())]
        );
    }
}
