//! End-to-end localization run with optional numbered stage dumps.
//!
//! Stage files, in order:
//!
//! 1. `01-input.ppm`: the color input
//! 2. `02-gray.pgm`: luminance after the 3x3 median filter
//! 3. `03-mask.pgm`: search mask (white = searched)
//! 4. `04-binary.pgm`: global threshold of the filtered gray image
//! 5. `05-binmask.pgm`: the binary image restricted to the mask
//! 6. `06-processed.pgm`: candidate mask built from the edge map
//! 7. `07-open.pgm`: candidate mask after opening
//! 8. `08-bbox.ppm`: input with the chosen box outlined in red

use std::fs;
use std::path::{Path, PathBuf};

use platemorph_core::edge::{canny, sobel, MagnitudeRule};
use platemorph_core::locate::{
    candidate_mask, connected_components, crop_plate, select_plate, Connectivity, PlateResult,
};
use platemorph_core::morphology::{open, StructuringElement};
use platemorph_core::netpbm::{load_pgm, save_pbm, save_pgm, save_ppm};
use platemorph_core::preprocess::{mask_binary, median_filter_3x3, threshold, to_grayscale, ImageMask};
use platemorph_core::{BinaryImage, GrayImage, RgbImage};
use thiserror::Error;

use crate::config::{EdgeDetector, PipelineConfig};

pub const STAGE_FILES: [&str; 8] = [
    "01-input.ppm",
    "02-gray.pgm",
    "03-mask.pgm",
    "04-binary.pgm",
    "05-binmask.pgm",
    "06-processed.pgm",
    "07-open.pgm",
    "08-bbox.ppm",
];

const OUTLINE: [u8; 3] = [255, 0, 0];

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("stage {stage}: {source}")]
    Stage {
        stage: &'static str,
        source: platemorph_core::Error,
    },
    #[error("no plate candidate found")]
    NoCandidate,
    #[error("writing {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl PipelineError {
    /// Name of the stage that failed.
    pub fn stage(&self) -> &'static str {
        match self {
            PipelineError::Stage { stage, .. } => stage,
            PipelineError::NoCandidate => "select-plate",
            PipelineError::Io { .. } => "dump",
        }
    }
}

/// Receives encoded stage images as they are produced.
pub trait StageSink {
    fn stage(&mut self, name: &str, bytes: Vec<u8>) -> Result<(), PipelineError>;
}

/// Discards every stage.
pub struct NoDump;

impl StageSink for NoDump {
    fn stage(&mut self, _: &str, _: Vec<u8>) -> Result<(), PipelineError> {
        Ok(())
    }
}

/// Writes each stage into a directory, creating it on first use.
pub struct DirSink {
    dir: PathBuf,
}

impl DirSink {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }
}

impl StageSink for DirSink {
    fn stage(&mut self, name: &str, bytes: Vec<u8>) -> Result<(), PipelineError> {
        let io = |path: &Path| {
            let path = path.to_path_buf();
            move |source| PipelineError::Io { path, source }
        };
        fs::create_dir_all(&self.dir).map_err(io(&self.dir))?;
        let path = self.dir.join(name);
        fs::write(&path, bytes).map_err(io(&path))
    }
}

/// Stage images kept in memory, in emission order.
#[derive(Default)]
pub struct MemorySink {
    pub stages: Vec<(String, Vec<u8>)>,
}

impl StageSink for MemorySink {
    fn stage(&mut self, name: &str, bytes: Vec<u8>) -> Result<(), PipelineError> {
        self.stages.push((name.to_string(), bytes));
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Localization {
    pub result: PlateResult<f64>,
    pub plate: GrayImage,
    /// Shape criteria were relaxed once before a candidate survived.
    pub relaxed: bool,
}

fn stage<T>(name: &'static str, r: platemorph_core::Result<T>) -> Result<T, PipelineError> {
    r.map_err(|source| PipelineError::Stage { stage: name, source })
}

fn edge_map(gray: &GrayImage, cfg: &PipelineConfig) -> Result<BinaryImage, PipelineError> {
    match cfg.edge_detector {
        EdgeDetector::Canny => stage("edge-detect", canny(gray, &cfg.canny)),
        EdgeDetector::SobelThreshold => {
            let grad = sobel::<f64>(gray, MagnitudeRule::Approximate);
            Ok(grad.threshold(cfg.sobel_threshold * f64::from(grad.max_magnitude())))
        }
    }
}

/// Run the full localization on `img`, handing stage images to `sink`.
///
/// `mask` limits where edges are searched; `None` searches the full frame.
pub fn run_pipeline(
    img: &RgbImage,
    mask: Option<&ImageMask>,
    cfg: &PipelineConfig,
    sink: &mut dyn StageSink,
) -> Result<Localization, PipelineError> {
    let (w, h) = (img.width(), img.height());
    sink.stage(STAGE_FILES[0], save_ppm(img))?;

    let gray = median_filter_3x3(&to_grayscale(img));
    sink.stage(STAGE_FILES[1], save_pgm(&gray))?;

    let mask = match mask {
        Some(m) => m.clone(),
        None => stage("mask", ImageMask::full(w, h))?,
    };
    sink.stage(STAGE_FILES[2], save_pgm(&stage("mask", mask.render(w, h))?))?;

    let binary = threshold(&gray, cfg.threshold);
    sink.stage(STAGE_FILES[3], save_pbm(&binary))?;
    sink.stage(STAGE_FILES[4], save_pbm(&stage("mask", mask_binary(&binary, &mask))?))?;

    let edges = stage("mask", mask_binary(&edge_map(&gray, cfg)?, &mask))?;
    let mut criteria = cfg.plate.criteria(w, h);
    let candidates = stage("candidate-mask", candidate_mask(&edges, &criteria))?;
    sink.stage(STAGE_FILES[5], save_pbm(&candidates))?;

    let open_se = stage("open", StructuringElement::rect(cfg.open_width, cfg.open_height))?;
    let opened = stage("open", open(&candidates, &open_se))?;
    sink.stage(STAGE_FILES[6], save_pbm(&opened))?;

    let regions = connected_components::<f64>(&opened, Connectivity::Eight);
    let grad = sobel::<f64>(&gray, MagnitudeRule::Exact);
    let mut relaxed = false;
    let result = match select_plate(&edges, &grad, &regions, &criteria) {
        Err(platemorph_core::Error::NoCandidate) => {
            relaxed = true;
            criteria.min_rectangularity /= 2.0;
            select_plate(&edges, &grad, &regions, &criteria)
        }
        other => other,
    }
    .map_err(|e| match e {
        platemorph_core::Error::NoCandidate => PipelineError::NoCandidate,
        source => PipelineError::Stage {
            stage: "select-plate",
            source,
        },
    })?;

    let overlay = stage("bbox", img.with_outline(result.bbox, OUTLINE))?;
    sink.stage(STAGE_FILES[7], save_ppm(&overlay))?;
    let plate = stage("crop", crop_plate(&gray, result.bbox))?;
    Ok(Localization { result, plate, relaxed })
}

/// Load a search mask from a P5 file; nonzero samples are searched.
pub fn load_mask(path: &Path) -> Result<ImageMask, MaskError> {
    let bytes = fs::read(path).map_err(|source| MaskError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let gray = load_pgm(&bytes).map_err(|source| MaskError::Decode {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(ImageMask::from_gray(&gray))
}

#[derive(Debug, Error)]
pub enum MaskError {
    #[error("reading mask {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("decoding mask {path}: {source}")]
    Decode {
        path: PathBuf,
        source: platemorph_core::Error,
    },
}
