//! Batch scoring of a generated corpus against its sidecars.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Instant;

use platemorph_core::netpbm::load_ppm;
use platemorph_core::preprocess::ImageMask;
use platemorph_core::BBox;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::config::PipelineConfig;
use crate::pipeline::{run_pipeline, NoDump, PipelineError};
use crate::synth::{sidecar_path, Truth};

/// IoU at or above this counts as a hit.
pub const HIT_IOU: f64 = 0.5;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("reading {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("missing sidecar {0}")]
    MissingSidecar(PathBuf),
    #[error("{path}: {msg}")]
    Decode { path: PathBuf, msg: String },
    #[error("{path}: {source}")]
    Pipeline { path: PathBuf, source: PipelineError },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ImageRecord {
    pub image: String,
    pub truth: BBox,
    pub predicted: Option<BBox>,
    pub iou: f64,
    pub hit: bool,
    pub runtime_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub n: usize,
    pub hits: usize,
    pub hit_rate: Option<f64>,
    pub mean_iou: Option<f64>,
    pub mean_runtime_ms: Option<f64>,
}

impl Summary {
    /// Aggregate records; the result does not depend on their order.
    pub fn from_records(records: &[ImageRecord]) -> Self {
        let mut sorted: Vec<&ImageRecord> = records.iter().collect();
        sorted.sort_by(|a, b| a.image.cmp(&b.image));
        let n = sorted.len();
        let hits = sorted.iter().filter(|r| r.hit).count();
        let mean = |f: fn(&ImageRecord) -> f64| (n > 0).then(|| sorted.iter().map(|r| f(r)).sum::<f64>() / n as f64);
        Self {
            n,
            hits,
            hit_rate: (n > 0).then(|| hits as f64 / n as f64),
            mean_iou: mean(|r| r.iou),
            mean_runtime_ms: mean(|r| r.runtime_ms),
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> EvalError + '_ {
    move |source| EvalError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Corpus images (`*.ppm`) in name order.
pub fn corpus_images(dir: &Path) -> Result<Vec<PathBuf>, EvalError> {
    let mut images: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(io_err(dir))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "ppm"))
        .collect();
    images.sort();
    Ok(images)
}

pub fn read_truth(image: &Path) -> Result<BBox, EvalError> {
    let path = sidecar_path(image);
    if !path.is_file() {
        return Err(EvalError::MissingSidecar(path));
    }
    let text = fs::read_to_string(&path).map_err(io_err(&path))?;
    serde_json::from_str::<Truth>(&text)
        .map(|t| t.bbox)
        .map_err(|e| EvalError::Decode {
            path,
            msg: e.to_string(),
        })
}

fn score_image(path: &Path, mask: Option<&ImageMask>, cfg: &PipelineConfig) -> Result<ImageRecord, EvalError> {
    let truth = read_truth(path)?;
    let bytes = fs::read(path).map_err(io_err(path))?;
    let img = load_ppm(&bytes).map_err(|e| EvalError::Decode {
        path: path.to_path_buf(),
        msg: e.to_string(),
    })?;
    let start = Instant::now();
    let predicted = match run_pipeline(&img, mask, cfg, &mut NoDump) {
        Ok(loc) => Some(loc.result.bbox),
        Err(PipelineError::NoCandidate) => None,
        Err(source) => {
            return Err(EvalError::Pipeline {
                path: path.to_path_buf(),
                source,
            })
        }
    };
    let runtime_ms = start.elapsed().as_secs_f64() * 1000.0;
    let iou = predicted.map_or(0.0, |p| p.iou(&truth));
    Ok(ImageRecord {
        image: path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default(),
        truth,
        predicted,
        iou,
        hit: iou >= HIT_IOU,
        runtime_ms,
    })
}

/// Run the pipeline on every corpus image, in parallel, and score each
/// prediction. Records come back in name order.
pub fn evaluate(
    dir: &Path,
    mask: Option<&ImageMask>,
    cfg: &PipelineConfig,
) -> Result<(Vec<ImageRecord>, Summary), EvalError> {
    let images = corpus_images(dir)?;
    // check every sidecar before spending time on the pipeline
    for img in &images {
        let side = sidecar_path(img);
        if !side.is_file() {
            return Err(EvalError::MissingSidecar(side));
        }
    }
    let records = images
        .par_iter()
        .map(|p| score_image(p, mask, cfg))
        .collect::<Result<Vec<_>, _>>()?;
    let summary = Summary::from_records(&records);
    Ok((records, summary))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(name: &str, iou: f64) -> ImageRecord {
        ImageRecord {
            image: name.into(),
            truth: BBox::new(0, 0, 1, 1),
            predicted: None,
            iou,
            hit: iou >= HIT_IOU,
            runtime_ms: 1.0,
        }
    }

    #[test]
    fn empty_summary_has_null_rates() {
        let s = Summary::from_records(&[]);
        assert_eq!((s.n, s.hits), (0, 0));
        assert_eq!(
            serde_json::to_string(&s).unwrap(),
            r#"{"n":0,"hits":0,"hit_rate":null,"mean_iou":null,"mean_runtime_ms":null}"#
        );
    }

    #[test]
    fn summary_ignores_record_order() {
        let a = vec![
            record("a", 0.1),
            record("b", 0.7),
            record("c", 0.3333),
            record("d", 1.0),
        ];
        let mut b = a.clone();
        b.reverse();
        b.swap(0, 2);
        assert_eq!(Summary::from_records(&a), Summary::from_records(&b));
        let s = Summary::from_records(&a);
        assert_eq!(s.hits, 2);
        assert_eq!(s.hit_rate, Some(0.5));
    }
}
