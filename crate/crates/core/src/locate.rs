//! Plate localization over a binary edge map.
//!
//! The edge map is dilated once with a horizontal line and once with a
//! vertical line; the pixels lit in both are dilated horizontally again,
//! fusing the dense vertical strokes of plate characters into a solid
//! block. Connected regions of that mask are then filtered by shape and
//! ranked by how many of their edge pixels are vertical.

use std::cmp::Ordering;
use std::collections::VecDeque;

use serde::Serialize;

use crate::edge::GradientMap;
use crate::error::{Error, Result};
use crate::image::{BBox, BinaryImage, GrayImage, PixelCoord};
use crate::morphology::{dilate, StructuringElement};
use crate::real::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Connectivity {
    Four,
    #[default]
    Eight,
}

impl Connectivity {
    fn offsets(self) -> &'static [(isize, isize)] {
        match self {
            Connectivity::Four => &[(0, -1), (-1, 0), (1, 0), (0, 1)],
            Connectivity::Eight => &[(-1, -1), (0, -1), (1, -1), (-1, 0), (1, 0), (-1, 1), (0, 1), (1, 1)],
        }
    }
}

/// A connected set of object pixels.
#[derive(Debug, Clone, PartialEq)]
pub struct Region<T> {
    pub pixels: Vec<PixelCoord>,
    pub bbox: BBox,
    pub centroid: (T, T),
}

impl<T: Real> Region<T> {
    /// Returns `None` for an empty pixel set.
    pub fn from_pixels(pixels: Vec<PixelCoord>) -> Option<Self> {
        let first = *pixels.first()?;
        let mut bbox = BBox::new(first.y, first.x, first.y, first.x);
        for p in &pixels {
            bbox.top = bbox.top.min(p.y);
            bbox.bottom = bbox.bottom.max(p.y);
            bbox.left = bbox.left.min(p.x);
            bbox.right = bbox.right.max(p.x);
        }
        let centroid = centroid_of(&pixels);
        Some(Self { pixels, bbox, centroid })
    }

    pub fn area(&self) -> usize {
        self.pixels.len()
    }

    /// Pixel count over bounding-box area, in (0, 1].
    pub fn rectangularity(&self) -> T {
        T::of_usize(self.area()) / T::of_usize(self.bbox.area())
    }

    /// Bounding-box width over height.
    pub fn aspect(&self) -> T {
        T::of_usize(self.bbox.width()) / T::of_usize(self.bbox.height())
    }
}

fn centroid_of<T: Real>(pixels: &[PixelCoord]) -> (T, T) {
    let n = T::of_usize(pixels.len());
    let sx: u64 = pixels.iter().map(|p| p.x as u64).sum();
    let sy: u64 = pixels.iter().map(|p| p.y as u64).sum();
    (T::from_u64(sx).unwrap() / n, T::from_u64(sy).unwrap() / n)
}

/// Centre of gravity: the mean column and mean row of the region's pixels.
pub fn region_centroid<T: Real>(region: &Region<T>) -> (T, T) {
    centroid_of(&region.pixels)
}

/// Maximal connected sets of object pixels, ordered by bbox top then left.
pub fn connected_components<T: Real>(img: &BinaryImage, connectivity: Connectivity) -> Vec<Region<T>> {
    let (w, h) = (img.width(), img.height());
    let mut seen = vec![false; w * h];
    let mut regions = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..w * h {
        if seen[start] || img.data()[start] == 0 {
            continue;
        }
        seen[start] = true;
        queue.push_back(start);
        let mut pixels = Vec::new();
        while let Some(i) = queue.pop_front() {
            let (x, y) = (i % w, i / w);
            pixels.push(PixelCoord::new(x, y));
            for &(dx, dy) in connectivity.offsets() {
                let (nx, ny) = (x as isize + dx, y as isize + dy);
                if nx < 0 || ny < 0 || nx >= w as isize || ny >= h as isize {
                    continue;
                }
                let j = ny as usize * w + nx as usize;
                if !seen[j] && img.data()[j] == 1 {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
        pixels.sort_unstable_by_key(|p| (p.y, p.x));
        regions.extend(Region::from_pixels(pixels));
    }
    regions.sort_by_key(|r| (r.bbox.top, r.bbox.left));
    regions
}

/// Extents of the object pixels found by scanning rows then columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BBoxScan {
    pub height: usize,
    pub width: usize,
    pub bbox: BBox,
}

pub fn region_bbox_scan(img: &BinaryImage) -> Result<BBoxScan> {
    let (w, h) = (img.width(), img.height());
    let row_has = |y: usize| (0..w).any(|x| img.get(x, y));
    let col_has = |x: usize| (0..h).any(|y| img.get(x, y));
    let top = (0..h).find(|&y| row_has(y)).ok_or(Error::EmptyImage)?;
    let bottom = (0..h).rev().find(|&y| row_has(y)).ok_or(Error::EmptyImage)?;
    let left = (0..w).find(|&x| col_has(x)).ok_or(Error::EmptyImage)?;
    let right = (0..w).rev().find(|&x| col_has(x)).ok_or(Error::EmptyImage)?;
    Ok(BBoxScan {
        height: bottom - top + 1,
        width: right - left + 1,
        bbox: BBox::new(top, left, bottom, right),
    })
}

/// Shape limits for plate candidates and the line lengths used to build
/// the candidate mask.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlateCriteria<T> {
    pub min_aspect: T,
    pub max_aspect: T,
    pub min_rectangularity: T,
    pub min_area: usize,
    pub max_area: usize,
    pub h_line_len: usize,
    pub v_line_len: usize,
}

impl<T: Real> PlateCriteria<T> {
    /// Defaults for an image of the given size: aspect 2 to 6,
    /// rectangularity at least 0.5, area between 0.1% and 10% of the frame.
    pub fn for_image(width: usize, height: usize) -> Self {
        Self::with_area_fractions(width, height, T::lit(0.001), T::lit(0.10))
    }

    pub fn with_area_fractions(width: usize, height: usize, min_frac: T, max_frac: T) -> Self {
        let total = T::of_usize(width * height);
        Self {
            min_aspect: T::lit(2.0),
            max_aspect: T::lit(6.0),
            min_rectangularity: T::lit(0.5),
            min_area: (min_frac * total).ceil().to_usize().unwrap_or(0),
            max_area: (max_frac * total).floor().to_usize().unwrap_or(usize::MAX),
            h_line_len: 15,
            v_line_len: 5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParams(m.to_string()));
        if !(self.min_aspect > T::zero() && self.min_aspect < self.max_aspect) {
            return bad("need 0 < min_aspect < max_aspect");
        }
        if !(self.min_rectangularity > T::zero() && self.min_rectangularity <= T::one()) {
            return bad("min_rectangularity must lie in (0, 1]");
        }
        if self.min_area >= self.max_area {
            return bad("min_area must be below max_area");
        }
        if self.h_line_len.is_multiple_of(2) || self.v_line_len.is_multiple_of(2) {
            return bad("line lengths must be odd");
        }
        Ok(())
    }

    pub fn accepts(&self, region: &Region<T>) -> bool {
        let aspect = region.aspect();
        region.rectangularity() >= self.min_rectangularity
            && aspect >= self.min_aspect
            && aspect <= self.max_aspect
            && (self.min_area..=self.max_area).contains(&region.area())
    }
}

/// Horizontal dilation of the AND of a horizontal and a vertical dilation.
pub fn candidate_mask<T: Real>(edges: &BinaryImage, crit: &PlateCriteria<T>) -> Result<BinaryImage> {
    crit.validate()?;
    let horizontal = StructuringElement::horizontal_line(crit.h_line_len)?;
    let vertical = StructuringElement::vertical_line(crit.v_line_len)?;
    let common = dilate(edges, &horizontal)?.and(&dilate(edges, &vertical)?)?;
    dilate(&common, &horizontal)
}

/// Fraction of the box covered by edge pixels whose horizontal gradient
/// dominates.
pub fn vertical_edge_density<T: Real>(edges: &BinaryImage, grad: &GradientMap<T>, bbox: BBox) -> T {
    let mut count = 0usize;
    for y in bbox.top..=bbox.bottom {
        for x in bbox.left..=bbox.right {
            if edges.get(x, y) && grad.is_vertical_edge(x, y) {
                count += 1;
            }
        }
    }
    T::of_usize(count) / T::of_usize(bbox.area())
}

/// A region that passed the shape filter, with its score.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate<T> {
    pub bbox: BBox,
    pub centroid: (T, T),
    pub area: usize,
    pub score: T,
}

/// Highest score wins; ties go to the larger area, then the topmost and
/// leftmost box.
pub fn best_candidate<T: Real>(candidates: &[Candidate<T>]) -> Option<&Candidate<T>> {
    candidates.iter().min_by(|a, b| {
        b.score
            .partial_cmp(&a.score)
            .unwrap_or(Ordering::Equal)
            .then(b.area.cmp(&a.area))
            .then(a.bbox.top.cmp(&b.bbox.top))
            .then(a.bbox.left.cmp(&b.bbox.left))
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlateResult<T> {
    pub bbox: BBox,
    pub centroid: (T, T),
    pub score: T,
    /// Regions that passed the shape filter.
    pub candidates_considered: usize,
}

#[derive(Serialize)]
struct CentroidRecord<T> {
    x: T,
    y: T,
}

#[derive(Serialize)]
struct PlateRecord<T> {
    bbox: BBox,
    centroid: CentroidRecord<T>,
    score: T,
    candidates: usize,
}

/// Serializes as `{"bbox":{..},"centroid":{"x":..,"y":..},"score":..,"candidates":..}`.
impl<T: Real + Serialize> Serialize for PlateResult<T> {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        PlateRecord {
            bbox: self.bbox,
            centroid: CentroidRecord {
                x: self.centroid.0,
                y: self.centroid.1,
            },
            score: self.score,
            candidates: self.candidates_considered,
        }
        .serialize(serializer)
    }
}

/// Filter regions by shape and return the one with the densest vertical edges.
pub fn select_plate<T: Real>(
    edges: &BinaryImage,
    grad: &GradientMap<T>,
    regions: &[Region<T>],
    crit: &PlateCriteria<T>,
) -> Result<PlateResult<T>> {
    crit.validate()?;
    if (edges.width(), edges.height()) != (grad.width(), grad.height()) {
        return Err(Error::Dimensions("edge map and gradient differ in size".into()));
    }
    let candidates: Vec<Candidate<T>> = regions
        .iter()
        .filter(|r| crit.accepts(r))
        .map(|r| Candidate {
            bbox: r.bbox,
            centroid: r.centroid,
            area: r.area(),
            score: vertical_edge_density(edges, grad, r.bbox),
        })
        .collect();
    let best = best_candidate(&candidates).ok_or(Error::NoCandidate)?;
    Ok(PlateResult {
        bbox: best.bbox,
        centroid: best.centroid,
        score: best.score,
        candidates_considered: candidates.len(),
    })
}

/// Sub-image covering `bbox` exactly.
pub fn crop_plate(img: &GrayImage, bbox: BBox) -> Result<GrayImage> {
    if !bbox.fits(img.width(), img.height()) {
        return Err(Error::OutOfBounds);
    }
    GrayImage::from_fn(bbox.width(), bbox.height(), |x, y| img.get(bbox.left + x, bbox.top + y))
}
