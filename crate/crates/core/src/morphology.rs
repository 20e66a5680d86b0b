//! Binary morphology over structuring elements with foreground, background
//! and don't-care cells.
//!
//! An element is laid over the image with its origin on the output pixel.
//! Pixels outside the image always read as background.

use crate::error::{Error, Result};
use crate::image::BinaryImage;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cell {
    Fg,
    Bg,
    DontCare,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructuringElement {
    width: usize,
    height: usize,
    cells: Vec<Cell>,
    origin: (usize, usize),
}

impl StructuringElement {
    pub fn new(width: usize, height: usize, cells: Vec<Cell>, origin: (usize, usize)) -> Result<Self> {
        if width == 0 || height == 0 || cells.len() != width * height {
            return Err(Error::InvalidStructuringElement(format!(
                "{} cells for a {width}x{height} grid",
                cells.len()
            )));
        }
        if origin.0 >= width || origin.1 >= height {
            return Err(Error::InvalidStructuringElement(format!(
                "origin {origin:?} outside {width}x{height} grid"
            )));
        }
        Ok(Self {
            width,
            height,
            cells,
            origin,
        })
    }

    /// Parse rows of `1` (foreground), `0` (background) and `.` (don't care),
    /// with the origin at the grid centre.
    pub fn from_rows(rows: &[&str]) -> Result<Self> {
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.len());
        let mut cells = Vec::with_capacity(width * height);
        for row in rows {
            if row.len() != width {
                return Err(Error::InvalidStructuringElement("ragged rows".into()));
            }
            for b in row.bytes() {
                cells.push(match b {
                    b'1' => Cell::Fg,
                    b'0' => Cell::Bg,
                    b'.' => Cell::DontCare,
                    other => {
                        return Err(Error::InvalidStructuringElement(format!(
                            "unknown cell {:?}",
                            other as char
                        )))
                    }
                });
            }
        }
        Self::new(width, height, cells, (width / 2, height / 2))
    }

    /// All-foreground `size` x `size` square centred on its middle cell.
    pub fn square(size: usize) -> Result<Self> {
        Self::new(size, size, vec![Cell::Fg; size * size], (size / 2, size / 2))
    }

    /// All-foreground box with the origin at the centre; sides must be odd.
    pub fn rect(width: usize, height: usize) -> Result<Self> {
        if width.is_multiple_of(2) || height.is_multiple_of(2) {
            return Err(Error::InvalidStructuringElement(format!(
                "{width}x{height} box has no centre cell"
            )));
        }
        Self::new(width, height, vec![Cell::Fg; width * height], (width / 2, height / 2))
    }

    /// `1 x length` line; `length` must be odd.
    pub fn horizontal_line(length: usize) -> Result<Self> {
        Self::rect(length, 1)
    }

    /// `length x 1` line; `length` must be odd.
    pub fn vertical_line(length: usize) -> Result<Self> {
        Self::rect(1, length)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn origin(&self) -> (usize, usize) {
        self.origin
    }

    pub fn cell(&self, x: usize, y: usize) -> Cell {
        self.cells[y * self.width + x]
    }

    /// Rotate 180 degrees about the origin.
    pub fn reflect(&self) -> Self {
        let cells = self.cells.iter().rev().copied().collect();
        let origin = (self.width - 1 - self.origin.0, self.height - 1 - self.origin.1);
        Self {
            width: self.width,
            height: self.height,
            cells,
            origin,
        }
    }

    /// Offsets from the origin of every cell of the given kind.
    pub fn offsets(&self, kind: Cell) -> Vec<(isize, isize)> {
        let (ox, oy) = (self.origin.0 as isize, self.origin.1 as isize);
        (0..self.height)
            .flat_map(|y| (0..self.width).map(move |x| (x, y)))
            .filter(|&(x, y)| self.cell(x, y) == kind)
            .map(|(x, y)| (x as isize - ox, y as isize - oy))
            .collect()
    }

    fn require_no_background(&self) -> Result<()> {
        if self.cells.contains(&Cell::Bg) {
            return Err(Error::InvalidStructuringElement(
                "background cells are only meaningful for hit-and-miss".into(),
            ));
        }
        Ok(())
    }
}

fn map_offsets(img: &BinaryImage, f: impl Fn(isize, isize) -> bool) -> BinaryImage {
    BinaryImage::from_fn(img.width(), img.height(), |x, y| f(x as isize, y as isize)).expect("same dimensions as input")
}

/// Object wherever any foreground cell of `se` covers an object pixel.
pub fn dilate(img: &BinaryImage, se: &StructuringElement) -> Result<BinaryImage> {
    se.require_no_background()?;
    let fg = se.offsets(Cell::Fg);
    Ok(map_offsets(img, |x, y| {
        fg.iter().any(|&(dx, dy)| img.get_or_zero(x + dx, y + dy))
    }))
}

/// Object wherever every foreground cell of `se` covers an object pixel.
pub fn erode(img: &BinaryImage, se: &StructuringElement) -> Result<BinaryImage> {
    se.require_no_background()?;
    let fg = se.offsets(Cell::Fg);
    Ok(map_offsets(img, |x, y| {
        fg.iter().all(|&(dx, dy)| img.get_or_zero(x + dx, y + dy))
    }))
}

/// Largest horizontal and vertical reach of the foreground cells.
fn reach(se: &StructuringElement) -> (usize, usize) {
    se.offsets(Cell::Fg).iter().fold((0, 0), |(mx, my), &(dx, dy)| {
        (mx.max(dx.unsigned_abs()), my.max(dy.unsigned_abs()))
    })
}

/// Run `op` on a zero-padded copy wide enough that nothing it does can
/// touch the padding edge, then cut the original frame back out.
fn on_padded_canvas(
    img: &BinaryImage,
    se: &StructuringElement,
    op: impl Fn(&BinaryImage) -> Result<BinaryImage>,
) -> Result<BinaryImage> {
    let (mx, my) = reach(se);
    let (mx, my) = (2 * mx, 2 * my);
    let (w, h) = (img.width(), img.height());
    let canvas = BinaryImage::from_fn(w + 2 * mx, h + 2 * my, |x, y| {
        img.get_or_zero(x as isize - mx as isize, y as isize - my as isize)
    })?;
    let out = op(&canvas)?;
    BinaryImage::from_fn(w, h, |x, y| out.get(x + mx, y + my))
}

/// Erosion followed by dilation with the reflected element.
///
/// For the symmetric elements used in practice (boxes, centred lines) the
/// reflection is the element itself. The pair runs on a zero-padded
/// canvas, so the result is the opening of the object set taken over an
/// unbounded background.
pub fn open(img: &BinaryImage, se: &StructuringElement) -> Result<BinaryImage> {
    se.require_no_background()?;
    let reflected = se.reflect();
    on_padded_canvas(img, se, |c| dilate(&erode(c, se)?, &reflected))
}

/// Dilation followed by erosion with the reflected element.
///
/// Runs on a zero-padded canvas like [`open`]; without the padding the
/// erosion would strip object pixels on the image border and closing
/// would no longer contain its input.
pub fn close(img: &BinaryImage, se: &StructuringElement) -> Result<BinaryImage> {
    se.require_no_background()?;
    let reflected = se.reflect();
    on_padded_canvas(img, se, |c| erode(&dilate(c, se)?, &reflected))
}

/// Object where foreground cells cover object pixels and background cells
/// cover background pixels at the same time.
pub fn hit_and_miss(img: &BinaryImage, se: &StructuringElement) -> Result<BinaryImage> {
    let fg = se.offsets(Cell::Fg);
    let bg = se.offsets(Cell::Bg);
    Ok(map_offsets(img, |x, y| {
        fg.iter().all(|&(dx, dy)| img.get_or_zero(x + dx, y + dy))
            && bg.iter().all(|&(dx, dy)| !img.get_or_zero(x + dx, y + dy))
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn img(rows: &[&str]) -> BinaryImage {
        BinaryImage::from_rows(rows).unwrap()
    }

    #[test]
    fn constructors_validate() {
        assert!(StructuringElement::horizontal_line(4).is_err());
        assert!(StructuringElement::vertical_line(0).is_err());
        assert!(StructuringElement::new(2, 2, vec![Cell::Fg; 4], (2, 0)).is_err());
        assert!(StructuringElement::new(2, 2, vec![Cell::Fg; 3], (0, 0)).is_err());
        let line = StructuringElement::horizontal_line(5).unwrap();
        assert_eq!((line.width(), line.height(), line.origin()), (5, 1, (2, 0)));
        let v = StructuringElement::vertical_line(3).unwrap();
        assert_eq!(v.offsets(Cell::Fg), vec![(0, -1), (0, 0), (0, 1)]);
    }

    #[test]
    fn background_cells_rejected_outside_hit_and_miss() {
        let se = StructuringElement::from_rows(&["010"]).unwrap();
        let image = BinaryImage::zeros(3, 3).unwrap();
        assert!(matches!(dilate(&image, &se), Err(Error::InvalidStructuringElement(_))));
        assert!(matches!(erode(&image, &se), Err(Error::InvalidStructuringElement(_))));
        assert!(hit_and_miss(&image, &se).is_ok());
    }

    #[test]
    fn dilate_point_with_square() {
        let point = img(&["00000", "00000", "00100", "00000", "00000"]);
        let out = dilate(&point, &StructuringElement::square(3).unwrap()).unwrap();
        assert_eq!(out, img(&["00000", "01110", "01110", "01110", "00000"]));
    }

    #[test]
    fn dilate_point_with_line() {
        let point = img(&["0000000", "0001000", "0000000"]);
        let out = dilate(&point, &StructuringElement::horizontal_line(5).unwrap()).unwrap();
        assert_eq!(out, img(&["0000000", "0111110", "0000000"]));
    }

    #[test]
    fn empty_stays_empty() {
        let empty = BinaryImage::zeros(6, 4).unwrap();
        let se = StructuringElement::square(3).unwrap();
        assert!(dilate(&empty, &se).unwrap().is_empty());
        assert!(erode(&empty, &se).unwrap().is_empty());
        assert!(close(&empty, &se).unwrap().is_empty());
    }

    #[test]
    fn erode_block_to_centre() {
        let block = img(&["00000", "01110", "01110", "01110", "00000"]);
        let out = erode(&block, &StructuringElement::square(3).unwrap()).unwrap();
        assert_eq!(out, img(&["00000", "00000", "00100", "00000", "00000"]));
    }

    #[test]
    fn erode_all_ones_loses_border() {
        let ones = BinaryImage::ones(5, 4).unwrap();
        let out = erode(&ones, &StructuringElement::square(3).unwrap()).unwrap();
        assert_eq!(out, img(&["00000", "01110", "01110", "00000"]));
    }

    #[test]
    fn opening_removes_speck_keeps_block() {
        let se = StructuringElement::square(3).unwrap();
        let speck = img(&["000", "010", "000"]);
        assert!(open(&speck, &se).unwrap().is_empty());
        let block = img(&["00000", "01110", "01110", "01110", "00000"]);
        assert_eq!(open(&block, &se).unwrap(), block);
    }

    #[test]
    fn closing_fills_one_pixel_gap() {
        let gapped = img(&["0000000", "0010100", "0000000"]);
        let out = close(&gapped, &StructuringElement::horizontal_line(3).unwrap()).unwrap();
        assert_eq!(out, img(&["0000000", "0011100", "0000000"]));
    }

    #[test]
    fn closing_keeps_border_pixels() {
        let ones = BinaryImage::ones(4, 3).unwrap();
        assert_eq!(close(&ones, &StructuringElement::square(3).unwrap()).unwrap(), ones);
        let edge_run = img(&["1101", "0000"]);
        let out = close(&edge_run, &StructuringElement::horizontal_line(3).unwrap()).unwrap();
        assert_eq!(out, img(&["1111", "0000"]));
    }

    #[test]
    fn hit_and_miss_trivial_elements() {
        let image = img(&["0110", "1001", "0000"]);
        let all_dc = StructuringElement::from_rows(&["...", "...", "..."]).unwrap();
        assert_eq!(hit_and_miss(&image, &all_dc).unwrap(), BinaryImage::ones(4, 3).unwrap());
        let single = StructuringElement::from_rows(&["1"]).unwrap();
        assert_eq!(hit_and_miss(&image, &single).unwrap(), image);
    }

    #[test]
    fn isolated_point_detector() {
        let image = img(&["0000000", "0100000", "0000000", "0000110", "0000000"]);
        let detector = StructuringElement::from_rows(&["000", "010", "000"]).unwrap();
        let out = hit_and_miss(&image, &detector).unwrap();
        assert_eq!(out, img(&["0000000", "0100000", "0000000", "0000000", "0000000"]));
    }

    #[test]
    fn reflect_rotates_about_origin() {
        let se = StructuringElement::new(3, 1, vec![Cell::Fg, Cell::Fg, Cell::DontCare], (0, 0)).unwrap();
        let r = se.reflect();
        assert_eq!(r.origin(), (2, 0));
        assert_eq!(r.offsets(Cell::Fg), vec![(-1, 0), (0, 0)]);
        assert_eq!(r.reflect(), se);
    }

    #[test]
    fn asymmetric_opening_stays_anti_extensive() {
        // L-shaped element without its reflection in the offset set
        let se = StructuringElement::from_rows(&["11.", "1..", "..."]).unwrap();
        let image = img(&["0110", "0111", "1100", "0010"]);
        let opened = open(&image, &se).unwrap();
        assert!(opened.is_subset_of(&image));
        let closed = close(&image, &se).unwrap();
        assert!(image.is_subset_of(&closed));
    }
}
