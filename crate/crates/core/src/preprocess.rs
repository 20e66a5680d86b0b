//! Color-to-binary front end: luminance conversion, median denoising,
//! masked processing and global thresholding.

use crate::error::{Error, Result};
use crate::image::{BinaryImage, GrayImage, RgbImage};

/// Luminance `0.299 R + 0.587 G + 0.114 B`, rounded half-up.
///
/// Evaluated in integer thousandths so the rounding is exact.
pub fn to_grayscale(img: &RgbImage) -> GrayImage {
    let data = img
        .pixels()
        .map(|[r, g, b]| {
            let scaled = 299 * u32::from(r) + 587 * u32::from(g) + 114 * u32::from(b);
            ((scaled + 500) / 1000).min(255) as u8
        })
        .collect();
    GrayImage::new(img.width(), img.height(), data).expect("dimensions come from a valid image")
}

/// 3x3 median with replicate padding at the borders.
///
/// Every neighborhood holds exactly nine samples, so the median is always
/// the fifth order statistic and the even-count averaging rule never
/// applies.
pub fn median_filter_3x3(img: &GrayImage) -> GrayImage {
    let (w, h) = (img.width() as isize, img.height() as isize);
    let mut data = Vec::with_capacity(img.data().len());
    let mut window = [0u8; 9];
    for y in 0..h {
        for x in 0..w {
            let mut k = 0;
            for dy in -1..=1 {
                for dx in -1..=1 {
                    window[k] = img.get_clamped(x + dx, y + dy);
                    k += 1;
                }
            }
            let (_, median, _) = window.select_nth_unstable(4);
            data.push(*median);
        }
    }
    GrayImage::new(img.width(), img.height(), data).expect("same dimensions as input")
}

/// 8-bit mask selecting which pixels a stage processes (nonzero = included).
///
/// A mask smaller than the image it is applied to is anchored at (0, 0);
/// pixels beyond its extent are excluded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageMask {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl ImageMask {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        // reuse GrayImage's dimension checks
        let gray = GrayImage::new(width, height, data)?;
        Ok(Self::from_gray(&gray))
    }

    pub fn full(width: usize, height: usize) -> Result<Self> {
        Self::new(width, height, vec![255; width * height])
    }

    pub fn from_gray(img: &GrayImage) -> Self {
        Self {
            width: img.width(),
            height: img.height(),
            data: img.data().to_vec(),
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Whether pixel (x, y) of an image is selected; outside the mask means no.
    pub fn includes(&self, x: usize, y: usize) -> bool {
        x < self.width && y < self.height && self.data[y * self.width + x] != 0
    }

    /// Render as a 0/255 image sized like the inspection image.
    pub fn render(&self, width: usize, height: usize) -> Result<GrayImage> {
        GrayImage::from_fn(width, height, |x, y| if self.includes(x, y) { 255 } else { 0 })
    }

    /// Selected pixels as a binary image sized like the inspection image.
    pub fn to_binary(&self, width: usize, height: usize) -> Result<BinaryImage> {
        BinaryImage::from_fn(width, height, |x, y| self.includes(x, y))
    }

    fn check_fits(&self, width: usize, height: usize) -> Result<()> {
        if self.width > width || self.height > height {
            return Err(Error::Dimensions(format!(
                "mask {}x{} exceeds image {width}x{height}",
                self.width, self.height
            )));
        }
        Ok(())
    }
}

/// Apply `stage` to pixels under nonzero mask samples; copy the rest through.
pub fn apply_mask(img: &GrayImage, mask: &ImageMask, stage: impl Fn(u8) -> u8) -> Result<GrayImage> {
    mask.check_fits(img.width(), img.height())?;
    GrayImage::from_fn(img.width(), img.height(), |x, y| {
        let v = img.get(x, y);
        if mask.includes(x, y) {
            stage(v)
        } else {
            v
        }
    })
}

/// Keep object pixels only where the mask selects them.
pub fn mask_binary(img: &BinaryImage, mask: &ImageMask) -> Result<BinaryImage> {
    mask.check_fits(img.width(), img.height())?;
    BinaryImage::from_fn(img.width(), img.height(), |x, y| img.get(x, y) && mask.includes(x, y))
}

/// How the global threshold `T` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ThresholdSpec {
    Fixed(u8),
    /// `T` = floor of the mean sample value.
    #[default]
    GlobalMean,
}

impl ThresholdSpec {
    pub fn resolve(&self, img: &GrayImage) -> u8 {
        match *self {
            ThresholdSpec::Fixed(t) => t,
            ThresholdSpec::GlobalMean => {
                let sum: u64 = img.data().iter().map(|&v| u64::from(v)).sum();
                (sum / img.data().len() as u64) as u8
            }
        }
    }
}

/// Object (1) where the sample is strictly greater than `T`, else background (0).
pub fn threshold(img: &GrayImage, spec: ThresholdSpec) -> BinaryImage {
    let t = spec.resolve(img);
    let data = img.data().iter().map(|&v| u8::from(v > t)).collect();
    BinaryImage::new(img.width(), img.height(), data).expect("same dimensions as input")
}
