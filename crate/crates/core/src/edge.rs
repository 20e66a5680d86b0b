//! Gradient edge detection: the Sobel operator and the Canny detector
//! (Gaussian smoothing, Sobel gradient, non-maximal suppression,
//! hysteresis tracking).
//!
//! Kernels are applied by correlation over replicate-padded borders.
//! Orientation follows the convention that 0 means intensity rises from
//! left to right, with angles measured anticlockwise (so positive `gy`
//! means intensity rises towards the top of the image).

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::image::{BinaryImage, GrayImage};
use crate::real::Real;

/// Horizontal-derivative kernel, rows top to bottom.
pub const SOBEL_X: [[i32; 3]; 3] = [[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]];
/// Vertical-derivative kernel, `SOBEL_X` rotated by 90 degrees.
pub const SOBEL_Y: [[i32; 3]; 3] = [[1, 2, 1], [0, 0, 0], [-1, -2, -1]];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MagnitudeRule {
    /// `sqrt(gx^2 + gy^2)` rounded to the nearest integer.
    #[default]
    Exact,
    /// `|gx| + |gy|`.
    Approximate,
}

impl MagnitudeRule {
    pub fn apply(self, gx: i32, gy: i32) -> u32 {
        match self {
            MagnitudeRule::Exact => {
                let sq = i64::from(gx).pow(2) + i64::from(gy).pow(2);
                // never a tie: (n + 0.5)^2 is not an integer
                (sq as f64).sqrt().round() as u32
            }
            MagnitudeRule::Approximate => gx.unsigned_abs() + gy.unsigned_abs(),
        }
    }
}

/// Per-pixel gradient components, magnitude and orientation (radians).
#[derive(Debug, Clone, PartialEq)]
pub struct GradientMap<T> {
    width: usize,
    height: usize,
    gx: Vec<i32>,
    gy: Vec<i32>,
    magnitude: Vec<u32>,
    orientation: Vec<T>,
}

impl<T: Real> GradientMap<T> {
    pub fn from_parts(
        width: usize,
        height: usize,
        gx: Vec<i32>,
        gy: Vec<i32>,
        magnitude: Vec<u32>,
        orientation: Vec<T>,
    ) -> Result<Self> {
        let n = width * height;
        if width == 0 || height == 0 || [gx.len(), gy.len(), magnitude.len(), orientation.len()] != [n; 4] {
            return Err(Error::Dimensions(format!(
                "gradient planes do not match {width}x{height}"
            )));
        }
        Ok(Self {
            width,
            height,
            gx,
            gy,
            magnitude,
            orientation,
        })
    }

    /// Map carrying only magnitudes, with zero components and orientation.
    pub fn from_magnitudes(width: usize, height: usize, magnitude: Vec<u32>) -> Result<Self> {
        let n = magnitude.len();
        Self::from_parts(width, height, vec![0; n], vec![0; n], magnitude, vec![T::zero(); n])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn gx(&self, x: usize, y: usize) -> i32 {
        self.gx[y * self.width + x]
    }

    pub fn gy(&self, x: usize, y: usize) -> i32 {
        self.gy[y * self.width + x]
    }

    pub fn magnitude(&self, x: usize, y: usize) -> u32 {
        self.magnitude[y * self.width + x]
    }

    pub fn orientation(&self, x: usize, y: usize) -> T {
        self.orientation[y * self.width + x]
    }

    pub fn magnitudes(&self) -> &[u32] {
        &self.magnitude
    }

    pub fn max_magnitude(&self) -> u32 {
        self.magnitude.iter().copied().max().unwrap_or(0)
    }

    /// Horizontal change dominates: the pixel lies on a vertical edge.
    pub fn is_vertical_edge(&self, x: usize, y: usize) -> bool {
        let i = y * self.width + x;
        self.gx[i].abs() > self.gy[i].abs()
    }

    /// Magnitudes scaled linearly so the maximum maps to 255.
    pub fn to_gray(&self) -> GrayImage {
        let max = u64::from(self.max_magnitude().max(1));
        let data = self
            .magnitude
            .iter()
            .map(|&m| ((u64::from(m) * 255 + max / 2) / max) as u8)
            .collect();
        GrayImage::new(self.width, self.height, data).expect("gradient map has valid dimensions")
    }

    /// Object wherever the magnitude is strictly above `t`.
    pub fn threshold(&self, t: T) -> BinaryImage {
        let data = self.magnitude.iter().map(|&m| u8::from(mag_as::<T>(m) > t)).collect();
        BinaryImage::new(self.width, self.height, data).expect("gradient map has valid dimensions")
    }
}

fn mag_as<T: Real>(m: u32) -> T {
    T::from_u32(m).expect("u32 fits any float")
}

fn correlate3(window: &[u8; 9], kernel: &[[i32; 3]; 3]) -> i32 {
    kernel
        .iter()
        .flatten()
        .zip(window)
        .map(|(&k, &v)| k * i32::from(v))
        .sum()
}

fn window3(img: &GrayImage, x: usize, y: usize) -> [u8; 9] {
    let mut w = [0u8; 9];
    let (x, y) = (x as isize, y as isize);
    for (k, slot) in w.iter_mut().enumerate() {
        let dx = (k % 3) as isize - 1;
        let dy = (k / 3) as isize - 1;
        *slot = img.get_clamped(x + dx, y + dy);
    }
    w
}

/// Sobel gradient of `img`.
pub fn sobel<T: Real>(img: &GrayImage, rule: MagnitudeRule) -> GradientMap<T> {
    let n = img.width() * img.height();
    let mut gx = Vec::with_capacity(n);
    let mut gy = Vec::with_capacity(n);
    let mut magnitude = Vec::with_capacity(n);
    let mut orientation = Vec::with_capacity(n);
    for y in 0..img.height() {
        for x in 0..img.width() {
            let w = window3(img, x, y);
            let (cx, cy) = (correlate3(&w, &SOBEL_X), correlate3(&w, &SOBEL_Y));
            gx.push(cx);
            gy.push(cy);
            magnitude.push(rule.apply(cx, cy));
            orientation.push(T::from_i32(cy).unwrap().atan2(T::from_i32(cx).unwrap()));
        }
    }
    GradientMap {
        width: img.width(),
        height: img.height(),
        gx,
        gy,
        magnitude,
        orientation,
    }
}

/// Single-pass approximate magnitude over a 3x3 window `P1..P9` (row-major).
pub fn sobel_pseudo_magnitude(p: [u8; 9]) -> u32 {
    let p = p.map(i32::from);
    let rows = (p[0] + 2 * p[1] + p[2]) - (p[6] + 2 * p[7] + p[8]);
    let cols = (p[2] + 2 * p[5] + p[8]) - (p[0] + 2 * p[3] + p[6]);
    rows.unsigned_abs() + cols.unsigned_abs()
}

/// Normalized 1-D Gaussian sampled at integer offsets `-radius..=radius`.
pub fn gaussian_kernel<T: Real>(sigma: T, radius: usize) -> Result<Vec<T>> {
    if sigma.is_nan() || sigma <= T::zero() || radius == 0 {
        return Err(Error::InvalidParams(format!(
            "gaussian needs sigma > 0 and radius >= 1, got {sigma} and {radius}"
        )));
    }
    let two_var = T::lit(2.0) * sigma * sigma;
    let raw: Vec<T> = (-(radius as isize)..=radius as isize)
        .map(|k| {
            let k = T::from_isize(k).unwrap();
            (-(k * k) / two_var).exp()
        })
        .collect();
    let total = raw.iter().fold(T::zero(), |a, &b| a + b);
    Ok(raw.into_iter().map(|w| w / total).collect())
}

/// Separable Gaussian blur, rounded to the nearest integer at the end.
pub fn gaussian_smooth<T: Real>(img: &GrayImage, sigma: T, radius: usize) -> Result<GrayImage> {
    let kernel = gaussian_kernel(sigma, radius)?;
    let (w, h) = (img.width(), img.height());
    let r = radius as isize;
    let mut rows = vec![T::zero(); w * h];
    for y in 0..h {
        for x in 0..w {
            rows[y * w + x] = kernel.iter().enumerate().fold(T::zero(), |acc, (k, &wt)| {
                let v = img.get_clamped(x as isize + k as isize - r, y as isize);
                acc + wt * T::from_u8(v).unwrap()
            });
        }
    }
    let max_y = h as isize - 1;
    GrayImage::from_fn(w, h, |x, y| {
        let v = kernel.iter().enumerate().fold(T::zero(), |acc, (k, &wt)| {
            let yy = (y as isize + k as isize - r).clamp(0, max_y) as usize;
            acc + wt * rows[yy * w + x]
        });
        v.round().max(T::zero()).min(T::lit(255.0)).to_u8().unwrap()
    })
}

/// Gradient direction quantized to 0, 45, 90 or 135 degrees.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    D0,
    D45,
    D90,
    D135,
}

impl Direction {
    /// Bins of 45 degrees centred on each direction, e.g. [-22.5, 22.5) -> 0.
    pub fn quantize<T: Real>(theta: T) -> Self {
        let deg = theta.to_degrees().to_f64().unwrap().rem_euclid(180.0);
        match deg {
            d if d < 22.5 => Direction::D0,
            d if d < 67.5 => Direction::D45,
            d if d < 112.5 => Direction::D90,
            d if d < 157.5 => Direction::D135,
            _ => Direction::D0,
        }
    }

    /// Image-space neighbour offsets along the gradient; the first one
    /// precedes the pixel in raster order.
    pub fn neighbours(self) -> [(isize, isize); 2] {
        match self {
            Direction::D0 => [(-1, 0), (1, 0)],
            // up-right in a y-up frame is (x+1, y-1) on the raster
            Direction::D45 => [(1, -1), (-1, 1)],
            Direction::D90 => [(0, -1), (0, 1)],
            Direction::D135 => [(-1, -1), (1, 1)],
        }
    }
}

/// Keep magnitudes that are local maxima across the edge.
///
/// A pixel survives when its magnitude is strictly greater than the
/// neighbour preceding it in raster order and at least the one following
/// it, so a ridge two pixels wide with equal heights keeps exactly one
/// pixel. Neighbours outside the image count as 0. Suppressed pixels
/// have every field zeroed.
pub fn non_max_suppression<T: Real>(grad: &GradientMap<T>) -> GradientMap<T> {
    let (w, h) = (grad.width as isize, grad.height as isize);
    let at = |x: isize, y: isize| -> u32 {
        if x < 0 || y < 0 || x >= w || y >= h {
            0
        } else {
            grad.magnitude[(y * w + x) as usize]
        }
    };
    let mut out = grad.clone();
    for y in 0..h {
        for x in 0..w {
            let i = (y * w + x) as usize;
            let m = grad.magnitude[i];
            if m == 0 {
                continue;
            }
            let [(bx, by), (fx, fy)] = Direction::quantize(grad.orientation[i]).neighbours();
            let keep = m > at(x + bx, y + by) && m >= at(x + fx, y + fy);
            if !keep {
                out.gx[i] = 0;
                out.gy[i] = 0;
                out.magnitude[i] = 0;
                out.orientation[i] = T::zero();
            }
        }
    }
    out
}

/// Two-level edge tracking.
///
/// Pixels with magnitude above `t_high` seed the tracking, which then
/// spreads through 8-connected pixels whose magnitude is above `t_low`.
pub fn hysteresis<T: Real>(grad: &GradientMap<T>, t_high: T, t_low: T) -> Result<BinaryImage> {
    if t_high.is_nan() || t_low.is_nan() || t_high <= t_low {
        return Err(Error::ThresholdOrder);
    }
    let (w, h) = (grad.width, grad.height);
    let weak: Vec<bool> = grad.magnitude.iter().map(|&m| mag_as::<T>(m) > t_low).collect();
    let mut out = vec![0u8; w * h];
    let mut queue = VecDeque::new();
    for (i, &m) in grad.magnitude.iter().enumerate() {
        if mag_as::<T>(m) > t_high && out[i] == 0 {
            out[i] = 1;
            queue.push_back(i);
            while let Some(j) = queue.pop_front() {
                let (x, y) = ((j % w) as isize, (j / w) as isize);
                for dy in -1..=1 {
                    for dx in -1..=1 {
                        let (nx, ny) = (x + dx, y + dy);
                        if nx < 0 || ny < 0 || nx >= w as isize || ny >= h as isize {
                            continue;
                        }
                        let k = ny as usize * w + nx as usize;
                        if weak[k] && out[k] == 0 {
                            out[k] = 1;
                            queue.push_back(k);
                        }
                    }
                }
            }
        }
    }
    BinaryImage::new(w, h, out)
}

/// Canny settings. `high` and `low` are fractions of the largest
/// magnitude left after non-maximal suppression.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CannyParams<T> {
    pub sigma: T,
    pub radius: usize,
    pub high: T,
    pub low: T,
}

impl<T: Real> Default for CannyParams<T> {
    fn default() -> Self {
        Self {
            sigma: T::one(),
            radius: 2,
            high: T::lit(0.20),
            low: T::lit(0.10),
        }
    }
}

impl<T: Real> CannyParams<T> {
    pub fn validate(&self) -> Result<()> {
        if self.sigma.is_nan() || self.sigma <= T::zero() || self.radius == 0 {
            return Err(Error::InvalidParams("canny needs sigma > 0 and radius >= 1".into()));
        }
        if !(self.high > self.low && self.low > T::zero()) {
            return Err(Error::ThresholdOrder);
        }
        Ok(())
    }
}

/// Smooth, take the exact Sobel gradient, thin it and track it.
pub fn canny<T: Real>(img: &GrayImage, params: &CannyParams<T>) -> Result<BinaryImage> {
    params.validate()?;
    let smoothed = gaussian_smooth(img, params.sigma, params.radius)?;
    let thin = non_max_suppression(&sobel::<T>(&smoothed, MagnitudeRule::Exact));
    let max = mag_as::<T>(thin.max_magnitude());
    if max == T::zero() {
        return BinaryImage::zeros(img.width(), img.height());
    }
    hysteresis(&thin, params.high * max, params.low * max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn step(width: usize, height: usize, at: usize) -> GrayImage {
        GrayImage::from_fn(width, height, |x, _| if x < at { 0 } else { 255 }).unwrap()
    }

    #[test]
    fn kernels_are_rotations_and_zero_sum() {
        for k in [SOBEL_X, SOBEL_Y] {
            assert_eq!(k.iter().flatten().sum::<i32>(), 0);
        }
        // rotate SOBEL_X by 90 degrees anticlockwise: new[r][c] = old[c][2-r]
        let mut rot = [[0; 3]; 3];
        for r in 0..3 {
            for c in 0..3 {
                rot[r][c] = SOBEL_X[c][2 - r];
            }
        }
        assert_eq!(rot, SOBEL_Y);
    }

    #[test]
    fn constant_image_has_no_gradient() {
        let g = sobel::<f64>(&GrayImage::filled(5, 4, 77).unwrap(), MagnitudeRule::Approximate);
        assert_eq!(g.max_magnitude(), 0);
        assert!((0..4).all(|y| (0..5).all(|x| g.gx(x, y) == 0 && g.gy(x, y) == 0)));
    }

    #[test]
    fn vertical_step_gives_full_response() {
        let img = step(6, 4, 3);
        for rule in [MagnitudeRule::Approximate, MagnitudeRule::Exact] {
            let g = sobel::<f32>(&img, rule);
            for y in 0..4 {
                for x in [2, 3] {
                    assert_eq!(g.gx(x, y), 1020);
                    assert_eq!(g.gy(x, y), 0);
                    assert_eq!(g.magnitude(x, y), 1020);
                    assert_eq!(g.orientation(x, y), 0.0);
                }
                assert_eq!(g.magnitude(0, y), 0);
            }
        }
    }

    #[test]
    fn orientation_points_up_when_top_is_bright() {
        let img = GrayImage::from_fn(3, 4, |_, y| if y < 2 { 200 } else { 0 }).unwrap();
        let g = sobel::<f64>(&img, MagnitudeRule::Exact);
        assert!(g.gy(1, 1) > 0);
        assert!((g.orientation(1, 1) - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn pseudo_magnitude_examples() {
        assert_eq!(sobel_pseudo_magnitude([9; 9]), 0);
        assert_eq!(sobel_pseudo_magnitude([0, 0, 255, 0, 0, 255, 0, 0, 255]), 1020);
        assert_eq!(sobel_pseudo_magnitude([255, 255, 255, 0, 0, 0, 0, 0, 0]), 1020);
    }

    #[test]
    fn gaussian_rejects_bad_params() {
        let img = GrayImage::filled(3, 3, 1).unwrap();
        assert!(gaussian_smooth(&img, 0.0f64, 2).is_err());
        assert!(gaussian_smooth(&img, 1.0f64, 0).is_err());
    }

    #[test]
    fn gaussian_keeps_constant_image() {
        let img = GrayImage::filled(7, 5, 133).unwrap();
        assert_eq!(gaussian_smooth(&img, 1.4f64, 3).unwrap(), img);
    }

    #[test]
    fn nms_keeps_one_of_a_tied_pair() {
        let g = non_max_suppression(&sobel::<f64>(&step(8, 3, 4), MagnitudeRule::Exact));
        for y in 0..3 {
            let alive: Vec<usize> = (0..8).filter(|&x| g.magnitude(x, y) > 0).collect();
            assert_eq!(alive, vec![3]);
        }
    }

    #[test]
    fn nms_keeps_a_straight_ridge() {
        // a column of equal magnitudes with horizontal gradients: compared
        // only against the zero columns on either side
        let mut mag = vec![0u32; 5 * 5];
        for y in 0..5 {
            mag[y * 5 + 2] = 100;
        }
        let g = GradientMap::<f64>::from_magnitudes(5, 5, mag.clone()).unwrap();
        assert_eq!(non_max_suppression(&g).magnitudes(), &mag[..]);
    }

    #[test]
    fn nms_on_constant_image_is_zero() {
        let g = sobel::<f64>(&GrayImage::filled(4, 4, 9).unwrap(), MagnitudeRule::Exact);
        assert_eq!(non_max_suppression(&g).max_magnitude(), 0);
    }

    #[test]
    fn quantization_bins() {
        let q = |deg: f64| Direction::quantize(deg.to_radians());
        assert_eq!(q(0.0), Direction::D0);
        assert_eq!(q(-22.5), Direction::D0);
        assert_eq!(q(22.4), Direction::D0);
        assert_eq!(q(22.5), Direction::D45);
        assert_eq!(q(90.0), Direction::D90);
        assert_eq!(q(-90.0), Direction::D90);
        assert_eq!(q(135.0), Direction::D135);
        assert_eq!(q(-45.0), Direction::D135);
        assert_eq!(q(180.0), Direction::D0);
    }

    #[test]
    fn hysteresis_examples() {
        let g = GradientMap::<f64>::from_magnitudes(4, 1, vec![120, 80, 80, 40]).unwrap();
        assert_eq!(hysteresis(&g, 100.0, 50.0).unwrap().data(), &[1, 1, 1, 0]);

        let quiet = GradientMap::<f64>::from_magnitudes(3, 1, vec![10, 50, 20]).unwrap();
        assert!(hysteresis(&quiet, 100.0, 50.0).unwrap().is_empty());

        let lone = GradientMap::<f64>::from_magnitudes(3, 3, vec![0, 0, 0, 0, 200, 0, 0, 0, 0]).unwrap();
        assert_eq!(hysteresis(&lone, 100.0, 50.0).unwrap().count_ones(), 1);

        assert_eq!(hysteresis(&g, 50.0, 50.0), Err(Error::ThresholdOrder));
    }

    #[test]
    fn canny_on_constant_image_is_empty() {
        let img = GrayImage::filled(16, 16, 90).unwrap();
        assert!(canny(&img, &CannyParams::<f64>::default()).unwrap().is_empty());
    }

    #[test]
    fn canny_rejects_inverted_thresholds() {
        let img = GrayImage::filled(4, 4, 0).unwrap();
        let params = CannyParams {
            high: 0.1,
            low: 0.2,
            ..CannyParams::<f64>::default()
        };
        assert_eq!(canny(&img, &params), Err(Error::ThresholdOrder));
    }

    #[test]
    fn gray_rendering_scales_to_max() {
        let g = GradientMap::<f32>::from_magnitudes(3, 1, vec![0, 510, 1020]).unwrap();
        assert_eq!(g.to_gray().data(), &[0, 128, 255]);
    }
}
