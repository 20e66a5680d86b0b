//! Seeded synthetic corpus of car-like scenes with one plate each.
//!
//! Randomness comes from ChaCha8 (`rand_chacha`). Image `i` of a corpus
//! draws from a generator seeded with `seed_from_u64(seed)` and switched to
//! stream `i`, so every image depends only on the seed and its index and
//! corpora can be regenerated image by image on any platform.
//!
//! Each scene is a noisy textured background, a car body rectangle, a
//! bright plate with dark evenly spaced vertical strokes, and distractor
//! rectangles, stripe blocks and lines kept clear of the plate.

use std::fs;
use std::io;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use platemorph_core::netpbm::save_ppm;
use platemorph_core::{BBox, RgbImage};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub seed: u64,
    pub width: usize,
    pub height: usize,
    pub plate_width: RangeInclusive<usize>,
    /// Width over height of the plate rectangle.
    pub plate_aspect: RangeInclusive<f64>,
    pub stroke_width: RangeInclusive<usize>,
    /// Background gap between neighbouring strokes.
    pub stroke_gap: RangeInclusive<usize>,
    /// Peak deviation of the per-pixel background noise.
    pub noise_amplitude: u8,
    pub distractors: RangeInclusive<usize>,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            seed: 42,
            width: 640,
            height: 480,
            plate_width: 110..=220,
            plate_aspect: 2.5..=5.0,
            stroke_width: 2..=4,
            stroke_gap: 4..=10,
            noise_amplitude: 12,
            distractors: 3..=6,
        }
    }
}

/// Sidecar contents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Truth {
    pub bbox: BBox,
}

/// Space the plate keeps from the body outline and from distractors.
const CLEARANCE: usize = 24;

impl SynthSpec {
    pub fn validate(&self) -> Result<(), String> {
        let (pw_lo, pw_hi) = (*self.plate_width.start(), *self.plate_width.end());
        let (a_lo, a_hi) = (*self.plate_aspect.start(), *self.plate_aspect.end());
        if pw_lo < 20 || pw_lo > pw_hi {
            return Err("plate width range must start at 20 or more".into());
        }
        if !(a_lo >= 1.0 && a_lo <= a_hi) {
            return Err("plate aspect range must lie at or above 1".into());
        }
        if (pw_lo as f64 / a_hi).ceil() > (pw_hi as f64 / a_lo).floor() {
            return Err("no integer plate height fits the ranges".into());
        }
        if self.width < pw_hi + 4 * CLEARANCE || self.height < (pw_hi as f64 / a_lo) as usize + 4 * CLEARANCE {
            return Err("image too small for the largest plate".into());
        }
        if *self.stroke_width.start() == 0 || self.stroke_width.is_empty() || self.stroke_gap.is_empty() {
            return Err("stroke ranges must be non-empty with positive width".into());
        }
        if self.distractors.is_empty() {
            return Err("distractor range is empty".into());
        }
        Ok(())
    }

    fn rng(&self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        rng
    }

    /// Scene `index` and its plate box.
    pub fn render(&self, index: u64) -> (RgbImage, BBox) {
        let mut rng = self.rng(index);
        let mut canvas = Canvas::background(self, &mut rng);

        let pw = rng.gen_range(self.plate_width.clone());
        let h_lo = (pw as f64 / self.plate_aspect.end()).ceil() as usize;
        let h_hi = (pw as f64 / self.plate_aspect.start()).floor() as usize;
        let ph = rng.gen_range(h_lo..=h_hi);

        // body large enough to hold the plate with clearance on every side
        let bw = rng.gen_range(pw + 2 * CLEARANCE..=(self.width - 2 * CLEARANCE).max(pw + 2 * CLEARANCE));
        let bh = rng.gen_range(ph + 2 * CLEARANCE..=(self.height - 2 * CLEARANCE).max(ph + 2 * CLEARANCE));
        let bx = rng.gen_range(0..=self.width - bw);
        let by = rng.gen_range(0..=self.height - bh);
        let body_color = dim_color(&mut rng);
        canvas.fill(bx, by, bw, bh, body_color);

        let px = rng.gen_range(bx + CLEARANCE..=bx + bw - CLEARANCE - pw);
        let py = rng.gen_range(by + CLEARANCE..=by + bh - CLEARANCE - ph);
        let plate = BBox::new(py, px, py + ph - 1, px + pw - 1);

        let count = rng.gen_range(self.distractors.clone());
        for _ in 0..count {
            canvas.distractor(&mut rng, plate);
        }

        let ground = rng.gen_range(200..=245);
        canvas.fill(px, py, pw, ph, [ground, ground, rng.gen_range(ground - 20..=ground)]);
        canvas.strokes(self, &mut rng, plate);
        (canvas.img, plate)
    }
}

struct Canvas {
    img: RgbImage,
}

fn dim_color(rng: &mut ChaCha8Rng) -> [u8; 3] {
    [
        rng.gen_range(20..=130),
        rng.gen_range(20..=130),
        rng.gen_range(20..=130),
    ]
}

impl Canvas {
    fn background(spec: &SynthSpec, rng: &mut ChaCha8Rng) -> Self {
        let base: [i16; 3] = [
            rng.gen_range(70..=150),
            rng.gen_range(70..=150),
            rng.gen_range(70..=150),
        ];
        // slow horizontal and vertical ramps plus per-pixel noise
        let ramp_x = rng.gen_range(-30..=30) as f64 / spec.width as f64;
        let ramp_y = rng.gen_range(-30..=30) as f64 / spec.height as f64;
        let amp = i16::from(spec.noise_amplitude);
        let mut data = Vec::with_capacity(spec.width * spec.height * 3);
        for y in 0..spec.height {
            for x in 0..spec.width {
                let shade = (ramp_x * x as f64 + ramp_y * y as f64).round() as i16;
                for b in base {
                    let noise = if amp > 0 { rng.gen_range(-amp..=amp) } else { 0 };
                    data.push((b + shade + noise).clamp(0, 255) as u8);
                }
            }
        }
        Self {
            img: RgbImage::new(spec.width, spec.height, data).expect("spec dimensions are valid"),
        }
    }

    fn fill(&mut self, x: usize, y: usize, w: usize, h: usize, rgb: [u8; 3]) {
        let x1 = (x + w).min(self.img.width());
        let y1 = (y + h).min(self.img.height());
        for yy in y..y1 {
            for xx in x..x1 {
                self.img.put(xx, yy, rgb);
            }
        }
    }

    fn distractor(&mut self, rng: &mut ChaCha8Rng, plate: BBox) {
        let (iw, ih) = (self.img.width(), self.img.height());
        let kind = rng.gen_range(0..3);
        let (w, h) = match kind {
            0 => (rng.gen_range(20..=160), rng.gen_range(12..=110)),
            1 => (rng.gen_range(60..=200), rng.gen_range(20..=60)),
            _ if rng.gen_bool(0.5) => (rng.gen_range(120..=iw / 2), rng.gen_range(1..=3)),
            _ => (rng.gen_range(1..=3), rng.gen_range(80..=ih / 2)),
        };
        let color = [rng.gen_range(0..=255), rng.gen_range(0..=255), rng.gen_range(0..=255)];
        let stripe = rng.gen_range(3..=6);
        // a few placement attempts; give up rather than touch the plate
        for _ in 0..16 {
            let x = rng.gen_range(0..=iw - w);
            let y = rng.gen_range(0..=ih - h);
            let clear = x + w + CLEARANCE <= plate.left
                || x >= plate.right + 1 + CLEARANCE
                || y + h + CLEARANCE <= plate.top
                || y >= plate.bottom + 1 + CLEARANCE;
            if !clear {
                continue;
            }
            if kind == 1 {
                // horizontal grille bars
                for row in (y..y + h).step_by(2 * stripe) {
                    self.fill(x, row, w, stripe, color);
                }
            } else {
                self.fill(x, y, w, h, color);
            }
            return;
        }
    }

    fn strokes(&mut self, spec: &SynthSpec, rng: &mut ChaCha8Rng, plate: BBox) {
        let (pw, ph) = (plate.width(), plate.height());
        let sw = rng.gen_range(spec.stroke_width.clone());
        let gap = rng.gen_range(spec.stroke_gap.clone());
        let margin = rng.gen_range(3..=6);
        let usable = pw - 2 * margin;
        let count = ((usable + gap) / (sw + gap)).max(1);
        // centre the run of strokes inside the margins
        let run = count * sw + (count - 1) * gap;
        let x0 = plate.left + margin + (usable.saturating_sub(run)) / 2;
        let sh = (ph * rng.gen_range(55..=75) / 100).max(1);
        let y0 = plate.top + (ph - sh) / 2;
        let ink = rng.gen_range(0..=50);
        for i in 0..count {
            self.fill(x0 + i * (sw + gap), y0, sw, sh, [ink, ink, ink]);
        }
    }
}

pub fn image_name(index: usize) -> String {
    format!("plate-{index:04}")
}

pub fn sidecar_path(image: &Path) -> PathBuf {
    let stem = image
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    image.with_file_name(format!("{stem}.truth.json"))
}

/// Write `n` scenes and their sidecars into `out`, returning the image paths.
pub fn generate_corpus(spec: &SynthSpec, n: usize, out: &Path) -> io::Result<Vec<PathBuf>> {
    spec.validate()
        .map_err(|e| io::Error::new(io::ErrorKind::InvalidInput, e))?;
    fs::create_dir_all(out)?;
    let mut paths = Vec::with_capacity(n);
    for i in 0..n {
        let (img, bbox) = spec.render(i as u64);
        let path = out.join(format!("{}.ppm", image_name(i)));
        fs::write(&path, save_ppm(&img))?;
        let truth = serde_json::to_string(&Truth { bbox }).map_err(io::Error::other)?;
        fs::write(sidecar_path(&path), truth + "\n")?;
        paths.push(path);
    }
    Ok(paths)
}
