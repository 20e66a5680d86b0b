//! Brute-force reference implementations used to check the library.
//!
//! Each oracle is written directly from the definition and shares no code
//! with the implementation it checks.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

use platemorph_core::{BinaryImage, GrayImage};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_gray(rng: &mut ChaCha8Rng, w: usize, h: usize) -> GrayImage {
    GrayImage::new(w, h, (0..w * h).map(|_| rng.gen()).collect()).unwrap()
}

pub fn random_binary(rng: &mut ChaCha8Rng, w: usize, h: usize, density: f64) -> BinaryImage {
    BinaryImage::new(w, h, (0..w * h).map(|_| u8::from(rng.gen_bool(density))).collect()).unwrap()
}

fn clamped(img: &GrayImage, x: i64, y: i64) -> i64 {
    let x = x.max(0).min(img.width() as i64 - 1) as usize;
    let y = y.max(0).min(img.height() as i64 - 1) as usize;
    i64::from(img.data()[y * img.width() + x])
}

/// Sort all nine replicate-padded neighbours and take the middle one.
pub fn median_oracle(img: &GrayImage) -> Vec<u8> {
    let mut out = Vec::new();
    for y in 0..img.height() as i64 {
        for x in 0..img.width() as i64 {
            let mut v: Vec<i64> = Vec::new();
            for dy in [-1, 0, 1] {
                for dx in [-1, 0, 1] {
                    v.push(clamped(img, x + dx, y + dy));
                }
            }
            v.sort();
            out.push(v[4] as u8);
        }
    }
    out
}

/// Neighbourhood `P1..P9`, row-major, replicate padded.
pub fn neighbourhood(img: &GrayImage, x: usize, y: usize) -> [i64; 9] {
    let (x, y) = (x as i64, y as i64);
    [
        clamped(img, x - 1, y - 1),
        clamped(img, x, y - 1),
        clamped(img, x + 1, y - 1),
        clamped(img, x - 1, y),
        clamped(img, x, y),
        clamped(img, x + 1, y),
        clamped(img, x - 1, y + 1),
        clamped(img, x, y + 1),
        clamped(img, x + 1, y + 1),
    ]
}

/// `(gx, gy)` written out over `P1..P9`.
pub fn sobel_oracle(img: &GrayImage) -> (Vec<i64>, Vec<i64>) {
    let mut gx = Vec::new();
    let mut gy = Vec::new();
    for y in 0..img.height() {
        for x in 0..img.width() {
            let p = neighbourhood(img, x, y);
            gx.push((p[2] + 2 * p[5] + p[8]) - (p[0] + 2 * p[3] + p[6]));
            gy.push((p[0] + 2 * p[1] + p[2]) - (p[6] + 2 * p[7] + p[8]));
        }
    }
    (gx, gy)
}

/// Nearest integer to sqrt(n) by integer search.
pub fn isqrt_round(n: i64) -> i64 {
    let mut r = 0i64;
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    // r <= sqrt(n) < r + 1; round up when n > (r + 1/2)^2 = r^2 + r + 1/4
    if n > r * r + r {
        r + 1
    } else {
        r
    }
}

/// Fixed-point iteration: seeds above `high`, grow through 8-neighbours above `low`.
pub fn reachability_oracle(mag: &[u32], w: usize, h: usize, high: f64, low: f64) -> Vec<u8> {
    let mut marked: Vec<bool> = mag.iter().map(|&m| f64::from(m) > high).collect();
    loop {
        let mut changed = false;
        for y in 0..h {
            for x in 0..w {
                let i = y * w + x;
                if marked[i] || f64::from(mag[i]) <= low {
                    continue;
                }
                let touches = (-1i64..=1).any(|dy| {
                    (-1i64..=1).any(|dx| {
                        let (nx, ny) = (x as i64 + dx, y as i64 + dy);
                        nx >= 0 && ny >= 0 && nx < w as i64 && ny < h as i64 && marked[ny as usize * w + nx as usize]
                    })
                });
                if touches {
                    marked[i] = true;
                    changed = true;
                }
            }
        }
        if !changed {
            return marked.into_iter().map(u8::from).collect();
        }
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        self.parent[x] = r;
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Components as sets of (x, y), found by union-find over neighbour pairs.
pub fn union_find_partition(img: &BinaryImage, eight: bool) -> BTreeSet<BTreeSet<(usize, usize)>> {
    let (w, h) = (img.width(), img.height());
    let mut uf = UnionFind {
        parent: (0..w * h).collect(),
    };
    let on = |x: usize, y: usize| img.data()[y * w + x] == 1;
    for y in 0..h {
        for x in 0..w {
            if !on(x, y) {
                continue;
            }
            if x + 1 < w && on(x + 1, y) {
                uf.union(y * w + x, y * w + x + 1);
            }
            if y + 1 < h && on(x, y + 1) {
                uf.union(y * w + x, (y + 1) * w + x);
            }
            if eight && y + 1 < h {
                if x + 1 < w && on(x + 1, y + 1) {
                    uf.union(y * w + x, (y + 1) * w + x + 1);
                }
                if x > 0 && on(x - 1, y + 1) {
                    uf.union(y * w + x, (y + 1) * w + x - 1);
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, BTreeSet<(usize, usize)>> = Default::default();
    for y in 0..h {
        for x in 0..w {
            if on(x, y) {
                let root = uf.find(y * w + x);
                groups.entry(root).or_default().insert((x, y));
            }
        }
    }
    groups.into_values().collect()
}

/// Set of object pixel coordinates.
pub fn ones(img: &BinaryImage) -> HashSet<(i64, i64)> {
    let mut s = HashSet::new();
    for y in 0..img.height() {
        for x in 0..img.width() {
            if img.get(x, y) {
                s.insert((x as i64, y as i64));
            }
        }
    }
    s
}

/// Dilation as a union of shifted copies, clipped to the frame.
pub fn dilate_oracle(img: &BinaryImage, fg_offsets: &[(isize, isize)]) -> BinaryImage {
    let set = ones(img);
    BinaryImage::from_fn(img.width(), img.height(), |x, y| {
        fg_offsets
            .iter()
            .any(|&(dx, dy)| set.contains(&(x as i64 + dx as i64, y as i64 + dy as i64)))
    })
    .unwrap()
}

/// Erosion as an intersection of shifted copies, clipped to the frame.
pub fn erode_oracle(img: &BinaryImage, fg_offsets: &[(isize, isize)]) -> BinaryImage {
    let set = ones(img);
    BinaryImage::from_fn(img.width(), img.height(), |x, y| {
        fg_offsets
            .iter()
            .all(|&(dx, dy)| set.contains(&(x as i64 + dx as i64, y as i64 + dy as i64)))
    })
    .unwrap()
}

/// Sampled, normalized Gaussian weights computed in f64.
pub fn gaussian_weights(sigma: f64, radius: i64) -> Vec<f64> {
    let raw: Vec<f64> = (-radius..=radius)
        .map(|k| (-((k * k) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let s: f64 = raw.iter().sum();
    raw.iter().map(|w| w / s).collect()
}
