//! Deterministic synthetic scenes with analytic disparity: random-dot
//! textures on slanted planes, active pattern sequences and a simulated
//! cross-spectral rig.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::disparity::DisparityMap;
use crate::error::Result;
use crate::image::{BitDepth, MultiBandImage};

/// Disparity plane `d(x, y) = a·x + b·y + c` in left-image pixels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plane {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Plane {
    #[inline]
    pub fn disparity(&self, x: f64, y: f64) -> f64 {
        self.a * x + self.b * y + self.c
    }

    /// Left x coordinate seen at right-image position `(xr, y)`.
    #[inline]
    pub fn left_x(&self, xr: f64, y: f64) -> f64 {
        (xr + self.b * y + self.c) / (1.0 - self.a)
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self {
            a: self.a * k,
            b: self.b * k,
            c: self.c * k,
        }
    }

    pub fn disparity_map(&self, width: usize, height: usize) -> DisparityMap {
        DisparityMap::from_fn(width, height, |x, y| self.disparity(x as f64, y as f64).max(0.0))
            .expect("finite plane disparities")
    }

    /// Random plane with disparities inside `[lo, hi]` over a `width × height`
    /// image.
    pub fn random(rng: &mut impl Rng, width: usize, height: usize, lo: f64, hi: f64) -> Self {
        let span = hi - lo;
        let a = rng.random_range(-0.3..0.3) * span / width as f64;
        let b = rng.random_range(-0.3..0.3) * span / height as f64;
        let corners = [0.0, a * width as f64, b * height as f64, a * width as f64 + b * height as f64];
        let min = corners.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = corners.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let c = rng.random_range((lo - min)..=(hi - max).max(lo - min));
        Self { a, b, c }
    }
}

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Infinite random-dot texture: uniform random values on a lattice of the
/// given cell size, bilinearly interpolated. Values lie in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Texture {
    seed: u64,
    cell: f64,
}

impl Texture {
    pub fn new(seed: u64, cell: f64) -> Self {
        assert!(cell > 0.0, "texture cell must be positive");
        Self { seed, cell }
    }

    fn lattice(&self, i: i64, j: i64) -> f64 {
        let h = mix(self.seed ^ mix(i as u64 ^ mix(j as u64)));
        (h >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn value(&self, x: f64, y: f64) -> f64 {
        let u = x / self.cell;
        let v = y / self.cell;
        let (i, j) = (u.floor(), v.floor());
        let (fu, fv) = (u - i, v - j);
        let (i, j) = (i as i64, j as i64);
        let top = self.lattice(i, j) * (1.0 - fu) + self.lattice(i + 1, j) * fu;
        let bottom = self.lattice(i, j + 1) * (1.0 - fu) + self.lattice(i + 1, j + 1) * fu;
        top * (1.0 - fv) + bottom * fv
    }
}

fn level(t: f64) -> f32 {
    (16.0 + 223.0 * t).round() as f32
}

/// Renders a rectified 8-bit grayscale pair of a textured plane.
pub fn render_pair(texture: &Texture, plane: &Plane, width: usize, height: usize) -> Result<(MultiBandImage, MultiBandImage)> {
    let left = MultiBandImage::from_fn(width, height, 1, BitDepth::Eight, |x, y, _| {
        level(texture.value(x as f64, y as f64))
    })?;
    let right = MultiBandImage::from_fn(width, height, 1, BitDepth::Eight, |x, y, _| {
        let y = y as f64;
        level(texture.value(plane.left_x(x as f64, y), y))
    })?;
    Ok((left, right))
}

/// Active acquisition of one static plane under `patterns` different
/// random-dot projections.
#[derive(Debug, Clone)]
pub struct ActiveScene {
    pub plane: Plane,
    pub pairs: Vec<(MultiBandImage, MultiBandImage)>,
}

impl ActiveScene {
    pub fn ground_truth(&self) -> DisparityMap {
        let (l, _) = &self.pairs[0];
        self.plane.disparity_map(l.width(), l.height())
    }

    pub fn pair_refs(&self) -> Vec<(&MultiBandImage, &MultiBandImage)> {
        self.pairs.iter().map(|(l, r)| (l, r)).collect()
    }
}

pub fn active_scene(seed: u64, width: usize, height: usize, patterns: usize, plane: Plane) -> Result<ActiveScene> {
    let pairs = (0..patterns)
        .map(|k| render_pair(&Texture::new(mix(seed) ^ k as u64, 1.6), &plane, width, height))
        .collect::<Result<Vec<_>>>()?;
    Ok(ActiveScene { plane, pairs })
}

/// Cross-spectral rig: an RGB reference, a second RGB camera at twice the
/// MS baseline, and a low-resolution 10-band MS camera whose bands respond
/// non-monotonically to the scene's color.
#[derive(Debug, Clone)]
pub struct CrossSpectralScene {
    pub rgb: MultiBandImage,
    pub second_rgb: MultiBandImage,
    pub ms: MultiBandImage,
    /// RGB-RGB disparity plane.
    pub plane_rr: Plane,
    /// RGB-MS baseline over RGB-RGB baseline.
    pub baseline_ratio: f64,
    /// RGB width over MS width.
    pub scale: usize,
}

impl CrossSpectralScene {
    /// Analytic RGB-MS disparity in high-resolution pixels.
    pub fn ground_truth_ms(&self) -> DisparityMap {
        self.plane_rr
            .scaled(self.baseline_ratio)
            .disparity_map(self.rgb.width(), self.rgb.height())
    }
}

struct BandResponse {
    weights: [f64; 3],
    freq: f64,
    phase: f64,
}

pub fn cross_spectral_scene(seed: u64, width: usize, height: usize, scale: usize, plane_rr: Plane) -> Result<CrossSpectralScene> {
    let mut rng = StdRng::seed_from_u64(seed);
    let channels: Vec<Texture> = (0..3).map(|_| Texture::new(rng.random(), 3.0)).collect();
    let color = |x: f64, y: f64| [channels[0].value(x, y), channels[1].value(x, y), channels[2].value(x, y)];
    let responses: Vec<BandResponse> = (0..10)
        .map(|_| BandResponse {
            weights: [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)],
            freq: rng.random_range(1.5..3.0),
            phase: rng.random_range(0.0..std::f64::consts::TAU),
        })
        .collect();

    let rgb = MultiBandImage::from_fn(width, height, 3, BitDepth::Eight, |x, y, c| {
        level(color(x as f64, y as f64)[c])
    })?;
    let second_rgb = MultiBandImage::from_fn(width, height, 3, BitDepth::Eight, |x, y, c| {
        let y = y as f64;
        level(color(plane_rr.left_x(x as f64, y), y)[c])
    })?;

    let baseline_ratio = 0.5;
    let plane_ms = plane_rr.scaled(baseline_ratio);
    let s = scale as f64;
    let (mw, mh) = (width / scale, height / scale);
    let spread = (s - 1.0) / 2.0;
    let ms = MultiBandImage::from_fn(mw, mh, 10, BitDepth::Eight, |u, v, band| {
        let r = &responses[band];
        let mut acc = 0.0;
        for ky in 0..scale {
            for kx in 0..scale {
                let xh = u as f64 * s + kx as f64 - spread;
                let yh = v as f64 * s + ky as f64 - spread;
                let [cr, cg, cb] = color(plane_ms.left_x(xh, yh), yh);
                let mixv = r.weights[0] * cr + r.weights[1] * cg + r.weights[2] * cb;
                acc += 0.5 + 0.5 * (std::f64::consts::TAU * r.freq * mixv + r.phase).sin();
            }
        }
        level(acc / (scale * scale) as f64)
    })?;
    Ok(CrossSpectralScene {
        rgb,
        second_rgb,
        ms,
        plane_rr,
        baseline_ratio,
        scale,
    })
}
