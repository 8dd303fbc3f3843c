//! Multi-band rasters and their on-disk layouts.
//!
//! Three layouts are supported: a single-band PNG, a 3-band color PNG, and a
//! band-stack directory holding one single-band PNG per band plus a `bands.toml`
//! sidecar that fixes the band order:
//!
//! ```toml
//! width = 510
//! height = 254
//! bands = ["band_00.png", "band_01.png"]
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use ::image::{DynamicImage, ImageBuffer, Luma, Rgb};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io_util;

/// File name of the band-stack sidecar inside a stack directory.
pub const SIDECAR_NAME: &str = "bands.toml";

const LUMA: [f64; 3] = [0.299, 0.587, 0.114];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BitDepth {
    Eight,
    Sixteen,
}

impl BitDepth {
    pub fn max_value(self) -> f32 {
        match self {
            BitDepth::Eight => 255.0,
            BitDepth::Sixteen => 65535.0,
        }
    }
}

/// How an image is laid out on disk.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BandLayout {
    /// One single-band PNG file.
    Single,
    /// One 3-band (RGB) PNG file.
    Color,
    /// Directory of single-band PNGs plus a [`SIDECAR_NAME`] sidecar.
    Stack,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Sidecar {
    width: usize,
    height: usize,
    bands: Vec<String>,
}

/// H×W×C raster with pixel-interleaved, row-major samples.
///
/// Samples are stored as `f32` so derived images (grayscale conversion,
/// resampling) stay exact; every sample lies within the declared bit depth.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiBandImage {
    width: usize,
    height: usize,
    bands: usize,
    depth: BitDepth,
    data: Vec<f32>,
}

fn check_bands(bands: usize) -> Result<()> {
    match bands {
        1 | 3 | 10 => Ok(()),
        n => Err(Error::UnsupportedBands(n)),
    }
}

impl MultiBandImage {
    pub fn new(
        width: usize,
        height: usize,
        bands: usize,
        depth: BitDepth,
        data: Vec<f32>,
    ) -> Result<Self> {
        check_bands(bands)?;
        if width == 0 || height == 0 {
            return Err(Error::InvalidInput("image has zero extent".into()));
        }
        if data.len() != width * height * bands {
            return Err(Error::DimensionMismatch(format!(
                "{}x{}x{} image needs {} samples, got {}",
                width,
                height,
                bands,
                width * height * bands,
                data.len()
            )));
        }
        let max = depth.max_value();
        if let Some(bad) = data.iter().find(|v| !(**v >= 0.0 && **v <= max)) {
            return Err(Error::OutOfRange(format!(
                "sample {bad} outside [0, {max}] for {depth:?} image"
            )));
        }
        Ok(Self {
            width,
            height,
            bands,
            depth,
            data,
        })
    }

    /// Builds an image by evaluating `f(x, y, band)` for every sample.
    pub fn from_fn(
        width: usize,
        height: usize,
        bands: usize,
        depth: BitDepth,
        mut f: impl FnMut(usize, usize, usize) -> f32,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height * bands);
        for y in 0..height {
            for x in 0..width {
                for c in 0..bands {
                    data.push(f(x, y, c));
                }
            }
        }
        Self::new(width, height, bands, depth, data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bands(&self) -> usize {
        self.bands
    }

    pub fn depth(&self) -> BitDepth {
        self.depth
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, band: usize) -> f32 {
        self.data[(y * self.width + x) * self.bands + band]
    }

    #[inline]
    pub fn pixel(&self, x: usize, y: usize) -> &[f32] {
        let start = (y * self.width + x) * self.bands;
        &self.data[start..start + self.bands]
    }

    /// Bilinear sample of one band at a continuous position; `None` outside
    /// the pixel-center hull `[0, W-1] × [0, H-1]`.
    pub fn sample_bilinear(&self, x: f64, y: f64, band: usize) -> Option<f64> {
        const EPS: f64 = 1e-9;
        let max_x = (self.width - 1) as f64;
        let max_y = (self.height - 1) as f64;
        if !(x >= -EPS && y >= -EPS && x <= max_x + EPS && y <= max_y + EPS) {
            return None;
        }
        let x = x.clamp(0.0, max_x);
        let y = y.clamp(0.0, max_y);
        let x0 = (x.floor() as usize).min(self.width - 1);
        let y0 = (y.floor() as usize).min(self.height - 1);
        let x1 = (x0 + 1).min(self.width - 1);
        let y1 = (y0 + 1).min(self.height - 1);
        let fx = x - x0 as f64;
        let fy = y - y0 as f64;
        let v00 = self.get(x0, y0, band) as f64;
        let v10 = self.get(x1, y0, band) as f64;
        let v01 = self.get(x0, y1, band) as f64;
        let v11 = self.get(x1, y1, band) as f64;
        let top = v00 + (v10 - v00) * fx;
        let bottom = v01 + (v11 - v01) * fx;
        Some(top + (bottom - top) * fy)
    }

    /// Rounds every sample to the nearest integer level.
    pub fn quantized(&self) -> Self {
        Self {
            data: self.data.iter().map(|v| v.round()).collect(),
            ..self.clone()
        }
    }

    fn is_integral(&self) -> bool {
        self.data.iter().all(|v| v.fract() == 0.0)
    }

    fn band_u16(&self, band: usize) -> Vec<u16> {
        self.data
            .iter()
            .skip(band)
            .step_by(self.bands)
            .map(|v| *v as u16)
            .collect()
    }
}

/// Collapses an image to one band: band mean for 10-band MS images, 0.299 /
/// 0.587 / 0.114 luma for RGB, identity for single-band input.
pub fn to_single_channel(img: &MultiBandImage) -> Result<MultiBandImage> {
    let data: Vec<f32> = match img.bands {
        1 => return Ok(img.clone()),
        3 => img
            .data
            .chunks_exact(3)
            .map(|p| (LUMA[0] * p[0] as f64 + LUMA[1] * p[1] as f64 + LUMA[2] * p[2] as f64) as f32)
            .collect(),
        10 => img
            .data
            .chunks_exact(10)
            .map(|p| (p.iter().map(|v| *v as f64).sum::<f64>() / 10.0) as f32)
            .collect(),
        n => return Err(Error::UnsupportedBands(n)),
    };
    let max = img.depth.max_value();
    let data = data.into_iter().map(|v| v.clamp(0.0, max)).collect();
    MultiBandImage::new(img.width, img.height, 1, img.depth, data)
}

fn decode(path: &Path) -> Result<DynamicImage> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    ::image::load_from_memory_with_format(&bytes, ::image::ImageFormat::Png)
        .map_err(|e| Error::header(path, e.to_string()))
}

/// Decoded PNG as (width, height, bands, depth, samples).
fn decode_samples(path: &Path) -> Result<(usize, usize, usize, BitDepth, Vec<f32>)> {
    let img = decode(path)?;
    let (w, h) = (img.width() as usize, img.height() as usize);
    Ok(match img {
        DynamicImage::ImageLuma8(b) => (w, h, 1, BitDepth::Eight, b.into_raw().into_iter().map(f32::from).collect()),
        DynamicImage::ImageLuma16(b) => (w, h, 1, BitDepth::Sixteen, b.into_raw().into_iter().map(f32::from).collect()),
        DynamicImage::ImageRgb8(b) => (w, h, 3, BitDepth::Eight, b.into_raw().into_iter().map(f32::from).collect()),
        DynamicImage::ImageRgb16(b) => (w, h, 3, BitDepth::Sixteen, b.into_raw().into_iter().map(f32::from).collect()),
        other => {
            let found = other.color().channel_count() as usize;
            return Err(Error::header(
                path,
                format!("unsupported PNG color type {:?} ({found} channels)", other.color()),
            ));
        }
    })
}

fn sidecar_path(path: &Path) -> PathBuf {
    if path.is_dir() {
        path.join(SIDECAR_NAME)
    } else {
        path.to_path_buf()
    }
}

/// Loads an image with the declared layout, rejecting anything that does not
/// match it exactly.
pub fn load_image(path: &Path, layout: BandLayout) -> Result<MultiBandImage> {
    match layout {
        BandLayout::Single | BandLayout::Color => {
            let expected = if layout == BandLayout::Single { 1 } else { 3 };
            let (w, h, bands, depth, data) = decode_samples(path)?;
            if bands != expected {
                return Err(Error::BandMismatch {
                    expected,
                    found: bands,
                });
            }
            MultiBandImage::new(w, h, bands, depth, data)
        }
        BandLayout::Stack => load_stack(&sidecar_path(path)),
    }
}

fn load_stack(sidecar: &Path) -> Result<MultiBandImage> {
    let text = io_util::read_to_string(sidecar)?;
    let meta: Sidecar = toml::from_str(&text).map_err(|e| Error::Parse {
        path: sidecar.to_path_buf(),
        message: e.to_string(),
    })?;
    let n = meta.bands.len();
    check_bands(n).map_err(|_| Error::BandMismatch {
        expected: 10,
        found: n,
    })?;
    let dir = sidecar.parent().unwrap_or(Path::new("."));
    let mut depth = None;
    let mut data = vec![0.0f32; meta.width * meta.height * n];
    for (band, name) in meta.bands.iter().enumerate() {
        let file = dir.join(name);
        let (w, h, bands, d, samples) = decode_samples(&file)?;
        if bands != 1 {
            return Err(Error::BandMismatch {
                expected: 1,
                found: bands,
            });
        }
        if (w, h) != (meta.width, meta.height) {
            return Err(Error::header(
                &file,
                format!("band is {w}x{h}, sidecar declares {}x{}", meta.width, meta.height),
            ));
        }
        match depth {
            None => depth = Some(d),
            Some(prev) if prev != d => {
                return Err(Error::header(&file, "bands mix 8-bit and 16-bit samples"));
            }
            _ => {}
        }
        for (i, v) in samples.into_iter().enumerate() {
            data[i * n + band] = v;
        }
    }
    MultiBandImage::new(meta.width, meta.height, n, depth.unwrap_or(BitDepth::Eight), data)
}

/// Writes an image in the given layout. Samples must be integral.
///
/// For [`BandLayout::Stack`], `path` is the directory to create; bands are
/// written as `band_NN.png` and listed in order in the sidecar.
pub fn write_image(img: &MultiBandImage, path: &Path, layout: BandLayout) -> Result<()> {
    if !img.is_integral() {
        return Err(Error::InvalidInput(
            "image has fractional samples; quantize before writing".into(),
        ));
    }
    let (w, h) = (img.width as u32, img.height as u32);
    match layout {
        BandLayout::Single | BandLayout::Color => {
            let expected = if layout == BandLayout::Single { 1 } else { 3 };
            if img.bands != expected {
                return Err(Error::BandMismatch {
                    expected,
                    found: img.bands,
                });
            }
            write_png_samples(img, path, w, h)
        }
        BandLayout::Stack => {
            fs::create_dir_all(path).map_err(|e| Error::io(path, e))?;
            let mut names = Vec::with_capacity(img.bands);
            for band in 0..img.bands {
                let name = format!("band_{band:02}.png");
                let samples = img.band_u16(band);
                let file = path.join(&name);
                match img.depth {
                    BitDepth::Eight => {
                        let raw: Vec<u8> = samples.into_iter().map(|v| v as u8).collect();
                        let buf: ImageBuffer<Luma<u8>, _> = ImageBuffer::from_raw(w, h, raw).expect("sized");
                        io_util::write_png(&file, &buf)?;
                    }
                    BitDepth::Sixteen => {
                        let buf: ImageBuffer<Luma<u16>, _> =
                            ImageBuffer::from_raw(w, h, samples).expect("sized");
                        io_util::write_png(&file, &buf)?;
                    }
                }
                names.push(name);
            }
            let sidecar = Sidecar {
                width: img.width,
                height: img.height,
                bands: names,
            };
            let text = toml::to_string(&sidecar).map_err(|e| Error::InvalidInput(e.to_string()))?;
            io_util::write_atomic(&path.join(SIDECAR_NAME), text.as_bytes())
        }
    }
}

fn write_png_samples(img: &MultiBandImage, path: &Path, w: u32, h: u32) -> Result<()> {
    match (img.bands, img.depth) {
        (1, BitDepth::Eight) => {
            let raw = img.data.iter().map(|v| *v as u8).collect();
            io_util::write_png(path, &ImageBuffer::<Luma<u8>, Vec<u8>>::from_raw(w, h, raw).expect("sized"))
        }
        (1, BitDepth::Sixteen) => {
            let raw = img.data.iter().map(|v| *v as u16).collect();
            io_util::write_png(path, &ImageBuffer::<Luma<u16>, Vec<u16>>::from_raw(w, h, raw).expect("sized"))
        }
        (_, BitDepth::Eight) => {
            let raw = img.data.iter().map(|v| *v as u8).collect();
            io_util::write_png(path, &ImageBuffer::<Rgb<u8>, Vec<u8>>::from_raw(w, h, raw).expect("sized"))
        }
        (_, BitDepth::Sixteen) => {
            let raw = img.data.iter().map(|v| *v as u16).collect();
            io_util::write_png(path, &ImageBuffer::<Rgb<u16>, Vec<u16>>::from_raw(w, h, raw).expect("sized"))
        }
    }
}
