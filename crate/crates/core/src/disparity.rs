//! Validity-masked disparity maps.
//!
//! Two on-disk encodings are supported:
//!
//! * **PFM** (`Pf` header, one 32-bit float per pixel, bottom row first, scale
//!   sign encodes endianness). Invalid pixels are stored as `+inf`.
//! * **Scaled 16-bit PNG**: `round(d * 256)`, with 0 reserved for invalid pixels.

use std::fs;
use std::path::Path;

use ::image::{ImageBuffer, Luma};

use crate::error::{Error, Result};
use crate::io_util;

/// Largest disparity representable in the scaled 16-bit encoding.
pub const SCALED_MAX: f64 = 65535.0 / 256.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DisparityFormat {
    FloatMap,
    Scaled16,
}

/// W×H disparities in pixels plus a per-pixel validity mask.
///
/// Invalid pixels always hold `0.0` in the value plane and must be checked
/// through [`DisparityMap::is_valid`]/[`DisparityMap::get`].
#[derive(Debug, Clone, PartialEq)]
pub struct DisparityMap {
    width: usize,
    height: usize,
    values: Vec<f64>,
    valid: Vec<bool>,
}

impl DisparityMap {
    /// All-invalid map.
    pub fn new(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            values: vec![0.0; width * height],
            valid: vec![false; width * height],
        }
    }

    /// Builds a map from optional per-pixel values (`None` = invalid).
    pub fn from_options(width: usize, height: usize, cells: Vec<Option<f64>>) -> Result<Self> {
        if cells.len() != width * height {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} map needs {} cells, got {}",
                width,
                height,
                width * height,
                cells.len()
            )));
        }
        let mut map = Self::new(width, height);
        for (i, c) in cells.into_iter().enumerate() {
            if let Some(d) = c {
                check_value(d)?;
                map.values[i] = d;
                map.valid[i] = true;
            }
        }
        Ok(map)
    }

    /// Fully valid map from `f(x, y)`.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut cells = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                cells.push(Some(f(x, y)));
            }
        }
        Self::from_options(width, height, cells)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> Option<f64> {
        let i = y * self.width + x;
        self.valid[i].then(|| self.values[i])
    }

    #[inline]
    pub fn is_valid(&self, x: usize, y: usize) -> bool {
        self.valid[y * self.width + x]
    }

    /// Raw value plane; invalid cells read as 0.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mask(&self) -> &[bool] {
        &self.valid
    }

    /// Sets a valid disparity. Panics on a negative or non-finite value.
    #[inline]
    pub fn set(&mut self, x: usize, y: usize, d: f64) {
        assert!(d.is_finite() && d >= 0.0, "invalid disparity {d}");
        let i = y * self.width + x;
        self.values[i] = d;
        self.valid[i] = true;
    }

    #[inline]
    pub fn invalidate(&mut self, x: usize, y: usize) {
        let i = y * self.width + x;
        self.values[i] = 0.0;
        self.valid[i] = false;
    }

    pub fn valid_count(&self) -> usize {
        self.valid.iter().filter(|v| **v).count()
    }

    /// Fraction of valid pixels in `[0, 1]`.
    pub fn density(&self) -> f64 {
        if self.is_empty() {
            0.0
        } else {
            self.valid_count() as f64 / self.len() as f64
        }
    }

    /// Copy of `self` keeping only pixels where `keep` is true.
    pub fn masked(&self, keep: &[bool]) -> Self {
        assert_eq!(keep.len(), self.len());
        let mut out = self.clone();
        for (i, k) in keep.iter().enumerate() {
            if !k {
                out.values[i] = 0.0;
                out.valid[i] = false;
            }
        }
        out
    }

    pub fn same_shape(&self, other: &DisparityMap) -> bool {
        self.width == other.width && self.height == other.height
    }

    pub(crate) fn from_parts(width: usize, height: usize, values: Vec<f64>, valid: Vec<bool>) -> Self {
        debug_assert_eq!(values.len(), width * height);
        debug_assert!(values
            .iter()
            .zip(&valid)
            .all(|(v, ok)| if *ok { v.is_finite() && *v >= 0.0 } else { *v == 0.0 }));
        Self {
            width,
            height,
            values,
            valid,
        }
    }
}

fn check_value(d: f64) -> Result<()> {
    if d.is_finite() && d >= 0.0 {
        Ok(())
    } else {
        Err(Error::OutOfRange(format!("disparity {d} must be finite and >= 0")))
    }
}

pub fn write_disparity(map: &DisparityMap, path: &Path, format: DisparityFormat) -> Result<()> {
    match format {
        DisparityFormat::FloatMap => io_util::write_atomic(path, &encode_pfm(map)),
        DisparityFormat::Scaled16 => {
            let mut raw = Vec::with_capacity(map.len());
            for (v, ok) in map.values.iter().zip(&map.valid) {
                if !ok {
                    raw.push(0u16);
                    continue;
                }
                if *v > SCALED_MAX {
                    return Err(Error::OutOfRange(format!(
                        "disparity {v} exceeds scaled 16-bit maximum {SCALED_MAX}"
                    )));
                }
                raw.push((v * 256.0).round() as u16);
            }
            let buf: ImageBuffer<Luma<u16>, Vec<u16>> =
                ImageBuffer::from_raw(map.width as u32, map.height as u32, raw).expect("sized");
            io_util::write_png(path, &buf)
        }
    }
}

pub fn read_disparity(path: &Path, format: DisparityFormat) -> Result<DisparityMap> {
    match format {
        DisparityFormat::FloatMap => {
            let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
            decode_pfm(&bytes).map_err(|reason| Error::header(path, reason))
        }
        DisparityFormat::Scaled16 => {
            let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
            let img = ::image::load_from_memory_with_format(&bytes, ::image::ImageFormat::Png)
                .map_err(|e| Error::header(path, e.to_string()))?;
            let ::image::DynamicImage::ImageLuma16(buf) = img else {
                return Err(Error::header(path, "scaled disparity must be a 16-bit grayscale PNG"));
            };
            let (w, h) = (buf.width() as usize, buf.height() as usize);
            let cells = buf
                .into_raw()
                .into_iter()
                .map(|v| (v != 0).then(|| v as f64 / 256.0))
                .collect();
            DisparityMap::from_options(w, h, cells)
        }
    }
}

/// Picks the encoding from the file extension (`.pfm` or `.png`).
pub fn format_for_path(path: &Path) -> Result<DisparityFormat> {
    match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
        Some("pfm") => Ok(DisparityFormat::FloatMap),
        Some("png") => Ok(DisparityFormat::Scaled16),
        _ => Err(Error::InvalidInput(format!(
            "{}: disparity files must end in .pfm or .png",
            path.display()
        ))),
    }
}

/// Writes the validity mask as an 8-bit PNG (255 = valid).
pub fn write_mask(map: &DisparityMap, path: &Path) -> Result<()> {
    let raw = map.valid.iter().map(|v| if *v { 255u8 } else { 0 }).collect();
    let buf: ImageBuffer<Luma<u8>, Vec<u8>> =
        ImageBuffer::from_raw(map.width as u32, map.height as u32, raw).expect("sized");
    io_util::write_png(path, &buf)
}

pub(crate) fn encode_pfm(map: &DisparityMap) -> Vec<u8> {
    let mut out = format!("Pf\n{} {}\n-1.0\n", map.width, map.height).into_bytes();
    out.reserve(map.len() * 4);
    for y in (0..map.height).rev() {
        for x in 0..map.width {
            let v = map.get(x, y).map_or(f32::INFINITY, |d| d as f32);
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

fn next_token<'a>(bytes: &'a [u8], pos: &mut usize) -> Option<&'a str> {
    while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    let start = *pos;
    while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    (start < *pos).then(|| std::str::from_utf8(&bytes[start..*pos]).ok()).flatten()
}

pub(crate) fn decode_pfm(bytes: &[u8]) -> std::result::Result<DisparityMap, String> {
    let mut pos = 0;
    match next_token(bytes, &mut pos) {
        Some("Pf") => {}
        Some("PF") => return Err("3-channel PFM is not a disparity map".into()),
        other => return Err(format!("bad magic {other:?}")),
    }
    let mut number = |what: &str| -> std::result::Result<&str, String> {
        next_token(bytes, &mut pos).ok_or_else(|| format!("missing {what}"))
    };
    let width: usize = number("width")?.parse().map_err(|e| format!("width: {e}"))?;
    let height: usize = number("height")?.parse().map_err(|e| format!("height: {e}"))?;
    let scale: f64 = number("scale")?.parse().map_err(|e| format!("scale: {e}"))?;
    if scale == 0.0 || !scale.is_finite() {
        return Err(format!("invalid scale {scale}"));
    }
    // exactly one whitespace byte separates the header from the raster
    pos += 1;
    let need = width * height * 4;
    let raster = bytes.get(pos..).unwrap_or_default();
    if raster.len() != need {
        return Err(format!("expected {need} raster bytes, found {}", raster.len()));
    }
    let little = scale < 0.0;
    let mut cells = vec![None; width * height];
    for (k, chunk) in raster.chunks_exact(4).enumerate() {
        let b = [chunk[0], chunk[1], chunk[2], chunk[3]];
        let v = if little { f32::from_le_bytes(b) } else { f32::from_be_bytes(b) };
        let (row, x) = (k / width, k % width);
        let y = height - 1 - row;
        if v.is_finite() && v >= 0.0 {
            cells[y * width + x] = Some(v as f64);
        }
    }
    DisparityMap::from_options(width, height, cells).map_err(|e| e.to_string())
}
