//! Scene directory conventions and file helpers shared by the subcommands.
//!
//! An annotation scene holds `calibration.toml` (cameras `left`, `right`
//! and optionally `ms`) and the active pairs `left_<k>.png` /
//! `right_<k>.png`. A proxy scene holds `rgb.png`, `rgb_right.png` and the
//! MS image as a band stack directory `ms/` or a single `ms.png`.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use nalgebra::Matrix3;
use ssf_core::disparity::DisparityMap;
use ssf_core::geometry::{upsample, warp_image};
use ssf_core::image::{load_image, write_image, BandLayout, MultiBandImage, SIDECAR_NAME};
use ssf_core::Error;

pub const RGB_NAME: &str = "rgb.png";
pub const SECOND_RGB_NAME: &str = "rgb_right.png";

/// Loads a PNG (1 or 3 bands) or a band stack (directory or sidecar path).
pub fn load_any(path: &Path) -> anyhow::Result<MultiBandImage> {
    let is_stack = path.is_dir() || path.file_name().is_some_and(|n| n == SIDECAR_NAME);
    let img = if is_stack {
        load_image(path, BandLayout::Stack)
    } else {
        match load_image(path, BandLayout::Single) {
            Err(Error::BandMismatch { found: 3, .. }) => load_image(path, BandLayout::Color),
            other => other,
        }
    };
    img.with_context(|| format!("loading {}", path.display()))
}

pub fn layout_for(img: &MultiBandImage) -> BandLayout {
    match img.bands() {
        1 => BandLayout::Single,
        3 => BandLayout::Color,
        _ => BandLayout::Stack,
    }
}

/// Writes with the layout implied by the band count; stacks go to `stem/`,
/// the others to `stem.png`.
pub fn write_any(img: &MultiBandImage, dir: &Path, stem: &str) -> anyhow::Result<PathBuf> {
    let layout = layout_for(img);
    let path = match layout {
        BandLayout::Stack => dir.join(stem),
        _ => dir.join(format!("{stem}.png")),
    };
    write_image(img, &path, layout).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

/// Active pattern pairs of a scene, sorted by their `<k>` suffix.
pub fn active_pairs(scene: &Path) -> anyhow::Result<Vec<(PathBuf, PathBuf)>> {
    let entries = std::fs::read_dir(scene).with_context(|| format!("reading scene {}", scene.display()))?;
    let mut keys = Vec::new();
    for e in entries {
        let name = e?.file_name().to_string_lossy().into_owned();
        if let Some(key) = name.strip_prefix("left_").and_then(|r| r.strip_suffix(".png")) {
            keys.push(key.to_string());
        }
    }
    keys.sort();
    if keys.is_empty() {
        bail!("no left_<k>.png images in {}", scene.display());
    }
    keys.into_iter()
        .map(|k| {
            let left = scene.join(format!("left_{k}.png"));
            let right = scene.join(format!("right_{k}.png"));
            if !right.is_file() {
                bail!("{} has no matching {}", left.display(), right.display());
            }
            Ok((left, right))
        })
        .collect()
}

/// MS image of a proxy scene: `ms/` stack or `ms.png`.
pub fn ms_path(scene: &Path) -> Option<PathBuf> {
    [scene.join("ms"), scene.join("ms.png")].into_iter().find(|p| p.exists())
}

fn is_identity(h: &Matrix3<f64>) -> bool {
    (h - Matrix3::identity()).amax() < 1e-12
}

/// Warps a raw image into its rectified frame of size `dims`.
pub fn rectify(img: &MultiBandImage, h: &Matrix3<f64>, dims: (usize, usize)) -> anyhow::Result<MultiBandImage> {
    if is_identity(h) && (img.width(), img.height()) == dims {
        return Ok(img.clone());
    }
    Ok(warp_image(img, h, dims.0, dims.1)?.quantized())
}

/// Rectifies the low-resolution side of a pair and brings it to the
/// high-resolution grid.
pub fn rectify_low(
    img: &MultiBandImage,
    h: &Matrix3<f64>,
    scale: f64,
    full: (usize, usize),
) -> anyhow::Result<MultiBandImage> {
    let low = (
        ((full.0 as f64 / scale).round() as usize).max(1),
        ((full.1 as f64 / scale).round() as usize).max(1),
    );
    let rect = rectify(img, h, low)?;
    if low == full {
        Ok(rect)
    } else {
        Ok(upsample(&rect, scale, full.0, full.1)?)
    }
}

/// A validity mask carried as a disparity map so it can be written with
/// the standard mask writer.
pub fn mask_map(width: usize, height: usize, valid: &[bool]) -> DisparityMap {
    DisparityMap::from_options(width, height, valid.iter().map(|v| v.then_some(0.0)).collect())
        .expect("mask dimensions match")
}

/// Scene subdirectories of a dataset, sorted by name.
pub fn dataset_scenes(dataset: &Path) -> anyhow::Result<Vec<PathBuf>> {
    let mut dirs = Vec::new();
    for e in std::fs::read_dir(dataset).with_context(|| format!("reading dataset {}", dataset.display()))? {
        let p = e?.path();
        if p.is_dir() && p.join(RGB_NAME).is_file() {
            dirs.push(p);
        }
    }
    dirs.sort();
    if dirs.is_empty() {
        bail!("no scene directories with {RGB_NAME} under {}", dataset.display());
    }
    Ok(dirs)
}
