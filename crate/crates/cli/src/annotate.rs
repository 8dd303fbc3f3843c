//! `ssf annotate`: active stereo pairs to a cleaned, warped disparity map.

use std::path::Path;
use std::time::Instant;

use log::info;
use serde::Serialize;
use ssf_core::disparity::{write_disparity, write_mask, DisparityFormat, DisparityMap};
use ssf_core::geometry::{
    project_to_cloud, remove_isolated_points, unbalanced_rectify, warp_disparity, write_ply, RigCalibration,
};
use ssf_core::stereo::space_time_stereo;
use ssf_core::supervision::density_gate;
use ssf_core::write_atomic;

use crate::config::PipelineConfig;
use crate::scene::{active_pairs, load_any, rectify, rectify_low};
use crate::{Failure, StageExt, Status};

pub const DISPARITY_NAME: &str = "disparity.pfm";
pub const MASK_NAME: &str = "mask.png";
pub const CLOUD_NAME: &str = "cloud.ply";
pub const MANIFEST_NAME: &str = "manifest.toml";

#[derive(Debug, Clone, Serialize)]
pub struct AnnotationManifest {
    pub scene: String,
    pub pairs: usize,
    /// `rgb-ms` when the map was warped onto the RGB-MS frame, else `rgb-rgb`.
    pub frame: String,
    pub width: usize,
    pub height: usize,
    pub density: f64,
    pub accepted: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub removed_points: usize,
    pub config: PipelineConfig,
}

#[derive(Debug, Clone)]
pub struct Annotation {
    pub disparity: DisparityMap,
    pub cloud: ssf_core::geometry::PointCloud,
    pub manifest: AnnotationManifest,
}

impl Annotation {
    pub fn status(&self) -> Status {
        if self.manifest.accepted {
            Status::Success
        } else {
            Status::Rejected
        }
    }
}

/// Runs the annotation pipeline without writing anything.
pub fn annotate_scene(scene: &Path, cfg: &PipelineConfig) -> Result<Annotation, Failure> {
    let calib_path = scene.join(&cfg.geometry.calibration);
    if !calib_path.is_file() {
        return Err(anyhow::anyhow!("calibration file {} not found", calib_path.display())).stage("geometry");
    }
    let rig = RigCalibration::load(&calib_path).stage("geometry")?;
    let left_cam = rig.camera("left").stage("geometry")?;
    let right_cam = rig.camera("right").stage("geometry")?;
    let rr = unbalanced_rectify(
        &left_cam.calibration,
        &right_cam.calibration,
        (left_cam.width, left_cam.height),
        (right_cam.width, right_cam.height),
    )
    .stage("geometry")?;
    let full = (left_cam.width, left_cam.height);

    let files = active_pairs(scene).stage("input")?;
    let t = Instant::now();
    let mut pairs = Vec::with_capacity(files.len());
    for (lp, rp) in &files {
        let l = load_any(lp).stage("input")?;
        let r = load_any(rp).stage("input")?;
        for (img, cam, p) in [(&l, left_cam, lp), (&r, right_cam, rp)] {
            if (img.width(), img.height()) != (cam.width, cam.height) {
                return Err(anyhow::anyhow!(
                    "{} is {}x{} but the calibration says {}x{}",
                    p.display(),
                    img.width(),
                    img.height(),
                    cam.width,
                    cam.height
                ))
                .stage("input");
            }
        }
        let l = rectify(&l, &rr.h_left, full).stage("rectify")?;
        let r = rectify_low(&r, &rr.h_right, rr.scale_ratio, full).stage("rectify")?;
        pairs.push((l, r));
    }
    info!("loaded and rectified {} pairs in {:.2?}", pairs.len(), t.elapsed());

    let t = Instant::now();
    let refs: Vec<_> = pairs.iter().map(|(l, r)| (l, r)).collect();
    let stereo = space_time_stereo(&refs, &cfg.stereo()).stage("matching")?;
    drop(pairs);
    info!(
        "matching done in {:.2?}; density raw {:.3}, filtered {:.3}",
        t.elapsed(),
        stereo.raw.density(),
        stereo.filtered.density()
    );

    let mut disparity = stereo.refined;
    let cloud = project_to_cloud(&disparity, &rr);
    let cleaned =
        remove_isolated_points(&cloud, cfg.geometry.cleaning_radius, cfg.geometry.min_neighbors).stage("cleaning")?;
    for &(x, y) in &cleaned.removed {
        disparity.invalidate(x, y);
    }
    info!("cleaning removed {} of {} points", cleaned.removed.len(), cloud.len());

    let frame = match rig.cameras.get("ms") {
        Some(ms) => {
            let rm = unbalanced_rectify(&left_cam.calibration, &ms.calibration, full, (ms.width, ms.height))
                .stage("geometry")?;
            disparity = warp_disparity(&disparity, &rr.h_left, &rm.h_left, rm.baseline / rr.baseline, 1.0, full)
                .stage("warping")?;
            "rgb-ms"
        }
        None => "rgb-rgb",
    };

    let density = disparity.density();
    let (accepted, reason) = density_gate(density, cfg.supervision.min_density);
    Ok(Annotation {
        manifest: AnnotationManifest {
            scene: scene.display().to_string(),
            pairs: files.len(),
            frame: frame.into(),
            width: full.0,
            height: full.1,
            density,
            accepted,
            reason,
            removed_points: cleaned.removed.len(),
            config: cfg.clone(),
        },
        cloud: cleaned.kept,
        disparity,
    })
}

/// Annotates `scene` and writes disparity, mask, cleaned cloud and manifest
/// into `out`.
pub fn run(scene: &Path, out: &Path, cfg: &PipelineConfig) -> Result<Annotation, Failure> {
    let a = annotate_scene(scene, cfg)?;
    std::fs::create_dir_all(out).output("output")?;
    write_disparity(&a.disparity, &out.join(DISPARITY_NAME), DisparityFormat::FloatMap).output("output")?;
    write_mask(&a.disparity, &out.join(MASK_NAME)).output("output")?;
    write_ply(&a.cloud, &out.join(CLOUD_NAME)).output("output")?;
    let manifest = toml::to_string(&a.manifest).output("output")?;
    write_atomic(&out.join(MANIFEST_NAME), manifest.as_bytes()).output("output")?;
    if let Some(r) = &a.manifest.reason {
        eprintln!("rejected: {r}");
    }
    Ok(a)
}
