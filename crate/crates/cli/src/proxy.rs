//! `ssf proxy`: SGM proxy labels with the density gate over a dataset.

use std::path::Path;

use log::info;
use rayon::prelude::*;
use serde::Serialize;
use ssf_core::disparity::{write_disparity, write_mask, DisparityFormat};
use ssf_core::geometry::{unbalanced_rectify, RigCalibration};
use ssf_core::supervision::{distill_proxy, ProxyGeometry, ProxyInputs, ProxyOutcome, ProxySource};
use ssf_core::write_atomic;

use crate::config::PipelineConfig;
use crate::scene::{dataset_scenes, load_any, ms_path, rectify, rectify_low, RGB_NAME, SECOND_RGB_NAME};
use crate::{Failure, StageExt, Status};

pub const PROXY_NAME: &str = "proxy.pfm";
pub const MASK_NAME: &str = "mask.png";
pub const MANIFEST_NAME: &str = "manifest.toml";

#[derive(Debug, Clone, Serialize)]
pub struct SceneEntry {
    pub name: String,
    pub accepted: bool,
    pub density: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub disparity: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProxyManifest {
    pub mode: ProxySource,
    pub min_density: f64,
    pub accepted: usize,
    pub rejected: usize,
    pub scenes: Vec<SceneEntry>,
    pub config: PipelineConfig,
}

/// Proxy map of one scene, in the rectified RGB-MS frame.
pub fn proxy_scene(scene: &Path, cfg: &PipelineConfig) -> Result<ProxyOutcome, Failure> {
    let mode = cfg.supervision.mode;
    let calib_path = scene.join(&cfg.geometry.calibration);
    let rig = RigCalibration::load(&calib_path).stage("geometry")?;
    let left = rig.camera("left").stage("geometry")?;
    let ms_cam = rig
        .camera("ms")
        .map_err(|_| anyhow::anyhow!("{} has no `ms` camera (the MS geometry descriptor)", calib_path.display()))
        .stage("geometry")?;
    let full = (left.width, left.height);
    let rm = unbalanced_rectify(&left.calibration, &ms_cam.calibration, full, (ms_cam.width, ms_cam.height))
        .stage("geometry")?;
    let rgb = load_any(&scene.join(RGB_NAME)).stage("input")?;
    let cfg_proxy = cfg.proxy();

    let outcome = match mode {
        ProxySource::DirectRgbms => {
            let ms_file = ms_path(scene)
                .ok_or_else(|| anyhow::anyhow!("direct-rgbms mode needs an MS image (ms/ or ms.png) in {}", scene.display()))
                .stage("input")?;
            let ms = load_any(&ms_file).stage("input")?;
            let rgb_r = rectify(&rgb, &rm.h_left, full).stage("rectify")?;
            let ms_r = rectify(&ms, &rm.h_right, (ms.width(), ms.height())).stage("rectify")?;
            let inputs = ProxyInputs {
                rgb: &rgb_r,
                ms: Some(&ms_r),
                second_rgb: None,
                geometry: None,
            };
            distill_proxy(&inputs, &cfg_proxy).stage("matching")?
        }
        ProxySource::SecondRgb => {
            let second_file = scene.join(SECOND_RGB_NAME);
            if !second_file.is_file() {
                return Err(anyhow::anyhow!(
                    "second-rgb mode requires the second RGB camera image {}",
                    second_file.display()
                ))
                .stage("input");
            }
            let right = rig
                .camera("right")
                .map_err(|_| anyhow::anyhow!("second-rgb mode requires a `right` camera in {}", calib_path.display()))
                .stage("geometry")?;
            let rr = unbalanced_rectify(&left.calibration, &right.calibration, full, (right.width, right.height))
                .stage("geometry")?;
            let second = load_any(&second_file).stage("input")?;
            let rgb_r = rectify(&rgb, &rr.h_left, full).stage("rectify")?;
            let second_r = rectify_low(&second, &rr.h_right, rr.scale_ratio, full).stage("rectify")?;
            let geometry = ProxyGeometry {
                h_src: rr.h_left,
                h_dst: rm.h_left,
                baseline_ratio: rm.baseline / rr.baseline,
                scale: 1.0,
                out_width: full.0,
                out_height: full.1,
            };
            let inputs = ProxyInputs {
                rgb: &rgb_r,
                ms: None,
                second_rgb: Some(&second_r),
                geometry: Some(&geometry),
            };
            distill_proxy(&inputs, &cfg_proxy).stage("matching")?
        }
    };
    info!("{}: density {:.3}", scene.display(), outcome.density);
    Ok(outcome)
}

/// Processes every scene of `dataset` and writes accepted proxies plus a
/// manifest to `out`. Rejected only if no scene passes the density gate.
pub fn run(dataset: &Path, out: &Path, cfg: &PipelineConfig) -> Result<Status, Failure> {
    let scenes = dataset_scenes(dataset).stage("input")?;
    let results: Vec<Result<ProxyOutcome, Failure>> = scenes.par_iter().map(|s| proxy_scene(s, cfg)).collect();
    std::fs::create_dir_all(out).output("output")?;
    let mut entries = Vec::with_capacity(scenes.len());
    for (scene, result) in scenes.iter().zip(results) {
        let outcome = result?;
        let name = scene.file_name().unwrap_or_default().to_string_lossy().into_owned();
        let disparity = if outcome.accepted {
            let dir = out.join(&name);
            std::fs::create_dir_all(&dir).output("output")?;
            write_disparity(&outcome.disparity, &dir.join(PROXY_NAME), DisparityFormat::FloatMap).output("output")?;
            write_mask(&outcome.disparity, &dir.join(MASK_NAME)).output("output")?;
            Some(format!("{name}/{PROXY_NAME}"))
        } else {
            None
        };
        entries.push(SceneEntry {
            name,
            accepted: outcome.accepted,
            density: outcome.density,
            reason: outcome.rejection,
            disparity,
        });
    }
    let accepted = entries.iter().filter(|e| e.accepted).count();
    let manifest = ProxyManifest {
        mode: cfg.supervision.mode,
        min_density: cfg.supervision.min_density,
        accepted,
        rejected: entries.len() - accepted,
        scenes: entries,
        config: cfg.clone(),
    };
    let text = toml::to_string(&manifest).output("output")?;
    write_atomic(&out.join(MANIFEST_NAME), text.as_bytes()).output("output")?;
    println!("{accepted} of {} scenes accepted", manifest.scenes.len());
    Ok(if accepted == 0 { Status::Rejected } else { Status::Success })
}
