//! `ssf eval`: metric report of a prediction against ground truth.

use std::path::Path;

use ssf_core::disparity::{format_for_path, read_disparity};
use ssf_core::eval::{compute_metrics, MetricReport};
use ssf_core::geometry::{unbalanced_rectify, RectificationSetup, RigCalibration};
use ssf_core::write_atomic;

use crate::config::PipelineConfig;
use crate::{Failure, StageExt, Status};

/// RGB-MS rectification of a calibration document.
pub fn ms_setup(calib: &Path) -> Result<RectificationSetup, Failure> {
    let rig = RigCalibration::load(calib).stage("geometry")?;
    let left = rig.camera("left").stage("geometry")?;
    let ms = rig.camera("ms").stage("geometry")?;
    unbalanced_rectify(
        &left.calibration,
        &ms.calibration,
        (left.width, left.height),
        (ms.width, ms.height),
    )
    .stage("geometry")
}

pub fn evaluate(pred: &Path, gt: &Path, calib: &Path, taus: &[f64]) -> Result<MetricReport, Failure> {
    let setup = ms_setup(calib)?;
    let pred = format_for_path(pred)
        .and_then(|f| read_disparity(pred, f))
        .stage("input")?;
    let gt = format_for_path(gt).and_then(|f| read_disparity(gt, f)).stage("input")?;
    compute_metrics(&pred, &gt, &setup, taus).stage("eval")
}

pub fn run(pred: &Path, gt: &Path, calib: &Path, out: Option<&Path>, cfg: &PipelineConfig) -> Result<Status, Failure> {
    let report = evaluate(pred, gt, calib, &cfg.eval.taus)?;
    let table = report.to_table();
    print!("{table}");
    if let Some(dir) = out {
        std::fs::create_dir_all(dir).output("output")?;
        write_atomic(&dir.join("report.toml"), report.to_toml().as_bytes()).output("output")?;
        write_atomic(&dir.join("report.txt"), table.as_bytes()).output("output")?;
    }
    Ok(Status::Success)
}
