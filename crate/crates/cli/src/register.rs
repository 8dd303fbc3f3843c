//! `ssf register`: MS image resampled onto the RGB frame.

use std::path::Path;

use ssf_core::disparity::{format_for_path, read_disparity, write_mask};
use ssf_core::eval::{register_ms, RegisteredMs};

use crate::evaluate::ms_setup;
use crate::scene::{load_any, mask_map, rectify, write_any};
use crate::{Failure, StageExt, Status};

pub const REGISTERED_STEM: &str = "registered";
pub const VALID_NAME: &str = "valid.png";

/// Rectifies the raw MS image and samples it at every valid pixel of the
/// disparity map.
pub fn register(ms: &Path, disp: &Path, calib: &Path) -> Result<RegisteredMs, Failure> {
    let setup = ms_setup(calib)?;
    let ms = load_any(ms).stage("input")?;
    let disp = format_for_path(disp)
        .and_then(|f| read_disparity(disp, f))
        .stage("input")?;
    let ms = rectify(&ms, &setup.h_right, (ms.width(), ms.height())).stage("rectify")?;
    register_ms(&ms, &disp, &setup).stage("register")
}

pub fn run(ms: &Path, disp: &Path, calib: &Path, out: &Path) -> Result<Status, Failure> {
    let reg = register(ms, disp, calib)?;
    std::fs::create_dir_all(out).output("output")?;
    let img = reg.image.quantized();
    write_any(&img, out, REGISTERED_STEM).output("output")?;
    write_mask(&mask_map(img.width(), img.height(), &reg.valid), &out.join(VALID_NAME)).output("output")?;
    Ok(Status::Success)
}
