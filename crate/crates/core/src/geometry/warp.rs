use nalgebra::Matrix3;

use super::rectify::{apply_homography, is_invertible};
use crate::disparity::DisparityMap;
use crate::error::{Error, Result};

/// Largest disparity spread tolerated inside the bilinear footprint.
const JUMP_GUARD: f64 = 1.0;

/// Bilinear sample. `None` outside the pixel hull, when any cell carrying
/// weight is invalid, or when the cells disagree by more than the jump guard.
fn sample_valid(disp: &DisparityMap, x: f64, y: f64) -> Option<f64> {
    const EPS: f64 = 1e-9;
    let max_x = (disp.width() - 1) as f64;
    let max_y = (disp.height() - 1) as f64;
    if !(x >= -EPS && y >= -EPS && x <= max_x + EPS && y <= max_y + EPS) {
        return None;
    }
    let x = x.clamp(0.0, max_x);
    let y = y.clamp(0.0, max_y);
    let x0 = (x.floor() as usize).min(disp.width() - 1);
    let y0 = (y.floor() as usize).min(disp.height() - 1);
    let fx = x - x0 as f64;
    let fy = y - y0 as f64;
    let mut acc = 0.0;
    let mut wsum = 0.0;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (dx, dy, w) in [
        (0, 0, (1.0 - fx) * (1.0 - fy)),
        (1, 0, fx * (1.0 - fy)),
        (0, 1, (1.0 - fx) * fy),
        (1, 1, fx * fy),
    ] {
        if w <= 0.0 {
            continue;
        }
        let v = disp.get(x0 + dx, y0 + dy)?;
        acc += w * v;
        wsum += w;
        lo = lo.min(v);
        hi = hi.max(v);
    }
    (wsum > 0.0 && hi - lo <= JUMP_GUARD).then(|| acc / wsum)
}

/// Backward-warps a disparity map into another rectified frame.
///
/// Destination pixel `p` reads the source at `h_src(h_dst⁻¹(p))`, and the
/// sampled value is multiplied by `baseline_ratio · scale`. Destination
/// pixels that land outside the source, on invalid samples, or across a
/// disparity jump are invalid.
pub fn warp_disparity(
    disp: &DisparityMap,
    h_src: &Matrix3<f64>,
    h_dst: &Matrix3<f64>,
    baseline_ratio: f64,
    scale: f64,
    out_dims: (usize, usize),
) -> Result<DisparityMap> {
    if !is_invertible(h_src) || !is_invertible(h_dst) {
        return Err(Error::DegenerateGeometry("warp homography is singular".into()));
    }
    if !(baseline_ratio.is_finite() && baseline_ratio > 0.0 && scale.is_finite() && scale > 0.0) {
        return Err(Error::InvalidParam(format!(
            "baseline ratio {baseline_ratio} and scale {scale} must be > 0"
        )));
    }
    let h_dst_inv = h_dst.try_inverse().expect("checked invertible");
    let m = h_src * h_dst_inv;
    let factor = baseline_ratio * scale;
    let (w, h) = out_dims;
    let mut out = DisparityMap::new(w, h);
    for y in 0..h {
        for x in 0..w {
            let Some([sx, sy]) = apply_homography(&m, x as f64, y as f64) else {
                continue;
            };
            if let Some(v) = sample_valid(disp, sx, sy) {
                out.set(x, y, v * factor);
            }
        }
    }
    Ok(out)
}
