use nalgebra::{Matrix3, Vector3};

use super::calibration::CameraCalibration;
use crate::disparity::DisparityMap;
use crate::error::{Error, Result};
use crate::image::MultiBandImage;

/// Homographies and metric quantities of an unbalanced rectified pair.
///
/// `h_left` maps raw left pixels to rectified high-resolution pixels;
/// `h_right` maps raw right pixels to rectified pixels at the right camera's
/// own (lower) resolution. A low-resolution rectified pixel `(u, v)`
/// corresponds to the high-resolution pixel `(u·s, v·s)`, `s = scale_ratio`.
#[derive(Debug, Clone, PartialEq)]
pub struct RectificationSetup {
    pub h_left: Matrix3<f64>,
    pub h_right: Matrix3<f64>,
    /// Meters.
    pub baseline: f64,
    /// Rectified focal length in high-resolution pixels.
    pub focal: f64,
    /// Rectified principal point in high-resolution pixels.
    pub principal_point: [f64; 2],
    /// High-resolution width over low-resolution width.
    pub scale_ratio: f64,
}

impl RectificationSetup {
    pub fn new(
        h_left: Matrix3<f64>,
        h_right: Matrix3<f64>,
        baseline: f64,
        focal: f64,
        principal_point: [f64; 2],
        scale_ratio: f64,
    ) -> Result<Self> {
        let s = Self {
            h_left,
            h_right,
            baseline,
            focal,
            principal_point,
            scale_ratio,
        };
        s.validate()?;
        Ok(s)
    }

    /// Already rectified rig: identity homographies.
    pub fn rectified(baseline: f64, focal: f64, principal_point: [f64; 2], scale_ratio: f64) -> Result<Self> {
        Self::new(
            Matrix3::identity(),
            Matrix3::identity(),
            baseline,
            focal,
            principal_point,
            scale_ratio,
        )
    }

    pub fn validate(&self) -> Result<()> {
        for (name, h) in [("left", &self.h_left), ("right", &self.h_right)] {
            if !is_invertible(h) {
                return Err(Error::DegenerateGeometry(format!("{name} homography is singular")));
            }
        }
        if !(self.baseline.is_finite() && self.baseline > 0.0) {
            return Err(Error::DegenerateGeometry(format!("baseline {} must be > 0", self.baseline)));
        }
        if !(self.focal.is_finite() && self.focal > 0.0) {
            return Err(Error::DegenerateGeometry(format!("focal {} must be > 0", self.focal)));
        }
        if !(self.scale_ratio.is_finite() && self.scale_ratio >= 1.0) {
            return Err(Error::InvalidParam(format!("scale ratio {} must be >= 1", self.scale_ratio)));
        }
        Ok(())
    }
}

pub(crate) fn is_invertible(h: &Matrix3<f64>) -> bool {
    let det = h.determinant();
    let norm = h.norm();
    det.is_finite() && norm > 0.0 && det.abs() > 1e-12 * norm.powi(3)
}

/// Applies a homography to a pixel position; `None` at infinity.
pub fn apply_homography(h: &Matrix3<f64>, x: f64, y: f64) -> Option<[f64; 2]> {
    let p = h * Vector3::new(x, y, 1.0);
    (p.z.abs() > 1e-12).then(|| [p.x / p.z, p.y / p.z])
}

/// Rectifies a two-camera rig whose left camera has the higher resolution.
///
/// The rectified frame shares the left camera's intrinsics; its x axis runs
/// along the baseline so that left-minus-right disparities are positive.
pub fn unbalanced_rectify(
    calib_left: &CameraCalibration,
    calib_right: &CameraCalibration,
    res_left: (usize, usize),
    res_right: (usize, usize),
) -> Result<RectificationSetup> {
    calib_left.validate()?;
    calib_right.validate()?;
    if res_left.0 == 0 || res_left.1 == 0 || res_right.0 == 0 || res_right.1 == 0 {
        return Err(Error::InvalidInput("camera resolution has zero extent".into()));
    }
    let scale_ratio = res_left.0 as f64 / res_right.0 as f64;
    if scale_ratio < 1.0 {
        return Err(Error::InvalidInput(format!(
            "left camera ({}px wide) must not be narrower than the right ({}px)",
            res_left.0, res_right.0
        )));
    }

    let b = calib_right.center() - calib_left.center();
    let baseline = b.norm();
    if !(baseline > 1e-12) {
        return Err(Error::DegenerateGeometry("camera centers coincide (zero baseline)".into()));
    }
    let e1 = b / baseline;
    let axis = calib_left.rotation.transpose() * Vector3::z();
    let e2 = axis.cross(&e1);
    if e2.norm() < 1e-9 {
        return Err(Error::DegenerateGeometry("baseline is parallel to the optical axis".into()));
    }
    let e2 = e2.normalize();
    let e3 = e1.cross(&e2);
    let r_new = Matrix3::from_rows(&[e1.transpose(), e2.transpose(), e3.transpose()]);

    let k_new = calib_left.intrinsics();
    let inv = |c: &CameraCalibration| {
        c.intrinsics()
            .try_inverse()
            .ok_or_else(|| Error::DegenerateGeometry("intrinsics are not invertible".into()))
    };
    let h_left = k_new * r_new * calib_left.rotation.transpose() * inv(calib_left)?;
    let shrink = Matrix3::new(1.0 / scale_ratio, 0.0, 0.0, 0.0, 1.0 / scale_ratio, 0.0, 0.0, 0.0, 1.0);
    let h_right = shrink * k_new * r_new * calib_right.rotation.transpose() * inv(calib_right)?;

    RectificationSetup::new(
        h_left,
        h_right,
        baseline,
        calib_left.focal,
        calib_left.principal_point,
        scale_ratio,
    )
}

/// Per-pixel metric depth; `None` where undefined.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthMap {
    width: usize,
    height: usize,
    depth: Vec<Option<f64>>,
}

impl DepthMap {
    pub fn new(width: usize, height: usize, depth: Vec<Option<f64>>) -> Result<Self> {
        if depth.len() != width * height {
            return Err(Error::DimensionMismatch(format!(
                "{width}x{height} depth map needs {} cells, got {}",
                width * height,
                depth.len()
            )));
        }
        Ok(Self { width, height, depth })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, x: usize, y: usize) -> Option<f64> {
        self.depth[y * self.width + x]
    }

    pub fn cells(&self) -> &[Option<f64>] {
        &self.depth
    }
}

/// `Z = f·B / d`; zero disparities become invalid.
pub fn disparity_to_depth(disp: &DisparityMap, setup: &RectificationSetup) -> DepthMap {
    let fb = setup.focal * setup.baseline;
    let depth = (0..disp.len())
        .map(|i| {
            let (x, y) = (i % disp.width(), i / disp.width());
            disp.get(x, y).filter(|d| *d > 0.0).map(|d| fb / d)
        })
        .collect();
    DepthMap {
        width: disp.width(),
        height: disp.height(),
        depth,
    }
}

/// `d = f·B / Z`; non-positive or missing depths become invalid.
pub fn depth_to_disparity(depth: &DepthMap, setup: &RectificationSetup) -> DisparityMap {
    let fb = setup.focal * setup.baseline;
    let cells = depth
        .depth
        .iter()
        .map(|z| z.filter(|z| z.is_finite() && *z > 0.0).map(|z| fb / z))
        .collect();
    DisparityMap::from_options(depth.width, depth.height, cells).expect("positive depths give valid disparities")
}

/// Backward-warps `img` by homography `h` (raw → output) into a
/// `width × height` raster. Output pixels that map outside the source are 0.
pub fn warp_image(img: &MultiBandImage, h: &Matrix3<f64>, width: usize, height: usize) -> Result<MultiBandImage> {
    let inv = h
        .try_inverse()
        .filter(|_| is_invertible(h))
        .ok_or_else(|| Error::DegenerateGeometry("image homography is singular".into()))?;
    let bands = img.bands();
    let mut data = vec![0.0f32; width * height * bands];
    for y in 0..height {
        for x in 0..width {
            if let Some([sx, sy]) = apply_homography(&inv, x as f64, y as f64) {
                for c in 0..bands {
                    if let Some(v) = img.sample_bilinear(sx, sy, c) {
                        data[(y * width + x) * bands + c] = v as f32;
                    }
                }
            }
        }
    }
    MultiBandImage::new(width, height, bands, img.depth(), data)
}

/// Resamples a low-resolution image onto a `width × height` grid where pixel
/// `(x, y)` reads the source at `(x / scale, y / scale)`, clamped to the
/// source raster.
pub fn upsample(img: &MultiBandImage, scale: f64, width: usize, height: usize) -> Result<MultiBandImage> {
    if !(scale.is_finite() && scale > 0.0) {
        return Err(Error::InvalidParam(format!("scale {scale} must be > 0")));
    }
    let max_x = (img.width() - 1) as f64;
    let max_y = (img.height() - 1) as f64;
    let bands = img.bands();
    let mut data = Vec::with_capacity(width * height * bands);
    for y in 0..height {
        let sy = (y as f64 / scale).min(max_y);
        for x in 0..width {
            let sx = (x as f64 / scale).min(max_x);
            for c in 0..bands {
                data.push(img.sample_bilinear(sx, sy, c).expect("clamped inside raster") as f32);
            }
        }
    }
    MultiBandImage::new(width, height, bands, img.depth(), data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Rotation3;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn cam(focal: f64, pp: [f64; 2], rot: Matrix3<f64>, center: Vector3<f64>) -> CameraCalibration {
        CameraCalibration::new(focal, pp, rot, -(rot * center)).unwrap()
    }

    #[test]
    fn rectified_rig_gives_identity() {
        let l = cam(800.0, [320.0, 240.0], Matrix3::identity(), Vector3::zeros());
        let r = cam(800.0, [320.0, 240.0], Matrix3::identity(), Vector3::new(0.08, 0.0, 0.0));
        let s = unbalanced_rectify(&l, &r, (640, 480), (640, 480)).unwrap();
        assert!((s.h_left - Matrix3::identity()).amax() < 1e-6);
        assert!((s.h_right - Matrix3::identity()).amax() < 1e-6);
        assert!((s.baseline - 0.08).abs() < 1e-12);
        assert_eq!(s.scale_ratio, 1.0);
    }

    #[test]
    fn scale_ratio_from_widths() {
        let l = cam(2400.0, [1611.0, 802.5], Matrix3::identity(), Vector3::zeros());
        let r = cam(380.0, [255.0, 127.0], Matrix3::identity(), Vector3::new(0.04, 0.0, 0.0));
        let s = unbalanced_rectify(&l, &r, (3222, 1605), (510, 254)).unwrap();
        assert!((s.scale_ratio - 6.318).abs() < 1e-3);
    }

    #[test]
    fn verged_rig_rows_align_after_resize() {
        let mut rng = StdRng::seed_from_u64(11);
        let rl = *Rotation3::from_euler_angles(0.01, 0.04, -0.02).matrix();
        let rr = *Rotation3::from_euler_angles(-0.02, -0.05, 0.015).matrix();
        let l = cam(1200.0, [640.0, 360.0], rl, Vector3::new(0.0, 0.0, 0.0));
        let r = cam(300.0, [158.0, 92.0], rr, Vector3::new(0.08, 0.003, -0.002));
        let s = unbalanced_rectify(&l, &r, (1280, 720), (320, 180)).unwrap();
        for _ in 0..100 {
            let p = Vector3::new(
                rng.random_range(-1.0..1.0),
                rng.random_range(-0.6..0.6),
                rng.random_range(2.0..6.0),
            );
            let [ul, vl] = l.project(&p).unwrap();
            let [ur, vr] = r.project(&p).unwrap();
            let [xl, yl] = apply_homography(&s.h_left, ul, vl).unwrap();
            let [xr, yr] = apply_homography(&s.h_right, ur, vr).unwrap();
            assert!((yl - yr * s.scale_ratio).abs() < 0.05, "{yl} vs {}", yr * s.scale_ratio);
            assert!(xl - xr * s.scale_ratio > 0.0);
        }
    }

    #[test]
    fn coincident_centers_are_degenerate() {
        let l = cam(800.0, [0.0, 0.0], Matrix3::identity(), Vector3::zeros());
        let err = unbalanced_rectify(&l, &l, (10, 10), (10, 10)).unwrap_err();
        assert!(matches!(err, Error::DegenerateGeometry(_)));
    }

    #[test]
    fn depth_formula_and_round_trip() {
        let s = RectificationSetup::rectified(0.04, 1000.0, [0.0, 0.0], 1.0).unwrap();
        let d = DisparityMap::from_options(3, 1, vec![Some(20.0), Some(40.0), Some(0.0)]).unwrap();
        let z = disparity_to_depth(&d, &s);
        assert_eq!(z.get(0, 0), Some(2.0));
        assert_eq!(z.get(1, 0), Some(1.0));
        assert_eq!(z.get(2, 0), None);
        let back = depth_to_disparity(&z, &s);
        assert_eq!(back.get(0, 0), Some(20.0));
        assert_eq!(back.get(2, 0), None);
    }

    #[test]
    fn identity_upsample_and_warp() {
        let img = MultiBandImage::from_fn(4, 3, 1, crate::image::BitDepth::Eight, |x, y, _| (x * 10 + y) as f32).unwrap();
        assert_eq!(upsample(&img, 1.0, 4, 3).unwrap(), img);
        assert_eq!(warp_image(&img, &Matrix3::identity(), 4, 3).unwrap(), img);
    }
}
