use std::collections::BTreeMap;
use std::path::Path;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io_util::read_to_string;

const ORTHO_TOL: f64 = 1e-9;

/// Pinhole camera with square pixels and no skew. Lens distortion is assumed
/// already removed from the images.
///
/// Extrinsics map world points into the camera frame: `x_cam = R·X + t`.
#[derive(Debug, Clone, PartialEq)]
pub struct CameraCalibration {
    pub focal: f64,
    pub principal_point: [f64; 2],
    pub rotation: Matrix3<f64>,
    pub translation: Vector3<f64>,
}

impl CameraCalibration {
    pub fn new(focal: f64, principal_point: [f64; 2], rotation: Matrix3<f64>, translation: Vector3<f64>) -> Result<Self> {
        let c = Self {
            focal,
            principal_point,
            rotation,
            translation,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.focal.is_finite() && self.focal > 0.0) {
            return Err(Error::DegenerateGeometry(format!(
                "focal length {} makes the intrinsics non-invertible",
                self.focal
            )));
        }
        if !self.principal_point.iter().all(|v| v.is_finite()) || !self.translation.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidInput("calibration contains non-finite values".into()));
        }
        let err = (self.rotation.transpose() * self.rotation - Matrix3::identity()).amax();
        if !(err <= ORTHO_TOL) || self.rotation.determinant() <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "rotation is not a proper orthonormal matrix (|RᵀR - I| = {err:e})"
            )));
        }
        Ok(())
    }

    pub fn intrinsics(&self) -> Matrix3<f64> {
        let [cx, cy] = self.principal_point;
        Matrix3::new(self.focal, 0.0, cx, 0.0, self.focal, cy, 0.0, 0.0, 1.0)
    }

    /// Camera center in world coordinates.
    pub fn center(&self) -> Vector3<f64> {
        -(self.rotation.transpose() * self.translation)
    }

    /// Projects a world point to pixel coordinates; `None` behind the camera.
    pub fn project(&self, world: &Vector3<f64>) -> Option<[f64; 2]> {
        let p = self.intrinsics() * (self.rotation * world + self.translation);
        (p.z > 0.0).then(|| [p.x / p.z, p.y / p.z])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CameraEntry {
    focal: f64,
    principal_point: [f64; 2],
    /// Row-major.
    rotation: [f64; 9],
    translation: [f64; 3],
    resolution: [usize; 2],
}

/// One calibrated camera together with its image resolution.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibratedCamera {
    pub calibration: CameraCalibration,
    pub width: usize,
    pub height: usize,
}

/// Named cameras of an acquisition rig, typically `left`, `right` and `ms`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RigCalibration {
    pub cameras: BTreeMap<String, CalibratedCamera>,
}

impl RigCalibration {
    pub fn camera(&self, name: &str) -> Result<&CalibratedCamera> {
        self.cameras
            .get(name)
            .ok_or_else(|| Error::InvalidInput(format!("calibration has no camera named `{name}`")))
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let entries: BTreeMap<String, CameraEntry> =
            toml::from_str(text).map_err(|e| Error::InvalidInput(format!("calibration: {}", e.message())))?;
        let mut cameras = BTreeMap::new();
        for (name, e) in entries {
            let calibration = CameraCalibration::new(
                e.focal,
                e.principal_point,
                Matrix3::from_row_slice(&e.rotation),
                Vector3::from(e.translation),
            )
            .map_err(|err| Error::InvalidInput(format!("camera `{name}`: {err}")))?;
            if e.resolution[0] == 0 || e.resolution[1] == 0 {
                return Err(Error::InvalidInput(format!("camera `{name}`: zero resolution")));
            }
            cameras.insert(
                name,
                CalibratedCamera {
                    calibration,
                    width: e.resolution[0],
                    height: e.resolution[1],
                },
            );
        }
        Ok(Self { cameras })
    }

    pub fn to_toml_string(&self) -> String {
        let entries: BTreeMap<&str, CameraEntry> = self
            .cameras
            .iter()
            .map(|(name, cam)| {
                let c = &cam.calibration;
                let mut rotation = [0.0; 9];
                for r in 0..3 {
                    for col in 0..3 {
                        rotation[r * 3 + col] = c.rotation[(r, col)];
                    }
                }
                (
                    name.as_str(),
                    CameraEntry {
                        focal: c.focal,
                        principal_point: c.principal_point,
                        rotation,
                        translation: [c.translation.x, c.translation.y, c.translation.z],
                        resolution: [cam.width, cam.height],
                    },
                )
            })
            .collect();
        toml::to_string(&entries).expect("calibration entries serialize")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = read_to_string(path)?;
        Self::from_toml_str(&text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }
}
