//! Unbalanced rectification, depth conversion, point clouds and disparity
//! warping between rectified frames.

mod calibration;
mod cloud;
mod rectify;
mod warp;

pub use calibration::{CalibratedCamera, CameraCalibration, RigCalibration};
pub use cloud::{ply_string, project_to_cloud, remove_isolated_points, write_ply, CleaningOutcome, CloudPoint, PointCloud};
pub use rectify::{
    apply_homography, depth_to_disparity, disparity_to_depth, unbalanced_rectify, upsample, warp_image, DepthMap,
    RectificationSetup,
};
pub use warp::warp_disparity;
