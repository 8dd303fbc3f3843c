//! Space-time stereo annotation and cross-spectral registration toolkit.
//!
//! The crate covers the classical half of an RGB / multi-spectral (MS) stereo
//! workflow:
//!
//! * [`image`], [`disparity`], [`cost`]: rasters, validity-masked disparity maps,
//!   cost volumes and their file formats (PNG, band-stack directories, PFM).
//! * [`matching`]: 9×7 census transform, Hamming cost volumes and their
//!   integration over several projected patterns.
//! * [`sgm`]: semi-global cost aggregation and winner-takes-all selection.
//! * [`refine`]: the LRC / ACC / WMDD confidence pool and sub-pixel refinement.
//! * [`stereo`]: the end-to-end matcher built from the stages above.
//! * [`geometry`]: unbalanced rectification, depth conversion, point-cloud
//!   cleaning and disparity warping between rig configurations.
//! * [`supervision`]: proxy-label distillation and categorical disparity targets.
//! * [`eval`]: registration and depth metrics, and MS-to-RGB registration.
//! * [`synth`]: deterministic synthetic scenes used by tests and self-checks.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cost;
pub mod disparity;
pub mod error;
pub mod eval;
pub mod geometry;
pub mod image;
pub mod matching;
pub mod refine;
pub mod sgm;
pub mod stereo;
pub mod supervision;
pub mod synth;

mod io_util;
mod sum;

pub use cost::{Cost, CostVolume};
pub use disparity::{DisparityFormat, DisparityMap};
pub use error::{Error, Result};
pub use image::{BandLayout, BitDepth, MultiBandImage};
pub use io_util::write_atomic;
